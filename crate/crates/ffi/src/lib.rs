//! C ABI over `qdiscord`.
//!
//! States live behind an opaque `QdState` handle. Every fallible call returns
//! a `QdStatus`; on failure `qd_last_error` describes what went wrong on the
//! calling thread. Strings handed out by the library are freed with
//! `qd_string_free`, handles with `qd_state_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qdiscord::cli::{self, InputError};
use qdiscord::discord::{self, DiscordOptions};
use qdiscord::qmat::{ComplexMatrix, C64};
use qdiscord::qstate::{self, DensityMatrix, Side};
use qdiscord::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdStatus {
    Ok = 0,
    NullPointer = 1,
    Parse = 2,
    Invalid = 3,
    Numerical = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdSide {
    A = 0,
    B = 1,
}

impl From<QdSide> for Side {
    fn from(s: QdSide) -> Self {
        match s {
            QdSide::A => Side::A,
            QdSide::B => Side::B,
        }
    }
}

/// Opaque bipartite density matrix.
pub struct QdState {
    rho: DensityMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(QdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Numerical(_) => QdStatus::Numerical,
            _ => QdStatus::Invalid,
        };
        Failure(status, e.to_string())
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        match e {
            InputError::Parse(msg) => Failure(QdStatus::Parse, msg),
            InputError::Invalid(e) => e.into(),
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(QdStatus::NullPointer, format!("{what} is NULL"))
}

/// Runs `body`, converting errors and panics into a status plus last-error text.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => QdStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            QdStatus::Panic
        }
    }
}

unsafe fn state_ref<'a>(state: *const QdState) -> Result<&'a DensityMatrix, Failure> {
    state.as_ref().map(|s| &s.rho).ok_or_else(|| null("state"))
}

unsafe fn out_ref<'a, T>(out: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    out.as_mut().ok_or_else(|| null(what))
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(QdStatus::Parse, format!("{what} is not valid UTF-8")))
}

fn boxed(rho: DensityMatrix) -> *mut QdState {
    Box::into_raw(Box::new(QdState { rho }))
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a state in the JSON file format (`dims` plus `matrix` or `amplitudes`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qd_state_from_json(json: *const c_char, out: *mut *mut QdState) -> QdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let rho = cli::parse_state(c_str(json, "json")?)?.density()?;
        *out = boxed(rho);
        Ok(())
    })
}

/// Builds a state from `(dim_a*dim_b)^2` complex entries, row-major, stored as
/// interleaved (re, im) doubles.
///
/// # Safety
/// `entries` must point to `2*(dim_a*dim_b)^2` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qd_state_from_matrix(
    entries: *const f64,
    dim_a: usize,
    dim_b: usize,
    out: *mut *mut QdState,
) -> QdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        if entries.is_null() {
            return Err(null("entries"));
        }
        let n = dim_a
            .checked_mul(dim_b)
            .filter(|&n| n > 0 && n <= qdiscord::qmat::MAX_DIM)
            .ok_or_else(|| Failure(QdStatus::Invalid, format!("unsupported dims {dim_a}x{dim_b}")))?;
        let raw = std::slice::from_raw_parts(entries, 2 * n * n);
        let data = raw.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
        let rho = DensityMatrix::new(ComplexMatrix::new(n, data)?, dim_a, dim_b)?;
        *out = boxed(rho);
        Ok(())
    })
}

/// Releases a handle; NULL is ignored.
///
/// # Safety
/// `state` must come from a `qd_state_from_*` call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qd_state_free(state: *mut QdState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle; `dim_a` and `dim_b` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qd_state_dims(state: *const QdState, dim_a: *mut usize, dim_b: *mut usize) -> QdStatus {
    guard(|| {
        let (a, b) = state_ref(state)?.dims();
        *out_ref(dim_a, "dim_a")? = a;
        *out_ref(dim_b, "dim_b")? = b;
        Ok(())
    })
}

/// Von Neumann entropy of the whole state, in bits.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qd_entropy(state: *const QdState, out: *mut f64) -> QdStatus {
    guard(|| {
        let rho = state_ref(state)?;
        *out_ref(out, "out")? = qstate::von_neumann_entropy(rho);
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qd_mutual_information(state: *const QdState, out: *mut f64) -> QdStatus {
    guard(|| {
        let rho = state_ref(state)?;
        *out_ref(out, "out")? = qstate::quantum_mutual_information(rho);
        Ok(())
    })
}

fn options(grid_deg: f64) -> Result<DiscordOptions, Failure> {
    if !(grid_deg > 0.0 && grid_deg <= 90.0) {
        return Err(Failure(
            QdStatus::Invalid,
            format!("grid step {grid_deg} outside (0, 90]"),
        ));
    }
    Ok(DiscordOptions::with_grid_deg(grid_deg))
}

/// One-sided discord with a qubit measured on `side`, plus the optimal Bloch
/// angles. `theta` and `phi` may be NULL.
///
/// # Safety
/// `state` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qd_discord(
    state: *const QdState,
    side: QdSide,
    grid_deg: f64,
    value: *mut f64,
    theta: *mut f64,
    phi: *mut f64,
) -> QdStatus {
    guard(|| {
        let rho = state_ref(state)?;
        let value = out_ref(value, "value")?;
        let d = discord::d2_side_with(rho, side.into(), &options(grid_deg)?)?;
        *value = d.value;
        let angles = d.angles();
        if let Some(t) = theta.as_mut() {
            *t = angles.theta;
        }
        if let Some(p) = phi.as_mut() {
            *p = angles.phi;
        }
        Ok(())
    })
}

/// Symmetric two-way discord (smaller of the two one-sided values).
///
/// # Safety
/// `state` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qd_discord_sym(state: *const QdState, grid_deg: f64, value: *mut f64) -> QdStatus {
    guard(|| {
        let rho = state_ref(state)?;
        let value = out_ref(value, "value")?;
        *value = discord::d2_sym_with(rho, &options(grid_deg)?)?.value;
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qd_is_zero_discord(state: *const QdState, side: QdSide, tol: f64, out: *mut bool) -> QdStatus {
    guard(|| {
        let rho = state_ref(state)?;
        *out_ref(out, "out")? = discord::is_zero_discord(rho, side.into(), tol)?;
        Ok(())
    })
}

/// Positive-partial-transpose test; conclusive only up to total dimension 6.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qd_is_ppt(state: *const QdState, out: *mut bool) -> QdStatus {
    guard(|| {
        let rho = state_ref(state)?;
        *out_ref(out, "out")? = qstate::is_ppt_separable(rho)?;
        Ok(())
    })
}

fn exit_status(code: i32) -> QdStatus {
    match code {
        cli::EXIT_OK => QdStatus::Ok,
        cli::EXIT_PARSE => QdStatus::Parse,
        cli::EXIT_NUMERICAL => QdStatus::Numerical,
        _ => QdStatus::Invalid,
    }
}

/// Runs a command-line invocation in process, e.g. `{"gate-check", "--mode",
/// "lemma2", "--input", "table1:a", "--input", "table1:c"}` (no program name).
/// On success `*out_json` receives the JSON envelope, to be released with
/// `qd_string_free`.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qd_run(argc: usize, argv: *const *const c_char, out_json: *mut *mut c_char) -> QdStatus {
    guard(|| {
        let out = out_ref(out_json, "out_json")?;
        *out = ptr::null_mut();
        if argv.is_null() && argc > 0 {
            return Err(null("argv"));
        }
        let mut args = vec!["qdiscord".to_string()];
        for i in 0..argc {
            args.push(c_str(*argv.add(i), "argv entry")?.to_string());
        }
        let outcome = cli::run(args);
        let status = exit_status(outcome.code);
        if status != QdStatus::Ok {
            return Err(Failure(status, outcome.stderr.trim_end().to_string()));
        }
        *out = CString::new(outcome.stdout)
            .map_err(|_| Failure(QdStatus::Numerical, "envelope contains NUL".into()))?
            .into_raw();
        Ok(())
    })
}

/// Lemma 1 or 2 check (`mode` is 1 or 2) for CNOT on inputs given as
/// `table1:<a-d>`, `maximally-mixed`, or state file paths.
///
/// # Safety
/// `inputs` must hold `n_inputs` NUL-terminated strings; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qd_gate_check_cnot(
    mode: c_int,
    inputs: *const *const c_char,
    n_inputs: usize,
    out_json: *mut *mut c_char,
) -> QdStatus {
    let mode_arg = match mode {
        1 => c"lemma1",
        2 => c"lemma2",
        _ => {
            set_last_error(format!("mode must be 1 or 2, got {mode}"));
            return QdStatus::Invalid;
        }
    };
    if inputs.is_null() && n_inputs > 0 {
        set_last_error("inputs is NULL");
        return QdStatus::NullPointer;
    }
    let mut argv: Vec<*const c_char> = vec![c"gate-check".as_ptr(), c"--mode".as_ptr(), mode_arg.as_ptr()];
    for i in 0..n_inputs {
        argv.push(c"--input".as_ptr());
        argv.push(*inputs.add(i));
    }
    qd_run(argv.len(), argv.as_ptr(), out_json)
}

/// The CNOT discrimination example. `sampler` is `uniform-consistent` or
/// `deterministic-XY`; `true_input` is one of `a`..`d`.
///
/// # Safety
/// String arguments must be NUL-terminated; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qd_cnot_example(
    runs: usize,
    seed: u64,
    sampler: *const c_char,
    true_input: *const c_char,
    max_rounds: usize,
    out_json: *mut *mut c_char,
) -> QdStatus {
    if sampler.is_null() || true_input.is_null() {
        set_last_error("sampler or true_input is NULL");
        return QdStatus::NullPointer;
    }
    let owned = [runs.to_string(), seed.to_string(), max_rounds.to_string()].map(|s| CString::new(s).expect("digits"));
    let argv = [
        c"cnot-example".as_ptr(),
        c"--runs".as_ptr(),
        owned[0].as_ptr(),
        c"--seed".as_ptr(),
        owned[1].as_ptr(),
        c"--max-rounds".as_ptr(),
        owned[2].as_ptr(),
        c"--sampler".as_ptr(),
        sampler,
        c"--true-input".as_ptr(),
        true_input,
    ];
    qd_run(argv.len(), argv.as_ptr(), out_json)
}

/// Frees a string returned by this library; NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
