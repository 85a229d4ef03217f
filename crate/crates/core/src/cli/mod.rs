//! The `qdiscord` command line. Every command prints one JSON envelope on
//! stdout; exit codes are 0 (ok, whatever the verdict), 2 (unparseable input),
//! 3 (input violates a precondition) and 4 (numerical failure).

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::cnotcase::{self, CaseLabel, OpType, TypeSampler};
use crate::discord::{self, DiscordOptions, SideDiscord, DEFAULT_GRID_DEG, DEFAULT_ZERO_TOL};
use crate::error::Error;
use crate::gates::{self, GateCase, VerdictOptions};
use crate::qmat::ComplexMatrix;
use crate::qstate::{self, DensityMatrix, Ket, Side};

pub mod input;
pub mod output;

pub use input::{parse_state, parse_unitary, InputError, StateInput};
pub use output::{digest, format_float, ReportEnvelope};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "qdiscord",
    version,
    about = "Quantum discord and LOCC gate-implementability checks"
)]
pub struct Cli {
    /// Emit JSON (the only output format; accepted for scripting clarity).
    #[arg(long, global = true)]
    pub json: bool,

    /// Discord at or below this many bits counts as zero.
    #[arg(long, global = true, default_value_t = DEFAULT_ZERO_TOL)]
    pub tol: f64,

    /// Coarse grid step over Bloch angles, in degrees.
    #[arg(long, global = true, default_value_t = DEFAULT_GRID_DEG)]
    pub grid_deg: f64,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-way discord of a state file.
    Discord {
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = SideArg::Sym)]
        side: SideArg,
    },
    /// Quantum mutual information of a state file.
    Mutualinfo { state: PathBuf },
    /// Lemma 1 / Lemma 2 verdicts for a gate on a set of inputs.
    GateCheck(GateCheckArgs),
    /// The CNOT example: table checks and discrimination statistics.
    CnotExample(CnotExampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    Sym,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LemmaMode {
    Lemma1,
    Lemma2,
}

#[derive(Debug, Args)]
pub struct GateCheckArgs {
    /// `cnot` or a unitary file.
    #[arg(long, default_value = "cnot")]
    pub gate: String,
    #[arg(long, value_enum)]
    pub mode: LemmaMode,
    /// A state file, `table1:<a|b|c|d>`, or `maximally-mixed`.
    #[arg(long = "input", required = true)]
    pub inputs: Vec<String>,
    /// Mixture weights for lemma 2 (default 0.1,...,0.9).
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct CnotExampleArgs {
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// `uniform-consistent` or `deterministic-XY` with X, Y in {F, N, U}.
    #[arg(long, default_value = "uniform-consistent")]
    pub sampler: String,
    #[arg(long, default_value = "a")]
    pub true_input: String,
    #[arg(long, default_value_t = 20)]
    pub max_rounds: usize,
}

/// What a finished invocation prints and returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Parse(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        match e {
            InputError::Parse(msg) => Failure::Parse(msg),
            InputError::Invalid(e) => Failure::Core(e),
        }
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Parse(_) => EXIT_PARSE,
            Failure::Core(Error::Numerical(_)) => EXIT_NUMERICAL,
            Failure::Core(_) => EXIT_INVALID,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Parse(msg) => format!("parse error: {msg}"),
            Failure::Core(e) => e.to_string(),
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            return Outcome { code, stdout, stderr };
        }
    };
    match execute(&cli) {
        Ok(env) => Outcome {
            code: EXIT_OK,
            stdout: env.render(),
            stderr: String::new(),
        },
        Err(f) => Outcome {
            code: f.code(),
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message()),
        },
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))
}

struct Context {
    opts: DiscordOptions,
    zero_tol: f64,
    seed: u64,
}

impl Context {
    fn from_cli(cli: &Cli) -> Result<Self, Failure> {
        if !(cli.tol.is_finite() && cli.tol >= 0.0) {
            return Err(Failure::Parse(format!(
                "--tol must be a non-negative number, got {}",
                cli.tol
            )));
        }
        if !(cli.grid_deg > 0.0 && cli.grid_deg <= 90.0) {
            return Err(Failure::Parse(format!(
                "--grid-deg must be in (0, 90], got {}",
                cli.grid_deg
            )));
        }
        Ok(Self {
            opts: DiscordOptions::with_grid_deg(cli.grid_deg),
            zero_tol: cli.tol,
            seed: cli.seed,
        })
    }

    fn tolerances(&self) -> Map<String, Value> {
        let mut t = Map::new();
        t.insert("grid_deg".into(), json!(self.opts.grid_deg));
        t.insert("zero_tol".into(), json!(self.zero_tol));
        t.insert("refine_starts".into(), json!(self.opts.refine_starts));
        t.insert("simplex_f_tol".into(), json!(self.opts.simplex.f_tol));
        t.insert("simplex_x_tol".into(), json!(self.opts.simplex.x_tol));
        t.insert("state_tol".into(), json!(qstate::STATE_TOL));
        t.insert("entropy_clamp".into(), json!(qstate::ENTROPY_CLAMP));
        t
    }

    fn flag_bytes(&self) -> Vec<u8> {
        format!(
            "grid_deg={};tol={};seed={}",
            self.opts.grid_deg, self.zero_tol, self.seed
        )
        .into_bytes()
    }
}

fn envelope(command: &str, digest: String, result: impl Serialize, tolerances: Map<String, Value>) -> ReportEnvelope {
    ReportEnvelope {
        command: command.into(),
        inputs_digest: digest,
        result: serde_json::to_value(result).expect("results are plain data"),
        tolerances,
        version: env!("CARGO_PKG_VERSION").into(),
    }
}

fn execute(cli: &Cli) -> Result<ReportEnvelope, Failure> {
    let ctx = Context::from_cli(cli)?;
    match &cli.command {
        Command::Discord { state, side } => cmd_discord(&ctx, state, *side),
        Command::Mutualinfo { state } => cmd_mutualinfo(&ctx, state),
        Command::GateCheck(args) => cmd_gate_check(&ctx, args),
        Command::CnotExample(args) => cmd_cnot_example(&ctx, args),
    }
}

#[derive(Serialize)]
struct SideReport {
    side: String,
    value: f64,
    theta: f64,
    phi: f64,
    zero_discord: bool,
}

impl SideReport {
    fn new(side: Side, d: &SideDiscord, zero_tol: f64) -> Self {
        let angles = d.angles();
        Self {
            side: side.to_string(),
            value: d.value,
            theta: angles.theta,
            phi: angles.phi,
            zero_discord: d.value <= zero_tol,
        }
    }
}

fn cmd_discord(ctx: &Context, path: &PathBuf, side: SideArg) -> Result<ReportEnvelope, Failure> {
    let text = read(path)?;
    let rho = parse_state(&text)?.density()?;
    let result = match side {
        SideArg::A | SideArg::B => {
            let s = if side == SideArg::A { Side::A } else { Side::B };
            let d = discord::d2_side_with(&rho, s, &ctx.opts)?;
            serde_json::to_value(SideReport::new(s, &d, ctx.zero_tol)).expect("plain data")
        }
        SideArg::Sym => {
            let d = discord::d2_sym_with(&rho, &ctx.opts)?;
            json!({
                "side": "sym",
                "value": d.value,
                "zero_discord": d.value <= ctx.zero_tol,
                "side_a": SideReport::new(Side::A, &d.side_a, ctx.zero_tol),
                "side_b": SideReport::new(Side::B, &d.side_b, ctx.zero_tol),
            })
        }
    };
    let side_name = format!("{side:?}");
    let digest = digest(&[b"discord", side_name.as_bytes(), &ctx.flag_bytes(), text.as_bytes()]);
    Ok(envelope("discord", digest, result, ctx.tolerances()))
}

fn cmd_mutualinfo(ctx: &Context, path: &PathBuf) -> Result<ReportEnvelope, Failure> {
    let text = read(path)?;
    let rho = parse_state(&text)?.density()?;
    let result = json!({
        "mutual_information": qstate::quantum_mutual_information(&rho),
        "entropy_a": qstate::von_neumann_entropy(&qstate::partial_trace(&rho, Side::A)),
        "entropy_b": qstate::von_neumann_entropy(&qstate::partial_trace(&rho, Side::B)),
        "entropy_joint": qstate::von_neumann_entropy(&rho),
    });
    let digest = digest(&[b"mutualinfo", &ctx.flag_bytes(), text.as_bytes()]);
    let mut tol = Map::new();
    tol.insert("state_tol".into(), json!(qstate::STATE_TOL));
    tol.insert("entropy_clamp".into(), json!(qstate::ENTROPY_CLAMP));
    Ok(envelope("mutualinfo", digest, result, tol))
}

/// A resolved `--input`, plus the bytes it contributes to the digest.
struct NamedInput {
    label: String,
    state: StateInput,
    bytes: Vec<u8>,
}

fn resolve_input(spec: &str) -> Result<NamedInput, Failure> {
    if let Some(tag) = spec.strip_prefix("table1:") {
        let label = CaseLabel::parse(tag)
            .ok_or_else(|| Failure::Parse(format!("unknown table row `{tag}` (expected a, b, c or d)")))?;
        return Ok(NamedInput {
            label: spec.into(),
            state: StateInput::Pure {
                ket: cnotcase::table_row(label).input(),
                dims: (2, 2),
            },
            bytes: spec.as_bytes().to_vec(),
        });
    }
    if spec == "maximally-mixed" {
        return Ok(NamedInput {
            label: spec.into(),
            state: StateInput::Density(DensityMatrix::maximally_mixed(2, 2)),
            bytes: spec.as_bytes().to_vec(),
        });
    }
    let text = read(&PathBuf::from(spec))?;
    Ok(NamedInput {
        label: spec.into(),
        state: parse_state(&text)?,
        bytes: text.into_bytes(),
    })
}

fn cmd_gate_check(ctx: &Context, args: &GateCheckArgs) -> Result<ReportEnvelope, Failure> {
    let (unitary, gate_bytes): (ComplexMatrix, Vec<u8>) = if args.gate == "cnot" {
        (gates::cnot(), b"cnot".to_vec())
    } else {
        let text = read(&PathBuf::from(&args.gate))?;
        let (u, dims) = parse_unitary(&text)?;
        if dims != (2, 2) {
            return Err(Error::UnsupportedDimension(format!("gate must act on 2x2, got {}x{}", dims.0, dims.1)).into());
        }
        (u, text.into_bytes())
    };
    let inputs = args
        .inputs
        .iter()
        .map(|s| resolve_input(s))
        .collect::<Result<Vec<_>, _>>()?;
    let verdict_opts = VerdictOptions {
        discord: ctx.opts,
        zero_tol: ctx.zero_tol,
        diff_tol: gates::DISCORD_DIFF_TOL,
    };

    let weights = args.weights.clone().unwrap_or_else(gates::default_weights);
    let verdict = match args.mode {
        LemmaMode::Lemma1 => {
            let states = inputs
                .iter()
                .map(|i| i.state.density())
                .collect::<Result<Vec<_>, _>>()?;
            let labels = inputs.iter().map(|i| i.label.clone()).collect();
            let case = GateCase::new(unitary, states, labels)?;
            gates::lemma1_verdict_with(&case, &verdict_opts)?
        }
        LemmaMode::Lemma2 => {
            if inputs.len() != 2 {
                return Err(
                    Error::InvalidArgument(format!("lemma2 takes exactly 2 inputs, got {}", inputs.len())).into(),
                );
            }
            let kets = inputs
                .iter()
                .map(|i| match &i.state {
                    StateInput::Pure { ket, .. } => Ok(ket.clone()),
                    StateInput::Density(_) => Err(Error::InvalidArgument(format!(
                        "lemma2 input {} must be a ket (`amplitudes`)",
                        i.label
                    ))),
                })
                .collect::<Result<Vec<Ket>, _>>()?;
            gates::lemma2_verdict_with(
                &kets[0],
                &kets[1],
                inputs[0].state.dims(),
                &unitary,
                &weights,
                &verdict_opts,
            )?
        }
    };

    let mode = format!("{:?}", args.mode);
    let weight_text = weights.iter().map(|w| format_float(*w)).collect::<Vec<_>>().join(",");
    let mut chunks: Vec<&[u8]> = vec![b"gate-check", mode.as_bytes(), &gate_bytes, weight_text.as_bytes()];
    let flags = ctx.flag_bytes();
    chunks.push(&flags);
    for i in &inputs {
        chunks.push(&i.bytes);
    }
    let mut tol = ctx.tolerances();
    tol.insert("diff_tol".into(), json!(verdict_opts.diff_tol));
    tol.insert("product_tol".into(), json!(gates::PRODUCT_TOL));
    tol.insert("overlap_tol".into(), json!(gates::OVERLAP_TOL));
    tol.insert("unitary_tol".into(), json!(gates::UNITARY_TOL));
    tol.insert("state_match_tol".into(), json!(gates::STATE_MATCH_TOL));
    let labels: Vec<&str> = inputs.iter().map(|i| i.label.as_str()).collect();
    let result = json!({
        "gate": if args.gate == "cnot" { "cnot" } else { "file" },
        "inputs": labels,
        "verdict": verdict,
    });
    Ok(envelope("gate-check", digest(&chunks), result, tol))
}

fn parse_sampler(s: &str) -> Result<TypeSampler, Failure> {
    if s == "uniform-consistent" {
        return Ok(TypeSampler::UniformConsistent);
    }
    let bad = || {
        Failure::Parse(format!(
            "unknown sampler `{s}` (uniform-consistent or deterministic-XY)"
        ))
    };
    let pair = s.strip_prefix("deterministic-").ok_or_else(bad)?;
    let mut chars = pair.chars().map(|c| OpType::parse(&c.to_string()));
    match (chars.next().flatten(), chars.next().flatten(), chars.next()) {
        (Some(a), Some(b), None) => Ok(TypeSampler::Deterministic((a, b))),
        _ => Err(bad()),
    }
}

fn cmd_cnot_example(ctx: &Context, args: &CnotExampleArgs) -> Result<ReportEnvelope, Failure> {
    let sampler = parse_sampler(&args.sampler)?;
    let true_input = CaseLabel::parse(&args.true_input)
        .ok_or_else(|| Failure::Parse(format!("unknown --true-input `{}`", args.true_input)))?;
    if args.runs == 0 {
        return Err(Error::InvalidArgument("--runs must be at least 1".into()).into());
    }
    let example = cnotcase::discrimination_run(true_input, &sampler, args.max_rounds, ctx.seed)?;
    let summary = cnotcase::monte_carlo(true_input, &sampler, args.runs, args.max_rounds, ctx.seed)?;
    let report = cnotcase::single_copy_contradiction_report();
    let result = json!({
        "true_input": true_input,
        "sampler": args.sampler,
        "table1_check": cnotcase::table1_check(),
        "table2": report.table2,
        "overlaps": report.overlaps,
        "statements": report.statements,
        "example_run": example,
        "monte_carlo": summary,
    });
    let params = format!(
        "runs={};sampler={};true_input={};max_rounds={}",
        args.runs, args.sampler, args.true_input, args.max_rounds
    );
    let digest = digest(&[b"cnot-example", params.as_bytes(), &ctx.flag_bytes()]);
    let mut tol = Map::new();
    tol.insert("type_fidelity".into(), json!(cnotcase::TYPE_FIDELITY));
    tol.insert("exact_fidelity".into(), json!(cnotcase::EXACT_FIDELITY));
    tol.insert("grid_deg".into(), json!(ctx.opts.grid_deg));
    tol.insert("zero_tol".into(), json!(ctx.zero_tol));
    Ok(envelope("cnot-example", digest, result, tol))
}
