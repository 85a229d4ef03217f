//! Measurement-based discord D2.
//!
//! A projective measurement on one side turns ρ into the block-diagonal
//! state ρ^Π = Σ_a Π^a ⊗ ρ_{·|a} p_a. The one-sided discord is the smallest
//! entropy increase S(ρ^Π) − S(ρ) over rank-one projective measurements,
//! which equals H(p) + Σ_a p_a S(ρ_{·|a}) − S(ρ). For a qubit side the
//! measurement is a point (θ, φ) on the Bloch sphere, and the minimum is found
//! by an exhaustive angular grid followed by simplex polishing.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qmat::{self, eig_hermitian, eigenvalues_2x2, eigenvalues_hermitian, vdot, ComplexMatrix, C64, ZERO};
use crate::qstate::{
    entropy_of_spectrum, partial_trace, shannon_entropy, von_neumann_entropy, DensityMatrix, Ket, Side,
};

pub mod simplex;

pub const DEFAULT_GRID_DEG: f64 = 2.0;
pub const DEFAULT_ZERO_TOL: f64 = 1e-7;
/// Outcomes at or below this probability have no conditional state.
pub const PROB_FLOOR: f64 = 1e-12;
/// Largest negative raw minimum tolerated before clamping to zero.
pub const NEGATIVITY_TOL: f64 = 1e-9;
const BASIS_TOL: f64 = 1e-10;

/// Bloch angles of a qubit measurement, θ ∈ [0, π], φ ∈ [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAngles {
    pub theta: f64,
    pub phi: f64,
}

impl BlochAngles {
    /// Folds arbitrary angles into the canonical range without changing the
    /// measured basis.
    pub fn normalized(theta: f64, phi: f64) -> Self {
        let two_pi = 2.0 * PI;
        let mut t = theta.rem_euclid(two_pi);
        let mut p = phi;
        if t > PI {
            t = two_pi - t;
            p += PI;
        }
        let mut p = p.rem_euclid(two_pi);
        if p >= two_pi {
            p = 0.0;
        }
        Self { theta: t, phi: p }
    }

    /// {(cos θ/2, e^{iφ} sin θ/2), (−e^{−iφ} sin θ/2, cos θ/2)}
    pub fn basis_vectors(&self) -> [[C64; 2]; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let e = C64::from_polar(1.0, self.phi);
        [[C64::new(c, 0.0), e * s], [-e.conj() * s, C64::new(c, 0.0)]]
    }
}

/// Complete rank-one projective measurement on one side.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    side: Side,
    basis: Vec<Ket>,
    angles: Option<BlochAngles>,
}

impl ProjectiveMeasurement {
    /// Checks orthonormality and completeness to 1e-10.
    pub fn new(side: Side, basis: Vec<Ket>) -> Result<Self> {
        let d = basis.first().map(Ket::dim).unwrap_or(0);
        if d == 0 || basis.len() != d {
            return Err(Error::InvalidArgument(format!(
                "measurement needs {d} basis vectors, got {}",
                basis.len()
            )));
        }
        for (i, u) in basis.iter().enumerate() {
            if u.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: u.dim(),
                });
            }
            for (j, v) in basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                if (vdot(u.amplitudes(), v.amplitudes()) - expected).norm() > BASIS_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "basis vectors {i} and {j} are not orthonormal"
                    )));
                }
            }
        }
        Ok(Self {
            side,
            basis,
            angles: None,
        })
    }

    pub fn bloch(side: Side, theta: f64, phi: f64) -> Self {
        let angles = BlochAngles::normalized(theta, phi);
        let basis = angles
            .basis_vectors()
            .into_iter()
            .map(|v| Ket::new(v.to_vec()).expect("Bloch basis vectors are unit"))
            .collect();
        Self {
            side,
            basis,
            angles: Some(angles),
        }
    }

    pub fn computational(side: Side, dim: usize) -> Self {
        let basis = (0..dim).map(|i| Ket::basis(dim, i)).collect();
        let angles = (dim == 2).then_some(BlochAngles { theta: 0.0, phi: 0.0 });
        Self { side, basis, angles }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Ket] {
        &self.basis
    }

    pub fn angles(&self) -> Option<BlochAngles> {
        self.angles
    }

    pub fn projectors(&self) -> Vec<ComplexMatrix> {
        self.basis.iter().map(Ket::projector).collect()
    }
}

#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub probabilities: Vec<f64>,
    /// State of the unmeasured side given each outcome; `None` when p_a ≤ 1e-12.
    pub conditional_states: Vec<Option<DensityMatrix>>,
    /// Σ_a p_a Π^a ⊗ ρ_{·|a} on the full space (in the original A ⊗ B order).
    pub averaged_state: DensityMatrix,
    /// Σ_a p_a Π^a on the measured side.
    pub averaged_marginal: DensityMatrix,
}

fn check_side(rho: &DensityMatrix, m: &ProjectiveMeasurement) -> Result<()> {
    let d = rho.side_dim(m.side);
    if d != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: m.dim(),
        });
    }
    Ok(())
}

/// ρ rearranged so that the measured side comes first.
fn measured_first(rho: &DensityMatrix, side: Side) -> DensityMatrix {
    match side {
        Side::A => rho.clone(),
        Side::B => rho.swapped(),
    }
}

/// ⟨v|ρ|v⟩ on the first factor, an operator on the second.
fn sandwich(rho: &DensityMatrix, v: &[C64]) -> ComplexMatrix {
    let (da, db) = rho.dims();
    let m = rho.matrix();
    ComplexMatrix::from_fn(db, |r, c| {
        let mut acc = ZERO;
        for i in 0..da {
            for j in 0..da {
                acc += v[i].conj() * v[j] * m[(i * db + r, j * db + c)];
            }
        }
        acc
    })
}

pub fn project_measure(rho: &DensityMatrix, m: &ProjectiveMeasurement) -> Result<MeasurementOutcome> {
    check_side(rho, m)?;
    let work = measured_first(rho, m.side);
    let (dm, du) = work.dims();

    let mut probabilities = Vec::with_capacity(dm);
    let mut conditional_states = Vec::with_capacity(dm);
    let mut averaged = ComplexMatrix::zeros(dm * du);
    let mut marginal = ComplexMatrix::zeros(dm);

    for ket in &m.basis {
        let block = sandwich(&work, ket.amplitudes());
        let p = block.trace().re.max(0.0);
        probabilities.push(p);
        let proj = ket.projector();
        averaged = &averaged + &qmat::tensor_product(&proj, &block);
        marginal = &marginal + &proj.scale_real(p);
        if p > PROB_FLOOR {
            conditional_states.push(Some(DensityMatrix::normalized(block.hermitian_part(), du, 1)?));
        } else {
            conditional_states.push(None);
        }
    }

    let averaged = DensityMatrix::new(averaged, dm, du)?;
    let averaged_state = match m.side {
        Side::A => averaged,
        Side::B => averaged.swapped(),
    };
    Ok(MeasurementOutcome {
        probabilities,
        conditional_states,
        averaged_state,
        averaged_marginal: DensityMatrix::single(marginal)?,
    })
}

/// Σ_a p_a S(ρ_{·|a}), the entropy of the unmeasured side given the outcome.
pub fn conditional_entropy(rho: &DensityMatrix, m: &ProjectiveMeasurement) -> Result<f64> {
    let out = project_measure(rho, m)?;
    Ok(out
        .probabilities
        .iter()
        .zip(&out.conditional_states)
        .filter_map(|(p, s)| s.as_ref().map(|s| p * von_neumann_entropy(s)))
        .sum())
}

/// J2 for a measurement on side X with partner Y:
/// S(ρ_Y) − S(ρ_Y|Π_X) + S(ρ_X) − S(ρ_X^Π).
pub fn j2(rho: &DensityMatrix, m: &ProjectiveMeasurement) -> Result<f64> {
    let out = project_measure(rho, m)?;
    let measured = partial_trace(rho, m.side);
    let partner = partial_trace(rho, m.side.other());
    let cond: f64 = out
        .probabilities
        .iter()
        .zip(&out.conditional_states)
        .filter_map(|(p, s)| s.as_ref().map(|s| p * von_neumann_entropy(s)))
        .sum();
    Ok(von_neumann_entropy(&partner) - cond + von_neumann_entropy(&measured)
        - von_neumann_entropy(&out.averaged_marginal))
}

/// S(ρ^Π) − S(ρ): the entropy increase caused by the given measurement.
pub fn d2_measured(rho: &DensityMatrix, m: &ProjectiveMeasurement) -> Result<f64> {
    let out = project_measure(rho, m)?;
    Ok(von_neumann_entropy(&out.averaged_state) - von_neumann_entropy(rho))
}

/// H(p) + Σ p_a S(ρ_{·|a}) − S(ρ) with p computed from the measurement,
/// i.e. the quantity minimized by [`d2_side`].
pub fn measured_objective(rho: &DensityMatrix, m: &ProjectiveMeasurement) -> Result<f64> {
    let out = project_measure(rho, m)?;
    let cond: f64 = out
        .probabilities
        .iter()
        .zip(&out.conditional_states)
        .filter_map(|(p, s)| s.as_ref().map(|s| p * von_neumann_entropy(s)))
        .sum();
    Ok(shannon_entropy(&out.probabilities) + cond - von_neumann_entropy(rho))
}

/// Fast evaluation of the discord objective for a qubit measured side.
///
/// Uses Σ_a h(spec M_a) − S(ρ) where M_a = ⟨v_a|ρ|v_a⟩ is the unnormalized
/// conditional operator; this equals H(p) + Σ p_a S(M_a/p_a) − S(ρ).
#[derive(Debug, Clone)]
pub struct QubitObjective {
    blocks: [[ComplexMatrix; 2]; 2],
    partner_dim: usize,
    joint_entropy: f64,
}

impl QubitObjective {
    pub fn new(rho: &DensityMatrix, side: Side) -> Result<Self> {
        let d = rho.side_dim(side);
        if d != 2 {
            return Err(Error::UnsupportedDimension(format!(
                "measured side {side} has dimension {d}; only qubit sides are supported"
            )));
        }
        let work = measured_first(rho, side);
        let blocks = [
            [work.a_block(0, 0), work.a_block(0, 1)],
            [work.a_block(1, 0), work.a_block(1, 1)],
        ];
        Ok(Self {
            blocks,
            partner_dim: work.dim_b(),
            joint_entropy: von_neumann_entropy(rho),
        })
    }

    pub fn joint_entropy(&self) -> f64 {
        self.joint_entropy
    }

    fn outcome_entropy(&self, v: &[C64; 2]) -> f64 {
        let w = [
            [v[0].conj() * v[0], v[0].conj() * v[1]],
            [v[1].conj() * v[0], v[1].conj() * v[1]],
        ];
        let n = self.partner_dim;
        let entry = |r: usize, c: usize| -> C64 {
            w.iter()
                .zip(&self.blocks)
                .map(|(wi, bi)| wi.iter().zip(bi).map(|(x, b)| x * b[(r, c)]).sum::<C64>())
                .sum()
        };
        if n == 2 {
            let ev = eigenvalues_2x2(entry(0, 0).re, entry(1, 1).re, entry(0, 1));
            entropy_of_spectrum(&ev)
        } else {
            let m = ComplexMatrix::from_fn(n, entry);
            let ev = eigenvalues_hermitian(&m.hermitian_part()).expect("sandwiched block is Hermitian");
            entropy_of_spectrum(&ev)
        }
    }

    pub fn eval(&self, theta: f64, phi: f64) -> f64 {
        let [v0, v1] = BlochAngles { theta, phi }.basis_vectors();
        self.outcome_entropy(&v0) + self.outcome_entropy(&v1) - self.joint_entropy
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DiscordOptions {
    /// Grid resolution in degrees for the coarse search.
    pub grid_deg: f64,
    /// Number of distinct grid minima polished by the simplex.
    pub refine_starts: usize,
    pub simplex: simplex::SimplexOptions,
    pub parallel: bool,
}

impl Default for DiscordOptions {
    fn default() -> Self {
        Self {
            grid_deg: DEFAULT_GRID_DEG,
            refine_starts: 3,
            simplex: simplex::SimplexOptions::default(),
            parallel: true,
        }
    }
}

impl DiscordOptions {
    pub fn with_grid_deg(grid_deg: f64) -> Self {
        Self {
            grid_deg,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SideDiscord {
    /// Clamped to [0, ∞).
    pub value: f64,
    /// Minimum before clamping.
    pub raw_value: f64,
    pub argmin: ProjectiveMeasurement,
    pub grid_value: f64,
}

impl SideDiscord {
    pub fn angles(&self) -> BlochAngles {
        self.argmin
            .angles()
            .expect("optimizer returns Bloch-parametrized measurements")
    }
}

/// Angular grid: θ_i = i·Δ for i = 0..=nθ, φ_j = j·Δ for j = 0..nφ.
#[derive(Debug, Clone, Copy)]
pub struct AngleGrid {
    pub n_theta: usize,
    pub n_phi: usize,
    pub step: f64,
}

impl AngleGrid {
    pub fn new(step_deg: f64) -> Result<Self> {
        if !(step_deg > 0.0 && step_deg <= 90.0) {
            return Err(Error::InvalidArgument(format!(
                "grid resolution {step_deg} deg out of range (0, 90]"
            )));
        }
        let n = (180.0 / step_deg).round().max(1.0) as usize;
        let step = PI / n as f64;
        Ok(Self {
            n_theta: n,
            n_phi: 2 * n,
            step,
        })
    }

    pub fn theta(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn phi(&self, j: usize) -> f64 {
        j as f64 * self.step
    }

    pub fn rows(&self) -> usize {
        self.n_theta + 1
    }
}

fn grid_values(obj: &QubitObjective, grid: &AngleGrid, parallel: bool) -> Vec<Vec<f64>> {
    let row = |i: usize| -> Vec<f64> {
        let theta = grid.theta(i);
        (0..grid.n_phi).map(|j| obj.eval(theta, grid.phi(j))).collect()
    };
    if parallel {
        (0..grid.rows()).into_par_iter().map(row).collect()
    } else {
        (0..grid.rows()).map(row).collect()
    }
}

/// Grid points that are no worse than their eight neighbours, sorted by
/// value, then θ index, then φ index.
fn grid_minima(values: &[Vec<f64>], grid: &AngleGrid) -> Vec<(f64, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..grid.rows() {
        for j in 0..grid.n_phi {
            let v = values[i][j];
            let mut is_min = true;
            'nb: for di in [-1i64, 0, 1] {
                let ii = i as i64 + di;
                if ii < 0 || ii as usize >= grid.rows() {
                    continue;
                }
                for dj in [-1i64, 0, 1] {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let jj = (j as i64 + dj).rem_euclid(grid.n_phi as i64) as usize;
                    if values[ii as usize][jj] < v {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                out.push((v, i, j));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    out
}

/// One-sided discord D2 with the default search settings.
pub fn d2_side(rho: &DensityMatrix, side: Side) -> Result<SideDiscord> {
    d2_side_with(rho, side, &DiscordOptions::default())
}

pub fn d2_side_with(rho: &DensityMatrix, side: Side, opts: &DiscordOptions) -> Result<SideDiscord> {
    let obj = QubitObjective::new(rho, side)?;
    let grid = AngleGrid::new(opts.grid_deg)?;
    let values = grid_values(&obj, &grid, opts.parallel);
    let minima = grid_minima(&values, &grid);
    let (grid_value, gi, gj) = minima[0];

    let mut best = (grid_value, grid.theta(gi), grid.phi(gj));
    let simplex_opts = simplex::SimplexOptions {
        initial_step: grid.step / 2.0,
        ..opts.simplex
    };
    for &(_, i, j) in minima.iter().take(opts.refine_starts.max(1)) {
        let r = simplex::minimize(|x| obj.eval(x[0], x[1]), [grid.theta(i), grid.phi(j)], &simplex_opts);
        if r.f < best.0 {
            best = (r.f, r.x[0], r.x[1]);
        }
    }
    let (raw_value, theta, phi) = best;
    if !raw_value.is_finite() {
        return Err(Error::Numerical("discord objective is not finite".into()));
    }
    if raw_value < -NEGATIVITY_TOL {
        return Err(Error::Numerical(format!("discord minimum {raw_value:.3e} is negative")));
    }
    Ok(SideDiscord {
        value: raw_value.max(0.0),
        raw_value,
        argmin: ProjectiveMeasurement::bloch(side, theta, phi),
        grid_value,
    })
}

#[derive(Debug, Clone)]
pub struct SymmetricDiscord {
    pub value: f64,
    pub side_a: SideDiscord,
    pub side_b: SideDiscord,
}

/// min(D2^A, D2^B)
pub fn d2_sym(rho: &DensityMatrix) -> Result<SymmetricDiscord> {
    d2_sym_with(rho, &DiscordOptions::default())
}

pub fn d2_sym_with(rho: &DensityMatrix, opts: &DiscordOptions) -> Result<SymmetricDiscord> {
    let side_a = d2_side_with(rho, Side::A, opts)?;
    let side_b = d2_side_with(rho, Side::B, opts)?;
    Ok(SymmetricDiscord {
        value: side_a.value.min(side_b.value),
        side_a,
        side_b,
    })
}

const FAST_PATH_GAP: f64 = 1e-8;
const FAST_PATH_BLOCK_TOL: f64 = 1e-9;

/// Structural test for Σ_a p_a Π^a ⊗ ρ^a: when the measured marginal has a
/// non-degenerate spectrum, the state has zero one-sided discord iff it is
/// block diagonal in that eigenbasis.
pub fn classical_on_side(rho: &DensityMatrix, side: Side) -> Option<bool> {
    let work = measured_first(rho, side);
    let marginal = partial_trace(&work, Side::A);
    let eig = eig_hermitian(marginal.matrix()).ok()?;
    if eig.eigenvalues.windows(2).any(|w| w[1] - w[0] <= FAST_PATH_GAP) {
        return None;
    }
    let d = work.dim_a();
    for a in 0..d {
        for b in 0..d {
            if a == b {
                continue;
            }
            let (u, v) = (&eig.eigenvectors[a], &eig.eigenvectors[b]);
            // ⟨u|ρ|v⟩_A
            let (db, m) = (work.dim_b(), work.matrix());
            for r in 0..db {
                for c in 0..db {
                    let mut acc = ZERO;
                    for i in 0..d {
                        for j in 0..d {
                            acc += u[i].conj() * v[j] * m[(i * db + r, j * db + c)];
                        }
                    }
                    if acc.norm() > FAST_PATH_BLOCK_TOL {
                        return Some(false);
                    }
                }
            }
        }
    }
    Some(true)
}

/// True iff the one-sided discord is below `tol` (bits).
pub fn is_zero_discord(rho: &DensityMatrix, side: Side, tol: f64) -> Result<bool> {
    is_zero_discord_with(rho, side, tol, &DiscordOptions::default())
}

pub fn is_zero_discord_with(rho: &DensityMatrix, side: Side, tol: f64, opts: &DiscordOptions) -> Result<bool> {
    if classical_on_side(rho, side) == Some(true) {
        return Ok(true);
    }
    Ok(d2_side_with(rho, side, opts)?.value < tol)
}

/// Builds Σ_a p_a |e_a⟩⟨e_a| ⊗ ρ_a for the given orthonormal basis of A.
pub fn zero_discord_state(
    probabilities: &[f64],
    basis: &[Ket],
    partner_states: &[DensityMatrix],
) -> Result<DensityMatrix> {
    if probabilities.len() != basis.len() || basis.len() != partner_states.len() {
        return Err(Error::InvalidArgument("mismatched zero-discord ingredients".into()));
    }
    let da = basis[0].dim();
    let db = partner_states[0].dim();
    let mut acc = ComplexMatrix::zeros(da * db);
    for ((p, e), s) in probabilities.iter().zip(basis).zip(partner_states) {
        acc = &acc + &qmat::tensor_product(&e.projector(), s.matrix()).scale_real(*p);
    }
    DensityMatrix::new(acc, da, db)
}
