//! Bipartite density matrices and kets.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::qmat::{self, eigenvalues_hermitian, vdot, ComplexMatrix, C64, I, ONE, ZERO};

pub mod random;

pub const STATE_TOL: f64 = 1e-10;
pub const KET_NORM_TOL: f64 = 1e-12;
/// Eigenvalues at or below this contribute nothing to an entropy.
pub const ENTROPY_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// A validated state on a dimA ⊗ dimB space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all to 1e-10).
    pub fn new(mat: ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::UnsupportedDimension(
                "subsystem dimensions must be positive".into(),
            ));
        }
        if dim_a * dim_b != mat.dim() {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_b,
                got: mat.dim(),
            });
        }
        let asymmetry = mat.hermitian_deviation();
        if asymmetry > STATE_TOL {
            return Err(Error::NotHermitian { asymmetry });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {:.12} (expected 1)", tr.re)));
        }
        let eig = eigenvalues_hermitian(&mat)?;
        if eig[0] < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "smallest eigenvalue {:.3e} is negative",
                eig[0]
            )));
        }
        Ok(Self {
            mat: mat.hermitian_part(),
            dim_a,
            dim_b,
        })
    }

    /// Like [`DensityMatrix::new`] but first rescales to unit trace.
    pub fn normalized(mat: ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        let tr = mat.trace().re;
        if tr.abs() < 1e-300 {
            return Err(Error::InvalidState("zero trace".into()));
        }
        Self::new(mat.scale_real(1.0 / tr), dim_a, dim_b)
    }

    /// Single-system state (dimB = 1).
    pub fn single(mat: ComplexMatrix) -> Result<Self> {
        let d = mat.dim();
        Self::new(mat, d, 1)
    }

    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Self {
        let d = dim_a * dim_b;
        Self {
            mat: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
            dim_a,
            dim_b,
        }
    }

    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Self {
        Self {
            mat: qmat::tensor_product(&a.mat, &b.mat),
            dim_a: a.dim(),
            dim_b: b.dim(),
        }
    }

    /// Convex combination Σ w_i ρ_i; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?
            .1;
        let mut acc = ComplexMatrix::zeros(first.dim());
        for (w, rho) in parts {
            if rho.dims() != first.dims() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    got: rho.dim(),
                });
            }
            if *w < 0.0 {
                return Err(Error::InvalidArgument(format!("negative mixture weight {w}")));
            }
            acc = &acc + &rho.mat.scale_real(*w);
        }
        Self::new(acc, first.dim_a, first.dim_b)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn side_dim(&self, side: Side) -> usize {
        match side {
            Side::A => self.dim_a,
            Side::B => self.dim_b,
        }
    }

    /// tr ρ²
    pub fn purity(&self) -> f64 {
        self.mat.data().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues_hermitian(&self.mat).expect("density matrix is Hermitian by construction")
    }

    /// Same matrix, subsystems exchanged: ρ on B ⊗ A.
    pub fn swapped(&self) -> Self {
        let (da, db) = (self.dim_a, self.dim_b);
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d);
        for r in 0..d {
            for c in 0..d {
                let (ra, rb) = (r / db, r % db);
                let (ca, cb) = (c / db, c % db);
                out[(rb * da + ra, cb * da + ca)] = self.mat[(r, c)];
            }
        }
        Self {
            mat: out,
            dim_a: db,
            dim_b: da,
        }
    }

    /// Block ⟨i|ρ|j⟩_A as an operator on B.
    pub fn a_block(&self, i: usize, j: usize) -> ComplexMatrix {
        let db = self.dim_b;
        ComplexMatrix::from_fn(db, |r, c| self.mat[(i * db + r, j * db + c)])
    }

    /// ρ ↦ (U ⊗ V) ρ (U ⊗ V)†.
    pub fn local_conjugate(&self, u_a: &ComplexMatrix, u_b: &ComplexMatrix) -> Result<Self> {
        if u_a.dim() != self.dim_a || u_b.dim() != self.dim_b {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u_a.dim() * u_b.dim(),
            });
        }
        let u = qmat::tensor_product(u_a, u_b);
        Self::new(self.mat.conjugate_by(&u), self.dim_a, self.dim_b)
    }

    pub(crate) fn from_parts_unchecked(mat: ComplexMatrix, dim_a: usize, dim_b: usize) -> Self {
        Self { mat, dim_a, dim_b }
    }
}

/// A unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vec<C64>,
}

impl Ket {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::UnsupportedDimension("empty ket".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let n = qmat::norm(&amplitudes);
        if (n - 1.0).abs() > KET_NORM_TOL {
            return Err(Error::InvalidState(format!("ket norm is {n:.15} (expected 1)")));
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n = qmat::norm(&amplitudes);
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("ket has zero or non-finite norm".into()));
        }
        Self::new(amplitudes.into_iter().map(|z| z / n).collect())
    }

    /// Computational basis vector |index⟩ in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        Ket {
            amplitudes: qmat::tensor_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    /// U|ψ⟩ (U is assumed unitary; the result is renormalized against drift).
    pub fn apply(&self, u: &ComplexMatrix) -> Result<Ket> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.dim(),
            });
        }
        Ket::normalized(u.mul_vec(&self.amplitudes))
    }

    /// Global phase fixed so the first nonzero amplitude is real positive.
    pub fn canonical(&self) -> Ket {
        let lead = self
            .amplitudes
            .iter()
            .find(|z| z.norm() > KET_NORM_TOL)
            .copied()
            .unwrap_or(ONE);
        let phase = lead.conj() / lead.norm();
        Ket {
            amplitudes: self.amplitudes.iter().map(|z| z * phase).collect(),
        }
    }

    /// |⟨self|other⟩|², equal to 1 iff the states agree up to global phase.
    pub fn fidelity(&self, other: &Ket) -> f64 {
        vdot(&self.amplitudes, &other.amplitudes).norm_sqr()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }
}

pub fn density_from_ket(psi: &Ket, dim_a: usize, dim_b: usize) -> Result<DensityMatrix> {
    if dim_a * dim_b != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: dim_a * dim_b,
            got: psi.dim(),
        });
    }
    DensityMatrix::new(psi.projector(), dim_a, dim_b)
}

/// Reduced state of the kept side, returned as a single-system state.
pub fn partial_trace(rho: &DensityMatrix, keep: Side) -> DensityMatrix {
    let (da, db) = rho.dims();
    let m = rho.matrix();
    let out = match keep {
        Side::A => ComplexMatrix::from_fn(da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()),
        Side::B => ComplexMatrix::from_fn(db, |i, j| (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()),
    };
    let d = out.dim();
    DensityMatrix::from_parts_unchecked(out.hermitian_part(), d, 1)
}

/// Shannon entropy in bits. Negative entries down to -1e-12 are clamped and
/// the vector is renormalized.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    let clamped: Vec<f64> = p.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    clamped
        .iter()
        .map(|&x| x / total)
        .filter(|&x| x > ENTROPY_CLAMP)
        .map(|x| -x * x.log2())
        .sum()
}

/// −Σ λ log₂ λ over the given (unnormalized) eigenvalues, ignoring λ ≤ 1e-12.
#[inline]
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&x| x > ENTROPY_CLAMP)
        .map(|&x| -x * x.log2())
        .sum()
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues()).max(0.0)
}

/// S(ρ_A) + S(ρ_B) − S(ρ_AB), in bits.
pub fn quantum_mutual_information(rho: &DensityMatrix) -> f64 {
    von_neumann_entropy(&partial_trace(rho, Side::A)) + von_neumann_entropy(&partial_trace(rho, Side::B))
        - von_neumann_entropy(rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

/// Eigenket of σ_axis with eigenvalue ±1, first nonzero amplitude real positive.
pub fn pauli_eigenstate(axis: PauliAxis, sign: Sign) -> Ket {
    let h = FRAC_1_SQRT_2;
    let s = match sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    };
    let amplitudes = match (axis, sign) {
        (PauliAxis::Z, Sign::Plus) => vec![ONE, ZERO],
        (PauliAxis::Z, Sign::Minus) => vec![ZERO, ONE],
        (PauliAxis::X, _) => vec![C64::new(h, 0.0), C64::new(s * h, 0.0)],
        (PauliAxis::Y, _) => vec![C64::new(h, 0.0), I * (s * h)],
    };
    Ket { amplitudes }
}

/// ⟨φ|ψ⟩
pub fn overlap(phi: &Ket, psi: &Ket) -> Result<C64> {
    if phi.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            got: psi.dim(),
        });
    }
    Ok(vdot(&phi.amplitudes, &psi.amplitudes))
}

/// Partial transpose over B.
pub fn partial_transpose(rho: &DensityMatrix) -> ComplexMatrix {
    let (_, db) = rho.dims();
    let m = rho.matrix();
    ComplexMatrix::from_fn(rho.dim(), |r, c| {
        let (ra, rb) = (r / db, r % db);
        let (ca, cb) = (c / db, c % db);
        m[(ra * db + cb, ca * db + rb)]
    })
}

/// Positive-partial-transpose test, conclusive for total dimension up to 6.
pub fn is_ppt_separable(rho: &DensityMatrix) -> Result<bool> {
    let (da, db) = rho.dims();
    if da * db > 6 {
        return Err(Error::NotConclusive { dim_a: da, dim_b: db });
    }
    let spectrum = eigenvalues_hermitian(&partial_transpose(rho))?;
    Ok(spectrum[0] >= -STATE_TOL)
}

/// ½ Σ |λ_i(ρ − σ)|
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let diff = rho.matrix() - sigma.matrix();
    Ok(0.5 * eigenvalues_hermitian(&diff)?.iter().map(|x| x.abs()).sum::<f64>())
}

/// Singular values of the dimA×dimB amplitude matrix, descending.
pub fn schmidt_coefficients(psi: &Ket, dim_a: usize, dim_b: usize) -> Result<Vec<f64>> {
    if dim_a * dim_b != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: dim_a * dim_b,
            got: psi.dim(),
        });
    }
    Ok(qmat::singular_values(dim_a, dim_b, psi.amplitudes()))
}

/// Splits a product ket into its local factors with ψ = a ⊗ b exactly up to
/// rounding. The phase split between the factors is arbitrary but consistent.
pub fn product_factors(psi: &Ket, dim_a: usize, dim_b: usize, tol: f64) -> Result<Option<(Ket, Ket)>> {
    let sv = schmidt_coefficients(psi, dim_a, dim_b)?;
    if sv.len() > 1 && sv[1] >= tol {
        return Ok(None);
    }
    let amp = psi.amplitudes();
    let (mut best, mut best_mag) = (0, -1.0);
    for (k, z) in amp.iter().enumerate() {
        if z.norm() > best_mag {
            best = k;
            best_mag = z.norm();
        }
    }
    let (i0, j0) = (best / dim_b, best % dim_b);
    let col: Vec<C64> = (0..dim_a).map(|i| amp[i * dim_b + j0]).collect();
    let a = Ket::normalized(col)?;
    let pivot = a.amplitudes()[i0];
    let b_amps: Vec<C64> = (0..dim_b).map(|j| amp[i0 * dim_b + j] / pivot).collect();
    let b = Ket::normalized(b_amps)?;
    Ok(Some((a, b)))
}
