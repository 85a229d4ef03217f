use rand::Rng;

use crate::error::{Error, Result};
use crate::qmat::{self, ComplexMatrix, C64};
use crate::qstate::random::random_unitary;
use crate::qstate::{DensityMatrix, Side};

pub const TRACE_PRESERVING_TOL: f64 = 1e-9;
pub const UNITARY_TOL: f64 = 1e-10;

/// Completely positive trace-preserving map given by Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    kraus: Vec<ComplexMatrix>,
}

impl QuantumChannel {
    /// Requires a non-empty list of equal-sized operators with Σ K†K = 𝟙 (1e-9).
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("channel needs at least one Kraus operator".into()))?;
        let d = first.dim();
        if let Some(k) = kraus.iter().find(|k| k.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: k.dim(),
            });
        }
        let deviation = sum_products(&kraus, true).max_abs_diff(&ComplexMatrix::identity(d));
        if deviation > TRACE_PRESERVING_TOL {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(Self { kraus })
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        u.ensure_unitary(UNITARY_TOL)?;
        Ok(Self { kraus: vec![u] })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// ρ ↦ 𝟙/d, via the d² Kraus operators |i⟩⟨j|/√d.
    pub fn fully_depolarizing(dim: usize) -> Self {
        let scale = 1.0 / (dim as f64).sqrt();
        let kraus = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| {
                ComplexMatrix::from_fn(dim, |r, c| {
                    if r == i && c == j {
                        C64::new(scale, 0.0)
                    } else {
                        qmat::ZERO
                    }
                })
            })
            .collect();
        Self { kraus }
    }

    /// Single-qubit dephasing {√(1−p) 𝟙, √p σ_z}.
    pub fn dephasing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "dephasing probability {p} outside [0, 1]"
            )));
        }
        Self::new(vec![
            ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
            qmat::pauli_z().scale_real(p.sqrt()),
        ])
    }

    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidArgument(format!("damping {gamma} outside [0, 1]")));
        }
        Self::new(vec![
            ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()]),
            ComplexMatrix::from_real(2, &[0.0, gamma.sqrt(), 0.0, 0.0]),
        ])
    }

    /// Embeds a local channel as K ⊗ 𝟙 (side A) or 𝟙 ⊗ K (side B).
    pub fn local(&self, side: Side, other_dim: usize) -> Self {
        let id = ComplexMatrix::identity(other_dim);
        let kraus = self
            .kraus
            .iter()
            .map(|k| match side {
                Side::A => qmat::tensor_product(k, &id),
                Side::B => qmat::tensor_product(&id, k),
            })
            .collect();
        Self { kraus }
    }

    /// Runs `self` first, then `next`.
    pub fn then(&self, next: &QuantumChannel) -> Result<Self> {
        if self.dim() != next.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: next.dim(),
            });
        }
        let kraus = next
            .kraus
            .iter()
            .flat_map(|l| self.kraus.iter().map(move |k| l * k))
            .collect();
        Ok(Self { kraus })
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    /// Σ K ρ K† on a bare matrix.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.kraus
            .iter()
            .fold(ComplexMatrix::zeros(m.dim()), |acc, k| &acc + &m.conjugate_by(k))
    }
}

fn sum_products(kraus: &[ComplexMatrix], adjoint_first: bool) -> ComplexMatrix {
    let d = kraus[0].dim();
    kraus.iter().fold(ComplexMatrix::zeros(d), |acc, k| {
        let term = if adjoint_first {
            &k.dagger() * k
        } else {
            k * &k.dagger()
        };
        &acc + &term
    })
}

/// G(ρ) = Σ_k K_k ρ K_k†, revalidated as a state.
pub fn channel_apply(rho: &DensityMatrix, g: &QuantumChannel) -> Result<DensityMatrix> {
    if g.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: g.dim(),
        });
    }
    DensityMatrix::new(g.apply_matrix(rho.matrix()), rho.dim_a(), rho.dim_b())
}

/// U ρ U†
pub fn apply_unitary(rho: &DensityMatrix, u: &ComplexMatrix) -> Result<DensityMatrix> {
    if u.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: u.dim(),
        });
    }
    u.ensure_unitary(UNITARY_TOL)?;
    DensityMatrix::new(rho.matrix().conjugate_by(u), rho.dim_a(), rho.dim_b())
}

/// The adjoint map ρ ↦ Σ_k K_k† ρ K_k. Unital for trace-preserving G, but not
/// trace preserving in general.
#[derive(Debug, Clone, PartialEq)]
pub struct DualMap {
    kraus: Vec<ComplexMatrix>,
}

impl DualMap {
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.kraus
            .iter()
            .fold(ComplexMatrix::zeros(m.dim()), |acc, k| &acc + &(&(&k.dagger() * m) * k))
    }

    /// Applies the map to a state and rescales the image to unit trace.
    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if self.kraus[0].dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                got: self.kraus[0].dim(),
            });
        }
        DensityMatrix::normalized(self.apply_matrix(rho.matrix()), rho.dim_a(), rho.dim_b())
    }
}

pub fn dual_map(g: &QuantumChannel) -> DualMap {
    DualMap { kraus: g.kraus.clone() }
}

pub const PROPERTY1_TOL: f64 = 1e-8;
pub const PURITY_TOL: f64 = 1e-9;

/// True iff G⁺(G(ρ)) = ρ entrywise (1e-8) for every supplied pure input.
pub fn check_property1(g: &QuantumChannel, pure_inputs: &[DensityMatrix]) -> Result<bool> {
    let dual = dual_map(g);
    let mut holds = true;
    for (index, rho) in pure_inputs.iter().enumerate() {
        if !rho.is_pure(PURITY_TOL) {
            return Err(Error::NotPure {
                index,
                purity: rho.purity(),
            });
        }
        if rho.dim() != g.dim() {
            return Err(Error::DimensionMismatch {
                expected: g.dim(),
                got: rho.dim(),
            });
        }
        let back = dual.apply_matrix(&g.apply_matrix(rho.matrix()));
        if back.max_abs_diff(rho.matrix()) > PROPERTY1_TOL {
            holds = false;
        }
    }
    Ok(holds)
}

/// Σ K K† = 𝟙 within 1e-9.
pub fn is_unital(g: &QuantumChannel) -> bool {
    sum_products(&g.kraus, false).max_abs_diff(&ComplexMatrix::identity(g.dim())) <= TRACE_PRESERVING_TOL
}

/// Controlled-NOT with A as control, basis order |00⟩, |01⟩, |10⟩, |11⟩.
pub fn cnot() -> ComplexMatrix {
    ComplexMatrix::from_real(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
}

/// Channel from a random Stinespring isometry with `n_kraus` outputs.
pub fn random_channel(rng: &mut impl Rng, dim: usize, n_kraus: usize) -> QuantumChannel {
    let big = random_unitary(rng, dim * n_kraus);
    let kraus = (0..n_kraus)
        .map(|k| ComplexMatrix::from_fn(dim, |r, c| big[(k * dim + r, c)]))
        .collect();
    QuantumChannel::new(kraus).expect("isometry blocks are trace preserving")
}

/// Random mixture of unitaries Σ p_k U·U†; always unital.
pub fn random_mixed_unitary_channel(rng: &mut impl Rng, dim: usize, n: usize) -> QuantumChannel {
    let p = crate::qstate::random::random_distribution(rng, n);
    let kraus = p
        .iter()
        .map(|pk| random_unitary(rng, dim).scale_real(pk.sqrt()))
        .collect();
    QuantumChannel::new(kraus).expect("mixed-unitary channel is trace preserving")
}
