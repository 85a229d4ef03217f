use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("Kraus operators are not trace preserving (max deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("input {index} is not pure (purity {purity})")]
    NotPure { index: usize, purity: f64 },

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("separability criterion not conclusive for {dim_a}x{dim_b} systems")]
    NotConclusive { dim_a: usize, dim_b: usize },

    #[error("non-orthogonality hypothesis violated: |<psi1|psi2>| = {overlap:.3e}")]
    OrthogonalInputs { overlap: f64 },

    #[error("input {index} is not a product state (second Schmidt coefficient {schmidt:.3e})")]
    NotProduct { index: usize, schmidt: f64 },

    #[error("reset undefined for undetermined operation type")]
    UndeterminedType,

    #[error("type sampler emitted ({alice}, {bob}), which excludes the true input {input}")]
    InconsistentSampler { alice: String, bob: String, input: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}
