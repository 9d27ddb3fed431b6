use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frequency {name} must be positive, got {value}")]
    NonPositiveFrequency { name: &'static str, value: f64 },

    #[error("{name} is not finite")]
    NonFiniteInput { name: &'static str },

    #[error("normal modes are defective at Δ = {discriminant:e}; use the matrix-exponential propagator")]
    DefectiveModes { discriminant: f64 },

    #[error("modal eigenvectors are degenerate (det V = {det_v:e})")]
    DegenerateEigenvectors { det_v: f64 },

    #[error("operation requires stable normal modes")]
    NotStable,

    #[error("need at least {required} samples in the fit window, found {found}")]
    InsufficientSamples { required: usize, found: usize },

    #[error("channel {channel} has non-positive values in the fit window")]
    NonPositiveValues { channel: String },

    #[error("matrix is not symplectic (max deviation {deviation:e})")]
    NotSymplectic { deviation: f64 },

    #[error("reduced covariance has negative determinant {det:e}")]
    NegativeDeterminant { det: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("time grid needs at least 3 samples, got {0}")]
    GridTooShort(usize),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("Fock cutoff must be at least 2, got {0}")]
    CutoffTooSmall(usize),

    #[error("eigendecomposition failed: {0}")]
    EigendecompositionFailure(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("Fock bases do not match (cutoffs {left} and {right})")]
    IncompatibleBasis { left: usize, right: usize },

    #[error("x = {x} is outside the interpolation range [{min}, {max}]")]
    OutOfRange { x: f64, min: f64, max: f64 },

    #[error("unsupported initial state: {0}")]
    UnsupportedInitialState(String),

    #[error("unknown channel {0}")]
    UnknownChannel(String),
}
