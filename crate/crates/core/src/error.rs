use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid manifold: {0}")]
    InvalidManifold(String),

    #[error("invalid extension: {0}")]
    InvalidExtension(String),

    #[error("extension {extension} is not defined on manifold {manifold}")]
    Incompatible { extension: String, manifold: String },

    #[error("set {0} is not strictly inside the manifold")]
    NotInterior(String),

    #[error("point on component {component} does not exist (manifold has {count})")]
    NoSuchComponent { component: usize, count: usize },

    #[error("{lambda} is not an eigenvalue (condition residual {residual:e})")]
    NotAnEigenvalue { lambda: f64, residual: f64 },

    #[error("lambda = {lambda} lies in the spectrum (nearest eigenvalue {nearest:?})")]
    Pole { lambda: num_complex::Complex64, nearest: Option<f64> },

    #[error("lambda = {0} lies on the continuous spectrum [0, inf)")]
    OnContinuum(num_complex::Complex64),

    #[error("root scan could not isolate a root in [{lo}, {hi}]")]
    RootNotIsolated { lo: f64, hi: f64 },

    #[error("{count} negative eigenvalues found, more than the deficiency bound {bound}")]
    NegativeBoundExceeded { count: usize, bound: usize },

    #[error("hyperbolic growth overflows f64: sqrt(-x)*|t| = {magnitude}")]
    ScalarOverflow { magnitude: f64 },

    #[error("Richardson extrapolation did not settle: estimates {estimates:?}")]
    ExtrapolationFailed { estimates: Vec<f64> },

    #[error("continuum cutoff reached k = {k_cap} with relative tail {tail:e}")]
    ContinuumCutoff { k_cap: f64, tail: f64 },

    #[error("Courant ratio {ratio} exceeds the stability limit {limit}")]
    CflViolation { ratio: f64, limit: f64 },

    #[error("states were built on different bases")]
    BasisMismatch,

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
