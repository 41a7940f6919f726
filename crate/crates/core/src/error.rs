use thiserror::Error;

/// Errors raised by the simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("eigensolver did not converge after {iterations} matvecs (worst residual {worst_residual:.3e}, tol {tol:.1e})")]
    NoConvergence {
        iterations: usize,
        worst_residual: f64,
        tol: f64,
        residuals: Vec<f64>,
    },

    #[error("non-finite derivative at t = {t}")]
    NonFinite { t: f64 },

    #[error("{quantity} drifted by {drift:.3e} at t = {t} (limit {limit:.1e}); reduce the step")]
    Drift {
        quantity: &'static str,
        t: f64,
        drift: f64,
        limit: f64,
    },

    #[error("dense oracle too large: Liouville dimension {dim} exceeds {limit}")]
    TooLarge { dim: usize, limit: usize },

    /// `origin` is `line N` for config files or `--flag` for overrides.
    #[error("config {origin}: {msg}")]
    Config { origin: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
