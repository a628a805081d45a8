use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state of {n_qubits} qubits exceeds the supported maximum of {max}")]
    Size { n_qubits: usize, max: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("state lies outside the decoherence-free subspace (residual norm {residual:.3e})")]
    Subspace { residual: f64 },

    #[error("conditioning event has zero probability ({probability:.3e})")]
    UndefinedConditional { probability: f64 },

    #[error("optimizer did not converge after {iterations} iterations (best value {best:.12})")]
    NonConvergence { iterations: usize, best: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
