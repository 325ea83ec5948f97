use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid circuit parameter {name} = {value}: {reason}")]
    InvalidCircuit {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state index {index} out of range ({available} states available)")]
    IndexOutOfRange { index: usize, available: usize },

    #[error("eigendecomposition of a {dim}x{dim} matrix did not converge")]
    EigenNoConvergence { dim: usize },

    #[error("fit diverged: {0}")]
    FitDivergence(String),

    #[error("ground/excited flux scales disagree: {ground} vs {excited} (relative difference {rel_diff:.3e})")]
    InconsistentFluxScale {
        ground: f64,
        excited: f64,
        rel_diff: f64,
    },
}
