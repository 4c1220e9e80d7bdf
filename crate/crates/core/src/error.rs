use std::path::PathBuf;

/// Errors produced by the simulation engine.
///
/// Failures of the feedback control (singular gauge, vanishing determinant,
/// unreachable initial currents) are ordinary outcomes of a run and are
/// converted into a [`Termination`](crate::scenario::Termination) by the
/// scenario runner; they are only surfaced as `Err` when an operation is
/// called directly.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("pair index {index} out of range for {wells} wells")]
    IndexOutOfRange { index: usize, wells: usize },

    #[error("state became non-finite at t = {time}")]
    NonFiniteState { time: f64 },

    #[error("singular gauge: correlation C_({left_well},{right_well}) vanished")]
    SingularGauge { left_well: usize, right_well: usize },

    #[error("control breakdown: {detail}")]
    ControlBreakdown { detail: String },

    #[error(
        "determinant radicand negative ({radicand:.3e}); outside the validity of the closed form"
    )]
    ComplexBranch { radicand: f64 },

    #[error("infeasible initial currents on link {link}: required |sin| = {required:.6e} > 1")]
    InfeasibleInitialization { link: usize, required: f64 },

    #[error("reservoir strategy breakdown: correlation on link {link} vanished")]
    StrategyBreakdown { link: usize },

    #[error(
        "ground state did not converge within {iterations} iterations (residual {residual:.3e})"
    )]
    GroundStateNotConverged { iterations: usize, residual: f64 },

    #[error("zero-norm state")]
    ZeroNormState,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
