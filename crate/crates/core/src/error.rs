use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical overflow: {0}")]
    Overflow(String),

    #[error("degenerate modes: {0}")]
    DegenerateModes(String),

    #[error("argument-principle count {expected} differs from found roots {found} on |z| = {radius}")]
    ContourMiss {
        expected: i64,
        found: usize,
        radius: f64,
    },

    #[error("evaluation point coincides with a pole at {0}")]
    PoleHit(String),

    #[error("accuracy loss: {0}")]
    AccuracyLoss(String),

    #[error("time argument at a caustic: {0}")]
    Caustic(String),

    #[error("Fresnel integral not convergent: {0}")]
    NotIntegrable(String),

    #[error("linear solver did not converge after {iterations} iterations (residual {residual:e})")]
    SolverDivergence { iterations: usize, residual: f64 },

    #[error("integrator failure: {0}")]
    Integrator(String),
}

impl Error {
    /// True for failures that mean the requested configuration sits on an
    /// excluded (degenerate) parameter set rather than a numerical problem.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::DegenerateModes(_) | Error::Caustic(_) | Error::PoleHit(_))
    }

    /// True for failures of a numerical accuracy or convergence guarantee.
    pub fn is_accuracy(&self) -> bool {
        matches!(
            self,
            Error::AccuracyLoss(_)
                | Error::ContourMiss { .. }
                | Error::SolverDivergence { .. }
                | Error::Integrator(_)
                | Error::Overflow(_)
                | Error::NotIntegrable(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
