use thiserror::Error;

use crate::gcbi::Calibration;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible model: rho = {rho} must exceed M1 = {m1}")]
    InfeasibleModel { rho: f64, m1: f64 },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("physical configuration error: {0}")]
    Physical(String),

    /// Calibration ran out of budget; the best parameters found are attached.
    #[error("calibration did not reach tolerance (Er = {:.3e})", best.error)]
    Calibration { best: Box<Calibration> },

    #[error("data error: {0}")]
    Data(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("solver did not converge after {iterations} sweeps (last update {last_error:.3e})")]
    NonConvergence {
        iterations: usize,
        last_error: f64,
        h: f64,
    },

    #[error("solver diverged at sweep {iterations}: {reason}")]
    Divergence { iterations: usize, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
