use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature failed to converge at t = {t}: estimated error {abs_error:e} after {intervals} intervals")]
    Quadrature {
        t: f64,
        abs_error: f64,
        intervals: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// The time step does not resolve the kernel decay scale `1/sigma`.
    #[error("under-resolved kernel: step {step} >= 1/sigma = {limit}")]
    UnderResolved { step: f64, limit: f64 },

    #[error("t = {t} is outside the computed horizon [0, {horizon}]")]
    Range { t: f64, horizon: f64 },

    #[error("root bracket failure for sigma = {sigma}: L({lo}) - 1 = {f_lo:e}, L({hi}) - 1 = {f_hi:e}")]
    Bracket {
        sigma: f64,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("insufficient statistics: {0}")]
    Statistics(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
