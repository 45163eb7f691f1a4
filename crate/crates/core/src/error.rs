use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported range: {0}")]
    UnsupportedRange(String),

    /// The correlation length diverges at the critical field.
    #[error("correlation length diverges at the critical point g = 1")]
    Divergence,

    #[error("integration failed at t = {t:.6e} (step {step:.3e}){}", mode_suffix(*.k))]
    IntegrationFailure { t: f64, step: f64, k: Option<f64> },
}

fn mode_suffix(k: Option<f64>) -> String {
    match k {
        Some(k) => format!(" for mode k = {k:.12}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Attach the offending quasi-momentum to an integration failure.
    pub fn with_mode(self, k: f64) -> Self {
        match self {
            Error::IntegrationFailure { t, step, .. } => Error::IntegrationFailure {
                t,
                step,
                k: Some(k),
            },
            other => other,
        }
    }
}
