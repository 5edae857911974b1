use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input data, such as duplicate marks or an empty ensemble.
    #[error("invalid input: {0}")]
    Input(String),

    /// Inconsistent simulation or run configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A numerical routine did not reach the requested tolerance.
    #[error("{what}: requested tolerance {requested:e} not met (achieved {achieved:e})")]
    Tolerance {
        what: String,
        requested: f64,
        achieved: f64,
    },

    /// The requested method does not apply to this process.
    #[error("unsupported method: {0}")]
    Unsupported(String),

    /// Simulation could not proceed, e.g. a vanishing acceptance rate.
    #[error("simulation aborted: {0}")]
    Simulation(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Errors caused by bad parameters rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Input(_) | Error::Config(_) | Error::Unsupported(_)
        )
    }
}
