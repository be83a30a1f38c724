use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("excluded mode: {0}")]
    ExcludedMode(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("capacity exceeded: dimension {dimension} > cap {cap}")]
    Capacity { dimension: usize, cap: usize },
    #[error("inversion out of range: {0}")]
    Inversion(String),
    #[error("calibration failed: {message}")]
    Calibration { message: String, orphans: Vec<f64> },
    #[error("pipeline error: {0}")]
    Pipeline(String),
    #[error("deconvolution ill-posed: {0}")]
    IllPosed(String),
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("estimation failed: {0}")]
    Estimation(String),
}

impl Error {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::ExcludedMode(_) => "excluded_mode",
            Error::Contract(_) => "contract",
            Error::Capacity { .. } => "capacity",
            Error::Inversion(_) => "inversion",
            Error::Calibration { .. } => "calibration",
            Error::Pipeline(_) => "pipeline",
            Error::IllPosed(_) => "ill_posed",
            Error::Integration(_) => "integration",
            Error::Estimation(_) => "estimation",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
