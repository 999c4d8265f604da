use thiserror::Error;

/// Errors produced anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("capability error: {0}")]
    Capability(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("not finite type up to a_max = {0}")]
    NotFiniteType(u32),
    #[error("not in monomial normal form: {0}")]
    NotNormalForm(String),
    #[error("stationary solve failed: {0}")]
    Stationary(String),
    #[error("degenerate curvature matrix: {0}")]
    Degenerate(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("frame construction failed: {0}")]
    Frame(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("resolution too coarse: {0}")]
    Resolution(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Argument(_) | Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
