use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("configuration: {0}")]
    Config(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("inconsistent: {0}")]
    Inconsistent(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("desk-scale limit: {0}")]
    DeskLimit(String),
    #[error("window insufficient: {0}")]
    Window(String),
    #[error("schema: {0}")]
    Schema(String),
}

impl Error {
    /// Stable machine-readable code used in CLI error JSON.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Config(_) => "E_CONFIG",
            Error::Domain(_) => "E_DOMAIN",
            Error::Inconsistent(_) => "E_INCONSISTENT",
            Error::Unsupported(_) => "E_UNSUPPORTED",
            Error::DeskLimit(_) => "E_DESK_LIMIT",
            Error::Window(_) => "E_WINDOW",
            Error::Schema(_) => "E_SCHEMA",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
