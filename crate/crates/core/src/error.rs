use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at `{key}`: {message}")]
    Parse { key: String, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unknown species `{name}` (available: {})", available.join(", "))]
    NotFound { name: String, available: Vec<String> },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("regime error: {0}")]
    Regime(String),

    #[error("Lamb-Dicke violation: eta = {eta:.4} (ion {}, mode {}) is not below {limit}", .ion + 1, .mode + 1)]
    LambDicke { eta: f64, ion: usize, mode: usize, limit: f64 },

    #[error("index {index} out of range for {what} of length {len}")]
    Index { what: &'static str, index: usize, len: usize },

    #[error("singular inversion: {0}")]
    Singular(String),

    #[error("infeasible: {message} (best margin {best_margin_rad_s:.6e} rad/s)")]
    Infeasible { message: String, best_margin_rad_s: f64 },

    #[error("numeric failure: {message} (residual {residual:.3e})")]
    Numeric { message: String, residual: f64 },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible { .. } | Error::Regime(_) | Error::LambDicke { .. } => 2,
            Error::Numeric { .. } | Error::Singular(_) => 3,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
