use thiserror::Error;
use zitter::ZbError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical convergence failure: {0}")]
    Convergence(String),
    #[error("oracle mismatch: max deviation {deviation:.3e} L exceeds {tolerance:.3e} L")]
    OracleMismatch { deviation: f64, tolerance: f64 },
    #[error("numerical error: {0}")]
    Numerical(ZbError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::OracleMismatch { .. } => 4,
            CliError::Numerical(_) | CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<ZbError> for CliError {
    fn from(e: ZbError) -> Self {
        match e {
            ZbError::Convergence(msg) => CliError::Convergence(msg),
            ZbError::Truncation { .. } => CliError::Convergence(e.to_string()),
            ZbError::Constraint(msg) => CliError::Config(msg),
            other => CliError::Numerical(other),
        }
    }
}
