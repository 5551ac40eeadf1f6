use thiserror::Error;

/// CLI-facing errors, each mapped to a documented exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical abort: {0}")]
    Numerical(String),
    #[error("selftest failed: {0} check(s) did not pass")]
    SelftestFailed(usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2: config error, 3: numerical abort, 4: selftest failure.
    /// Environment/filesystem problems count as config-class errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::SelftestFailed(_) => 4,
        }
    }
}

impl From<mcsh_core::CoreError> for CliError {
    fn from(e: mcsh_core::CoreError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
