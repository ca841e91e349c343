use nondiv_core::PushoutError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const INVALID_INPUT: i32 = 2;
    pub const BUDGET_EXCEEDED: i32 = 3;
    pub const MAX_STEPS: i32 = 4;
    pub const INCOMPLETE: i32 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A file failed to parse or validate. `location` is `line L, column C` or
    /// a field path such as `blocks[1]`.
    #[error("{file}: {location}: {message}")]
    Input { file: String, location: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Pushout(#[from] PushoutError),
}

impl CliError {
    pub fn input(file: &str, location: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Input { file: file.to_string(), location: location.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } | CliError::Usage(_) => exit::INVALID_INPUT,
            CliError::Io { .. } | CliError::Pushout(_) => exit::FAILURE,
        }
    }
}
