use std::fmt;

/// Failure classes, each with its own exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Validation(String),
    /// Budget or aliasing limits.
    Budget(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Budget(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    /// Core errors, prefixed with the config field they came from.
    pub fn from_core(e: seqent_core::Error, field: &str) -> Self {
        let msg = format!("{field}: {e}");
        if e.is_budget() {
            CliError::Budget(msg)
        } else {
            CliError::Validation(msg)
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid config: {m}"),
            CliError::Budget(m) => write!(f, "budget: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
