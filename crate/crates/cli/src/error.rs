use std::fmt;
use std::path::Path;

/// CLI failure classes, one per exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: parse failures, invariant violations, hypothesis
    /// violations. Exit code 2.
    Validation(String),
    /// A numerical routine did not converge. Exit code 3.
    NonConvergence(String),
    /// Filesystem trouble. Exit code 4.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "validation error: {msg}"),
            CliError::NonConvergence(msg) => write!(f, "numerical error: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl From<commuter_sir::Error> for CliError {
    fn from(err: commuter_sir::Error) -> Self {
        use commuter_sir::Error::*;
        match err {
            InvalidParameter(_) | InvalidState(_) | HypothesisViolated(_) => {
                CliError::Validation(err.to_string())
            }
            NonConvergence(_) | Consistency(_) => CliError::NonConvergence(err.to_string()),
        }
    }
}
