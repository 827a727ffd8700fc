use std::fmt;
use std::process::ExitCode;

/// Bad flags, unreadable config, unwritable output.
pub const EXIT_USAGE: u8 = 1;
/// Cutoff not converged, or a validation check failed.
pub const EXIT_NUMERICAL: u8 = 2;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<nlrabi::Error> for Failure {
    fn from(e: nlrabi::Error) -> Self {
        use nlrabi::Error::*;
        match e {
            NotConverged { .. } | TailPopulation { .. } | Eigensolver(_) | RootNotBracketed { .. } => {
                Self::numerical(e.to_string())
            }
            _ => Self::usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::usage(format!("i/o error: {e}"))
    }
}
