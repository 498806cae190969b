use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Library(#[from] fracleg::Error),

    #[error("could not write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("{failed} of {total} checks failed")]
    Verification { failed: usize, total: usize },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use fracleg::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            // parameters outside the stated hypotheses are the caller's to fix
            CliError::Library(
                E::Domain(_)
                | E::BoundNotStated(_)
                | E::HypothesisViolated(_)
                | E::InsufficientRegularity(_)
                | E::BelowThreshold { .. },
            ) => EXIT_USAGE,
            CliError::Library(_) | CliError::Write { .. } | CliError::Json(_) => EXIT_NUMERICAL,
            CliError::Verification { .. } => EXIT_VERIFICATION,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        assert_eq!(usage("x").exit_code(), EXIT_USAGE);
        assert_eq!(CliError::from(fracleg::Error::BoundNotStated("mu".into())).exit_code(), EXIT_USAGE);
        assert_eq!(CliError::from(fracleg::Error::NonConvergent("tail".into())).exit_code(), EXIT_NUMERICAL);
        assert_eq!(CliError::Verification { failed: 1, total: 2 }.exit_code(), EXIT_VERIFICATION);
    }
}
