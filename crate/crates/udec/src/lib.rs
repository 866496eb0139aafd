//! File formats, parallel Monte-Carlo and experiment runners on top of
//! `udec-core`.

pub mod experiment;
pub mod format;
pub mod output;
pub mod parallel;

/// Package version plus `git describe` output when built from a checkout.
pub const VERSION: &str = env!("UDEC_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),

    #[error("cannot parse {0}: {1}")]
    Parse(String, String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("validation failed: {0}")]
    Core(#[from] udec_core::Error),

    #[error("{0} bound violation(s)")]
    BoundViolation(usize),
}

impl Error {
    /// Process exit status: 3 for bound violations, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BoundViolation(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
