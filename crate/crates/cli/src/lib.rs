//! Batch front-end over the numerics core: experiment configs, deterministic
//! Monte Carlo runs, CSV/JSON artifacts with a replayable manifest, and the
//! acceptance checks behind `selftest`.

pub mod artifacts;
pub mod checks;
pub mod config;
pub mod manifest;
pub mod parallel;
pub mod runner;

/// Failure split by exit code: flag and config problems exit 1, numerical
/// failures (non-convergence, broken artifacts) exit 2.
#[derive(Clone, Debug)]
pub enum CliError {
    Precondition(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Precondition(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Precondition(m) | CliError::Numerical(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}
