//! Library behind the `nep` binary: configuration, report assembly, the
//! subcommand implementations and the built-in verification suite.

pub mod config;
pub mod oracles;
pub mod report;
pub mod run;
pub mod verify;

/// Error carrying the process exit code.
///
/// Exit codes: 1 config parse/validation (including unreadable or malformed
/// matrix files), 2 solver failure (node on pole, rank overflow after one
/// automatic probe doubling, no convergence, no eigenvalue), 3 correction
/// denominator condition failure, 4 verification failures.
#[derive(Debug, Clone)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    pub fn from_core(err: nep_core::Error) -> Self {
        let code = match err {
            nep_core::Error::DenominatorNearSingular(_) => 3,
            _ => 2,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}
