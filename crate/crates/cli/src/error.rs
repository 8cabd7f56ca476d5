//! Process-level failure classification.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 kernel-hypothesis violation, 4 resolution error.

use besov_core::Error as CoreError;

pub const EXIT_VERIFICATION: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_HYPOTHESIS: u8 = 3;
pub const EXIT_RESOLUTION: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { code: EXIT_CONFIG, message: message.into() }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            // the kernel (or a test function standing in for one) breaks a
            // stated hypothesis: unit mass, mean conditions, nonnegativity
            CoreError::MassNotUnit { .. }
            | CoreError::InvalidKernel(_)
            | CoreError::ZeroMeanEta { .. }
            | CoreError::NonZeroMeanPsi { .. }
            | CoreError::NegativeEntry { .. }
            | CoreError::SingularSystem => EXIT_HYPOTHESIS,
            // the requested scales outrun what the grid can resolve
            CoreError::UnderResolved { .. }
            | CoreError::GridTooCoarse { .. }
            | CoreError::MassDrift { .. }
            | CoreError::TooFewPoints { .. } => EXIT_RESOLUTION,
            _ => EXIT_CONFIG,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::config(format!("io error: {e}"))
    }
}
