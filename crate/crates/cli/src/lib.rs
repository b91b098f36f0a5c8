//! Library side of the `gscore` command: argument types, the RLT artifact,
//! SVG plotting and the command implementations.

pub mod artifact;
pub mod commands;
pub mod plot;

use std::fmt;

/// Exit status for bad flags or incompatible arguments.
pub const EXIT_USAGE: u8 = 2;
/// Exit status for unreadable or malformed inputs.
pub const EXIT_INPUT: u8 = 3;
/// Exit status for failures while computing or writing results.
pub const EXIT_PIPELINE: u8 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn pipeline(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_PIPELINE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<gscore_core::Error> for CliError {
    fn from(e: gscore_core::Error) -> Self {
        use gscore_core::Error as E;
        let code = match &e {
            E::Parameter(_) => EXIT_USAGE,
            E::InvalidInput(_) | E::Format { .. } | E::Io { .. } => EXIT_INPUT,
            E::Internal(_) | E::Cancelled { .. } => EXIT_PIPELINE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Scientific notation whose mantissa always has a fractional part,
/// e.g. `0.0e0`, `2.0e-3`, `1.25e-1`.
pub fn format_score(x: f64) -> String {
    let s = format!("{x:e}");
    match s.split_once('e') {
        Some((mantissa, exp)) if !mantissa.contains('.') => format!("{mantissa}.0e{exp}"),
        _ => s,
    }
}
