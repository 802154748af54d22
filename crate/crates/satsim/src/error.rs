//! Error taxonomy shared across the crate.
//!
//! Variants are grouped the way the CLI maps them to exit codes:
//! configuration problems (exit 2), numerical/degenerate conditions
//! (exit 3), and I/O failures (exit 4).

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A value violates a documented invariant (bad parameter, malformed
    /// config, unknown key, missing seed, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// The config text could not be parsed at all.
    #[error("parse error: {0}")]
    Parse(String),

    /// A computation left the representable range (exp overflow etc.).
    #[error("numerical range error: {0}")]
    NumericalRange(String),

    /// The dynamical state admits no valid update (all weights zero).
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// A metric was requested on input it is undefined for (zero total,
    /// too few positive values, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A formula was evaluated outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request is outside the regime the solver supports.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// Underlying filesystem failure during export or config loading.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A scenario exceeded its configured runtime budget.
    #[error("runtime budget exceeded: {0}")]
    Timeout(String),
}

impl Error {
    /// Process exit code the CLI reports for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Validation(_) | Error::Parse(_) => 2,
            Error::NumericalRange(_)
            | Error::DegenerateState(_)
            | Error::DegenerateInput(_)
            | Error::Domain(_)
            | Error::UnsupportedRegime(_)
            | Error::Timeout(_) => 3,
            Error::Io(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
