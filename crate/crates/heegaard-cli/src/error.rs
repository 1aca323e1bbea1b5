//! Command-level errors and their process exit codes.
//!
//! The exit-code contract of the binary:
//!
//! * `0` — success (for `compare`: the inputs are equivalent),
//! * `1` — `compare` ran successfully and the inputs are inequivalent,
//!   or `selftest` found a failing case,
//! * `2` — malformed input file, invalid usage, or any other error,
//! * `3` — the input matrix is not symplectic (the violated block
//!   identity is named in the message),
//! * `4` — a computation would exceed a size bound: either the
//!   enumeration limit (raise `HEEGAARD_MAX_ENUM` to retry) or the
//!   exact-certification bounds (a torsion coefficient too large to
//!   factor with deterministic primality witnesses).

use std::fmt;

/// An error that terminates a command.
#[derive(Debug)]
pub enum CliError {
    /// Malformed input file or invalid usage.
    Parse(String),
    /// Failure inside the classification library.
    Lib(heegaard::Error),
    /// File could not be read.
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Lib(heegaard::Error::NotSymplectic { .. }) => 3,
            CliError::Lib(
                heegaard::Error::SizeLimit { .. }
                | heegaard::Error::PrimalityOutOfRange(_)
                | heegaard::Error::FactorOutOfRange(_),
            ) => 4,
            CliError::Lib(_) => 2,
            CliError::Io { .. } => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "{msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "cannot read `{path}`: {source}"),
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Lib(e) => Some(e),
            CliError::Io { source, .. } => Some(source),
            CliError::Parse(_) => None,
        }
    }
}

impl From<heegaard::Error> for CliError {
    fn from(e: heegaard::Error) -> Self {
        CliError::Lib(e)
    }
}
