use std::fmt;

use randcompare_core::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const DATA: i32 = 2;
    pub const UNSUPPORTED_DESIGN: i32 = 3;
    pub const ENUMERATION_TOO_LARGE: i32 = 4;
}

#[derive(Debug)]
pub enum CliError {
    /// Malformed or invalid input data; `line` is 1-based in the source
    /// file when known.
    Data { line: Option<u64>, message: String },
    Core(Error),
    Io(String),
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Data { .. } | CliError::Usage(_) => exit::DATA,
            CliError::Io(_) => exit::INTERNAL,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

pub fn core_exit_code(e: &Error) -> i32 {
    match e {
        Error::UnsupportedDesign(_)
        | Error::NoncomputableDistribution
        | Error::ZeroInclusion { .. }
        | Error::InvalidDesign(_) => exit::UNSUPPORTED_DESIGN,
        Error::EnumerationTooLarge { .. } => exit::ENUMERATION_TOO_LARGE,
        Error::NonConvergence(_) => exit::INTERNAL,
        _ => exit::DATA,
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Data { line: Some(l), message } => write!(f, "line {l}: {message}"),
            CliError::Data { line: None, message } => f.write_str(message),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) | CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}
