use std::fmt;

use gldpc::Error;

/// Failure of a subcommand, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Infeasible(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible design: {m}"),
            CliError::Numerical(m) => write!(f, "numerical fault: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Infeasible(_) | Error::NonPositiveRate(_) | Error::InvalidDoping(_) => CliError::Infeasible(msg),
            Error::Numerical(_) | Error::InconsistentSyndrome => CliError::Numerical(msg),
            _ => CliError::Usage(msg),
        }
    }
}
