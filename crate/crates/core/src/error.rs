use thiserror::Error;

/// Errors produced by code construction, analysis and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid base matrix: {0}")]
    InvalidBase(String),
    #[error("invalid degree distribution: {0}")]
    InvalidDegrees(String),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("non-positive design rate {0}")]
    NonPositiveRate(String),
    #[error("component code parameter out of range: {0}")]
    ComponentRange(String),
    #[error("lifting factor {n} is not a positive multiple of component length {mu}")]
    LiftingFactor { n: usize, mu: usize },
    #[error("inconsistent known bits: nonzero syndrome in an all-zero row")]
    InconsistentSyndrome,
    #[error("invalid doping: {0}")]
    InvalidDoping(String),
    #[error("infeasible design: {0}")]
    Infeasible(String),
    #[error("numerical fault: {0}")]
    Numerical(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
