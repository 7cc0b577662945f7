use thiserror::Error;

/// Errors produced by the lattice, order and LOCC routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input vector is empty")]
    EmptyInput,

    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },

    #[error("weight {index} is not a finite number")]
    NonFinite { index: usize },

    #[error("weights sum to {sum}, expected 1")]
    SumNotOne { sum: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cannot mix exact and float vectors")]
    ModeMismatch,

    #[error("first vector is not majorized by the second")]
    NotMajorized,

    #[error("sequence has no ascent; it is already non-increasing")]
    NoAscent,

    #[error("flattening did not terminate within {limit} steps")]
    IterationOverflow { limit: usize },

    #[error("expected dimension {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("vectors are comparable under majorization")]
    ComparablePair,

    #[error("no feasible grid vector")]
    EmptyFeasibleSet,

    #[error("invalid input: {0}")]
    Parse(String),

    #[error("verification budget exceeded: {0}")]
    BudgetExceeded(String),
}

impl Error {
    /// Stable variant name, used in machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyInput => "EmptyInput",
            Error::NegativeWeight { .. } => "NegativeWeight",
            Error::NonFinite { .. } => "NonFinite",
            Error::SumNotOne { .. } => "SumNotOne",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::ModeMismatch => "ModeMismatch",
            Error::NotMajorized => "NotMajorized",
            Error::NoAscent => "NoAscent",
            Error::IterationOverflow { .. } => "IterationOverflow",
            Error::WrongDimension { .. } => "WrongDimension",
            Error::ComparablePair => "ComparablePair",
            Error::EmptyFeasibleSet => "EmptyFeasibleSet",
            Error::Parse(_) => "Parse",
            Error::BudgetExceeded(_) => "BudgetExceeded",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
