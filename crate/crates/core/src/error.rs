use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid physical parameters: {0}")]
    Parameter(String),

    #[error("invalid field specification: {0}")]
    Field(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("L_{n}({x}) overflows f64; use the scaled evaluator instead")]
    Overflow { n: usize, x: f64 },

    #[error("non-finite value while evaluating {0}")]
    Evaluation(String),

    #[error(
        "truncation at m_max = {m_max} leaves tail {tail:.3e} above tolerance {tolerance:.3e}"
    )]
    Truncation {
        m_max: usize,
        tail: f64,
        tolerance: f64,
    },

    #[error("step size too coarse: {0}")]
    StepSize(String),

    #[error("Fock dimension too small: {0}")]
    Dimension(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures that come from the numerics rather than the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. }
                | Error::Evaluation(_)
                | Error::Truncation { .. }
                | Error::StepSize(_)
                | Error::Dimension(_)
        )
    }
}
