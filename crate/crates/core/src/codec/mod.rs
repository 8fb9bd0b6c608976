//! Linear algebra over GF(q): sparse matrices, rank, systematic encoding
//! and q-ary belief-propagation decoding.

mod encoder;
mod matrix;
mod qspa;

use core::fmt;

pub use encoder::SystematicEncoder;
pub use matrix::SparseGfMatrix;
pub use qspa::{walsh_hadamard, DecodeResult, QspaDecoder, Stage};

use crate::gf2m::FieldError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodecError {
    DimensionMismatch,
    OutOfBounds { row: usize, col: usize },
    DuplicateEntry { row: usize, col: usize },
    /// H does not have full row rank; the code has a higher rate than its
    /// dimensions suggest.
    RankDeficient { rank: usize, rows: usize },
    PriorsNotNormalized { symbol: usize },
    ZeroIterations,
    Field(FieldError),
}

impl fmt::Display for CodecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodecError::DimensionMismatch => write!(f, "dimension mismatch"),
            CodecError::OutOfBounds { row, col } => write!(f, "entry ({row}, {col}) out of bounds"),
            CodecError::DuplicateEntry { row, col } => write!(f, "duplicate entry at ({row}, {col})"),
            CodecError::RankDeficient { rank, rows } => {
                write!(f, "parity-check matrix has rank {rank} < {rows} rows")
            }
            CodecError::PriorsNotNormalized { symbol } => {
                write!(f, "prior of symbol {symbol} is not a probability vector")
            }
            CodecError::ZeroIterations => write!(f, "at least one iteration is required"),
            CodecError::Field(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for CodecError {}

impl From<FieldError> for CodecError {
    fn from(e: FieldError) -> Self {
        CodecError::Field(e)
    }
}
