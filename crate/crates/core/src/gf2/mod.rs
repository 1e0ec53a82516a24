//! Exact linear algebra over GF(2).
//!
//! [`BitVector`] packs bits 64 per word; [`BinaryMatrix`] offers both dense
//! bit-packed rows (used by elimination: rank, solve, nullspace, inversion)
//! and per-row sparse coordinates (used by the decoders, where cost must stay
//! proportional to the ones count). Gaussian elimination always pivots on the
//! first nonzero in column order, so all derived bases and complements are
//! deterministic.

mod bitvec;
mod matrix;
mod solve;

pub use bitvec::BitVector;
pub use matrix::BinaryMatrix;
pub use solve::{sparse_column_rank, IncrementalRank, LinearSolver, Solution};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("column selection must be strictly increasing")]
    InvalidColumnSelection,
    #[error("matrix is not unit lower triangular at row {row}")]
    NotUnitLowerTriangular { row: usize },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("requested complement of {requested} vectors, only {available} available")]
    ComplementTooLarge { requested: usize, available: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
