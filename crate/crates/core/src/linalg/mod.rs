//! Exact rational scalars, polynomials and dense matrices.

pub mod matrix;
pub mod poly;
pub mod rational;

use thiserror::Error;

pub use matrix::{apply_linear_factors, evaluate_poly, kernel_dimension, minimal_polynomial, rank, RationalMatrix};
pub use poly::{poly_product_of_linear_factors, squarefree_check, RationalPoly};
pub use rational::{format_rational, parse_rational, ParseRationalError, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("cannot multiply {left:?} by {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("rows of unequal length")]
    Ragged,
}
