//! Exact arithmetic over Q and small prime fields, dense matrices, and
//! subspaces in canonical reduced row-echelon form.

mod matrix;
mod scalar;
mod subspace;

pub use matrix::{rref_kernel_image, solve, Matrix};
pub use scalar::{Field, Scalar};
pub use subspace::{subspace_ops, Subspace};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaError {
    #[error("mixed-field arithmetic")]
    MixedField,
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    Dimension { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("ambient dimension mismatch: {0} vs {1}")]
    Ambient(usize, usize),
    #[error("rows of unequal length")]
    Ragged,
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
    #[error("{0} is not a prime below 2^16")]
    BadPrime(u32),
}

#[cfg(test)]
mod tests;
