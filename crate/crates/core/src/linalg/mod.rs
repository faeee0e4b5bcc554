//! Exact rational linear algebra over sparse operators.

pub mod dense;
pub mod echelon;
pub mod rational;
pub mod sparse;

pub use dense::Matrix;
pub use echelon::{
    direct_sum, echelonize, echelonize_in, matrix_rank, nullspace, rank, sparse_nullspace,
    DirectSumCheck, OperatorSubspace,
};
pub use rational::{ParseRationalError, Rational};
pub use sparse::{SparseOperator, SparseVec};
