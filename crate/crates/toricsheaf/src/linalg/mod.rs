//! Exact linear algebra over ℚ: dense subspaces for small ambient spaces and
//! fraction-free sparse ranks for the large complexes.

mod complex;
mod dense;
mod sparse;

pub use complex::{composite_is_zero, sparse_row, CochainComplex};
pub use dense::{rref, Matrix, Subspace};
pub use sparse::{rank, SparseRow};
