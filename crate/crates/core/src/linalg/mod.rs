//! Dense complex matrix arithmetic and small self-contained eigen/SVD
//! solvers.
//!
//! The whole crate works at orders n <= 16, so everything here favors
//! determinism and exactness of structure (Hermitian symmetry is preserved
//! bit-for-bit, eigenvalue order and eigenvector phases are fixed) over
//! large-n performance.

mod eig;
mod matrix;

pub use eig::{eigh, eigh_values, kernel_basis, spectral_norm, svd_columns, ColumnSvd, EigDecomposition};
pub use matrix::{
    vec_dot, vec_norm, vec_normalize, ComplexMatrix, HermitianMatrix, RealMatrix,
};
