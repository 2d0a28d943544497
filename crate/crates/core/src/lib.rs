//! Numerical radius, fields of values, and disk matrices.
//!
//! A matrix is a *disk matrix* when its field of values
//! `W(X) = { u*Xu : ||u|| = 1 }` is a disk in the complex plane centered at
//! the origin.  This crate computes the numerical radius
//! `r(X) = max { |z| : z in W(X) }` through the support-function identity
//! `r(X) = max_w lambda_max(Phi(w*X))` over the unit circle, detects and
//! certifies disk matrices, samples subdifferentials of `r`, classifies the
//! 3x3 case exactly, and reproduces the optimization phenomena that make disk
//! matrices appear: the proximal operator of `r` and static-output-feedback
//! minimization of `r(A + BKC)`.
//!
//! Everything is dense, complex, and aimed at small orders (n <= 16); the
//! linear algebra is self-contained (cyclic Jacobi for Hermitian
//! eigendecompositions, one-sided Jacobi for singular values).

pub mod classify3;
pub mod constructors;
pub mod diskgeom;
mod error;
pub mod io;
pub mod linalg;
pub mod optimize;
pub mod radius;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigDecomposition, HermitianMatrix, RealMatrix};
