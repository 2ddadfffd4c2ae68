//! Numerical toolkit for the rational G2 spin chain.
//!
//! The crate builds the 49×49 fundamental R-matrix, the non-diagonal
//! boundary K-matrices, the 15- and 34-dimensional fused objects, and the
//! open/periodic transfer-matrix hierarchy. On top of that it evaluates the
//! inhomogeneous T-Q relations, solves the Bethe equations and matches
//! the result against exact diagonalization.
//!
//! Tensor index convention: the left Kronecker factor is the slower index,
//! and in every monodromy the auxiliary space is factor 0.

pub mod bethe;
pub mod boundary;
pub mod error;
pub mod fusion;
pub mod gtwo_r;
pub mod report;
pub mod specmat;
pub mod suites;
pub mod tables;
pub mod transfer;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
