//! Dense complex linear algebra: Hermitian eigendecomposition by cyclic
//! Jacobi rotations, PSD certificates, and the matrix exponential.

mod eigen;
mod expm;
mod matrix;
mod psd;

pub use eigen::{herm_eigen, EigenDecomposition, MAX_SWEEPS};
pub use expm::matrix_exp;
pub use matrix::{CMatrix, HermMatrix};
pub use psd::{pivoted_cholesky_psd, psd_check, PsdCertificate, PsdVerdict, DEFAULT_TOL};
