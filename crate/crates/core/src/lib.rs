//! Reflection positivity for Majorana and spin Hamiltonians on finite lattices.
//!
//! The crate provides an exact sparse Clifford algebra, the reflection `Θ`
//! and twisted product `∘`, coupling matrices and their spectral criterion,
//! a brute-force matrix representation, spin systems and model builders.

pub mod clifford;
pub mod error;
pub mod hamiltonian;
pub mod lattice;
pub mod linalg;
pub mod matrix_rep;
pub mod models;
pub mod random;
pub mod reflection;
pub mod spin;

pub use clifford::{canonicalize, AlgebraElement, MajoranaWord, Phase};
pub use error::{Error, Result};
pub use lattice::{Lattice, Side};
pub use reflection::{
    basis_assemble, basis_element, basis_expand, plus_basis, q_factor, reflect, s_factor,
    twisted_product, BasisCoefficients, BasisIndex, TwistChoice,
};
