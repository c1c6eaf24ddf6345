//! Pauli spin algebra, its reflections and the map into a Majorana algebra.

pub mod couplings;
pub mod gauge;
pub mod kitaev;
pub mod oracle;
pub mod pauli;

pub use couplings::{
    build_spin_hamiltonian, extract_spin_couplings, reflection_symmetrized, spin_basis, spin_criterion, spin_criterion_matrix,
    spin_criterion_witness, spin_properties, spin_properties_tol, SpinCouplings, SpinCriterionReport, SpinLabel,
    SpinProperties,
};
pub use gauge::{gauge_transform, pauli_matrix, reflected_by, sigma3_rotation, GaugeAssignment, Mat2, SpinReflection};
pub use kitaev::{chiral_projection, kitaev_map, KitaevLattice};
pub use oracle::{kitaev_rp_oracle, spin_dense, spin_form, spin_rp_oracle, SPIN_ORACLE_MAX_SITES};
pub use pauli::{spin_reflect, PauliString, SpinElement};
