//! Exact integer and rational linear algebra.

pub mod det;
pub mod hnf;
pub mod hnf_modular;
pub mod lattice;
pub mod matrix;
pub mod modp;
pub mod snf;

pub use det::{det, rank};
pub use hnf::{hnf, hnf_basis, is_hnf};
pub use lattice::{
    idempotent_kernel_sublattice, intersect_with_span, kernel_of_map, kernel_saturated,
    lattice_intersect, lattice_sum, left_kernel, quotient_invariants, sublattice_index,
    IntLattice, QuotientStructure,
};
pub use matrix::{IntMatrix, RatMatrix};
pub use modp::{ModEchelon, ModMatrix};
pub use snf::{local_valuations, rowspan_order_exponent, snf};
