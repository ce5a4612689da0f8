//! Exact computation of Hecke algebras attached to cuspidal modular symbols
//! for Γ₀(n), together with the lattice invariants (congruence modules,
//! modular degrees, local Gorenstein data) built on top of them.

pub mod arith;
pub mod error;
pub mod hecke;
pub mod invariants;
pub mod linalg;
pub mod modsym;
pub mod poly;
pub mod serde_big;

pub use error::{Error, Result};
pub use linalg::{IntLattice, IntMatrix, RatMatrix};
pub use poly::{FpPoly, IntPoly};
