//! The Hecke algebra 𝕋 acting on the cuspidal lattice, its newform
//! decomposition, the orders 𝒪_f and local diagnostics at maximal ideals.

pub mod algebra;
pub mod decompose;
pub mod fp_algebra;
pub mod local;
pub mod idempotent;
pub mod regular;

pub use algebra::{build_hecke_algebra, HeckeAlgebra};
pub use decompose::{decompose_new, ClassLabel, Decomposition, NewformClass};
pub use idempotent::Idempotent;
pub use local::{class_diagnostics, ideals_of_class, is_gorenstein, order_of, u_p_unit_check, GorensteinVerdict, IdealDiagnostics, LocalData};
pub use fp_algebra::{FpAlgebra, MaxIdeal, ModuleAction, RingKind};
pub use regular::{OrderOf, RegularRep};
