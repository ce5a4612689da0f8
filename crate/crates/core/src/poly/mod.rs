//! Univariate polynomials over ℤ and 𝔽_p.

mod charpoly;
mod factor_fp;
mod factor_q;
mod fppoly;
mod gcd;
mod intpoly;

pub use charpoly::{charpoly_coeff_bits, charpoly_int, charpoly_mod};
pub use factor_fp::{distinct_degree, factor_fp, squarefree_fp};
pub use factor_q::{factor_q, is_irreducible, squarefree_int, Factorization};
pub use fppoly::FpPoly;
pub use gcd::{crt_split, gcd_int, rem_rational};
pub use intpoly::IntPoly;
