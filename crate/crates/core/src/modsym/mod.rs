//! Weight-2 modular symbols for Γ₀(n) and the operators acting on them.

mod heilbronn;
mod operators;
mod p1;
mod space;

pub use heilbronn::{heilbronn_cremona, heilbronn_merel, Mat2};
pub use operators::{
    atkin_lehner, atkin_lehner_matrix, atkin_lehner_on_m, degeneracy, degeneracy_on_m,
    degeneracy_to, hecke, hecke_on_m, heilbronn_on_m, new_lattice, quotient_pullback,
    star_involution, symbol_matrix, DegeneracyKind, OperatorMatrix, OperatorName,
};
pub use p1::{psi, P1List, P1Point};
pub use space::{
    build_space, cusp_representatives, cusps_equivalent, lift_to_sl2, Cusp, ModSymSpace, SparseVec,
};

use crate::arith::{divisors, euler_phi, factor_u64, gcd_u64};

/// The points of P¹(ℤ/nℤ) in canonical order.
pub fn p1_list(n: u64) -> Vec<P1Point> {
    P1List::new(n).points().to_vec()
}

/// Number of cusps of X₀(n): Σ_{d|n} φ(gcd(d, n/d)).
pub fn cusp_count_formula(n: u64) -> u64 {
    divisors(n).into_iter().map(|d| euler_phi(gcd_u64(d, n / d))).sum()
}

fn elliptic_counts(n: u64) -> (u64, u64) {
    let f = factor_u64(n);
    let nu2 = if n % 4 == 0 {
        0
    } else {
        f.iter()
            .map(|&(p, _)| match p {
                2 => 1,
                p if p % 4 == 1 => 2,
                _ => 0,
            })
            .product()
    };
    let nu3 = if n % 9 == 0 {
        0
    } else {
        f.iter()
            .map(|&(p, _)| match p {
                3 => 1,
                p if p % 3 == 1 => 2,
                _ => 0,
            })
            .product()
    };
    (nu2, nu3)
}

/// Genus of X₀(n).
pub fn genus(n: u64) -> u64 {
    let (nu2, nu3) = elliptic_counts(n);
    let twelve_g = 12 + psi(n) as i64 - 3 * nu2 as i64 - 4 * nu3 as i64 - 6 * cusp_count_formula(n) as i64;
    debug_assert!(twelve_g >= 0 && twelve_g % 12 == 0);
    (twelve_g / 12) as u64
}

/// Sturm bound ⌈[SL₂(ℤ) : Γ₀(n)] / 6⌉ for weight 2.
pub fn sturm_bound(n: u64) -> u64 {
    psi(n).div_ceil(6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_values() {
        assert_eq!(genus(1), 0);
        assert_eq!(genus(11), 1);
        assert_eq!(genus(22), 2);
        assert_eq!(genus(33), 3);
        assert_eq!(genus(37), 2);
        assert_eq!(genus(431), 36);
        assert_eq!(genus(2089), 173);
        assert_eq!(cusp_count_formula(15), 4);
    }

    #[test]
    fn sturm() {
        assert_eq!(sturm_bound(1), 1);
        assert_eq!(sturm_bound(11), 2);
        assert_eq!(sturm_bound(431), 72);
    }
}
