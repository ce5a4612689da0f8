use num_traits::Zero;
use rayon::prelude::*;

use super::IntPoly;
use crate::arith::{large_primes, CrtVec};
use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, ModMatrix};

/// Bits needed to bound every coefficient of det(x·I − M) in absolute value.
///
/// Coefficient k is a signed sum of k×k principal minors; Hadamard bounds each
/// by a product of row norms, so |c_k| ≤ e_k(r₁,…,r_n) ≤ ∏(1 + r_i).
pub fn charpoly_coeff_bits(m: &IntMatrix) -> u64 {
    let mut log2 = 0f64;
    for i in 0..m.rows() {
        let maxb = m.row(i).iter().map(|x| x.bits()).max().unwrap_or(0);
        if maxb == 0 {
            continue;
        }
        let rel: f64 = m
            .row(i)
            .iter()
            .filter(|x| !x.is_zero())
            .map(|x| 2f64.powi(2 * (x.bits() as i32 - maxb as i32)))
            .sum();
        let norm_log = maxb as f64 + rel.log2() / 2.0;
        // log2(1 + r) ≤ max(log2 r, 0) + 1
        log2 += norm_log.max(0.0) + 1.0;
    }
    log2.ceil() as u64 + 2
}

/// Exact characteristic polynomial det(x·I − M), monic, by Hessenberg
/// reduction modulo word primes and Chinese remaindering.
pub fn charpoly_int(m: &IntMatrix) -> Result<IntPoly> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(IntPoly::one());
    }
    let bits = charpoly_coeff_bits(m) + 1;
    let count = (bits / 61 + 1) as usize;
    let primes: Vec<u64> = large_primes().take(count).collect();
    let residues: Vec<Vec<u64>> = primes
        .par_iter()
        .map(|&p| ModMatrix::from_int(m, p).charpoly())
        .collect();
    let mut crt = CrtVec::new(n + 1);
    for (r, &p) in residues.iter().zip(&primes) {
        crt.push(r, p);
    }
    debug_assert!(crt.modulus_bits() > bits);
    Ok(IntPoly::new(crt.symmetric()))
}

/// Characteristic polynomial modulo a single prime.
pub fn charpoly_mod(m: &IntMatrix, p: u64) -> Vec<u64> {
    ModMatrix::from_int(m, p).charpoly()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn small_examples() {
        let d = IntMatrix::from_i64(2, 2, &[1, 0, 0, 2]);
        assert_eq!(charpoly_int(&d).unwrap(), IntPoly::from_i64(&[2, -3, 1]));
        let z = IntMatrix::zeros(2, 2);
        assert_eq!(charpoly_int(&z).unwrap(), IntPoly::from_i64(&[0, 0, 1]));
        assert!(charpoly_int(&IntMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn large_entries() {
        // companion matrix of x^3 − c with c huge
        let c: BigInt = BigInt::from(3).pow(200);
        let mut m = IntMatrix::zeros(3, 3);
        m.set(1, 0, 1.into());
        m.set(2, 1, 1.into());
        m.set(0, 2, c.clone());
        let f = charpoly_int(&m).unwrap();
        assert_eq!(f, IntPoly::new(vec![-c, 0.into(), 0.into(), 1.into()]));
    }
}
