//! Determinants and ranks of integer matrices.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::matrix::IntMatrix;
use super::modp::ModMatrix;
use crate::arith::{large_primes, Crt};

/// Dimension at and above which the multimodular route is used.
pub const MULTIMODULAR_THRESHOLD: usize = 64;

/// Exact determinant (square input).
pub fn det(m: &IntMatrix) -> BigInt {
    assert!(m.is_square(), "determinant of non-square matrix");
    if m.rows() >= MULTIMODULAR_THRESHOLD {
        det_multimodular(m)
    } else {
        det_bareiss(m)
    }
}

/// Fraction-free Gaussian elimination.
pub fn det_bareiss(m: &IntMatrix) -> BigInt {
    let n = m.rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone().into_rows();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(i) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(i, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Hadamard bound on |det|, in bits (rounded up).
pub fn hadamard_bits(m: &IntMatrix) -> u64 {
    let mut log2 = 0f64;
    for i in 0..m.rows() {
        let maxb = m.row(i).iter().map(|x| x.bits()).max().unwrap_or(0);
        if maxb == 0 {
            continue;
        }
        // |x| < 2^b, so x^2 < 2^(2b); sum relative to the largest term
        let rel: f64 = m
            .row(i)
            .iter()
            .filter(|x| !x.is_zero())
            .map(|x| 2f64.powi(2 * (x.bits() as i32 - maxb as i32)))
            .sum();
        log2 += maxb as f64 + rel.log2() / 2.0;
    }
    log2.ceil() as u64 + 1
}

/// Determinant by CRT over word primes up to the Hadamard bound.
pub fn det_multimodular(m: &IntMatrix) -> BigInt {
    let bits = hadamard_bits(m) + 2;
    let mut crt = Crt::new();
    for p in large_primes() {
        let r = ModMatrix::from_int(m, p).det();
        crt.push(r, p);
        if crt.modulus().bits() > bits {
            break;
        }
    }
    crt.symmetric()
}

/// Rank over ℚ, computed modulo two large primes (the ℚ-rank equals the
/// larger of the two unless both primes divide every maximal minor).
pub fn rank(m: &IntMatrix) -> usize {
    large_primes()
        .take(2)
        .map(|p| ModMatrix::from_int(m, p).rank())
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_and_multimodular_agree() {
        let m = IntMatrix::from_i64(3, 3, &[2, -1, 0, 4, 3, 7, -5, 2, 9]);
        assert_eq!(det_bareiss(&m), det_multimodular(&m));
        assert_eq!(det_bareiss(&m), BigInt::from(2 * (27 - 14) + (36 + 35)));
    }

    #[test]
    fn singular() {
        let m = IntMatrix::from_i64(2, 2, &[1, 2, 2, 4]);
        assert!(det(&m).is_zero());
        assert_eq!(rank(&m), 1);
    }
}
