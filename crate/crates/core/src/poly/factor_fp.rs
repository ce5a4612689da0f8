//! Factorization over 𝔽_p: squarefree decomposition, distinct-degree
//! splitting, then Cantor–Zassenhaus equal-degree splitting.

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fppoly::{biguint_pow, FpPoly};
use crate::error::{Error, Result};

/// Monic irreducible factors with multiplicities, sorted by degree then
/// coefficients. The product equals `f` up to its leading coefficient.
pub fn factor_fp(f: &FpPoly) -> Result<Vec<(FpPoly, u32)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(&f.bytes()));
    let mut out = Vec::new();
    for (g, mult) in squarefree_fp(&f.monic()) {
        for (h, d) in distinct_degree(&g) {
            for irr in equal_degree(&h, d, &mut rng) {
                out.push((irr, mult));
            }
        }
    }
    out.sort_by(|a, b| (a.0.deg(), &a.0).cmp(&(b.0.deg(), &b.0)));
    Ok(out)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Squarefree decomposition of a monic polynomial: pairwise coprime
/// squarefree `g_i` with `f = ∏ g_i^{m_i}`.
pub fn squarefree_fp(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let p = f.modulus();
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let mut c = f.gcd(&f.derivative());
    let mut w = f.div_rem(&c).0;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.div_rem(&y).0;
        if fac.deg() > 0 {
            out.push((fac.monic(), i));
        }
        w = y;
        c = c.div_rem(&w).0;
        i += 1;
    }
    if c.deg() > 0 {
        let root = c.monic().pth_root();
        for (g, m) in squarefree_fp(&root) {
            out.push((g, m * p as u32));
        }
    }
    out
}

/// Splits a monic squarefree polynomial into products of irreducibles of
/// equal degree, returned as `(product, degree)`.
pub fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.modulus();
    let pbig = BigUint::from(p);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = FpPoly::x(p);
    let mut h = x.rem(&rest);
    let mut i = 1;
    while rest.deg() >= 2 * i {
        h = h.pow_mod(&pbig, &rest);
        let g = rest.gcd(&h.sub(&x));
        if !g.is_one() {
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
            out.push((g, i));
        }
        i += 1;
    }
    if rest.deg() > 0 {
        let d = rest.deg();
        out.push((rest.monic(), d));
    }
    out
}

/// Splits a monic product of distinct irreducibles of degree `d`.
pub fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    if f.deg() == d {
        return vec![f.clone()];
    }
    let p = f.modulus();
    let n = f.deg();
    let exp = if p == 2 {
        BigUint::one()
    } else {
        (biguint_pow(p, d) - BigUint::one()) >> 1
    };
    loop {
        let a = FpPoly::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.deg() == 0 {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a² + … + a^(2^(d−1))
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            a.pow_mod(&exp, f).sub(&FpPoly::one(p))
        };
        let u = f.gcd(&b);
        if u.deg() > 0 && u.deg() < n {
            let v = f.div_rem(&u).0.monic();
            let mut out = equal_degree(&u, d, rng);
            out.extend(equal_degree(&v, d, rng));
            return out;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(p: u64, fs: &[(FpPoly, u32)]) -> FpPoly {
        let mut acc = FpPoly::one(p);
        for (g, m) in fs {
            for _ in 0..*m {
                acc = acc.mul(g);
            }
        }
        acc
    }

    #[test]
    fn small_examples() {
        let f = FpPoly::from_i64(3, &[-1, 0, 1]);
        let fs = factor_fp(&f).unwrap();
        assert_eq!(
            fs,
            vec![(FpPoly::from_i64(3, &[1, 1]), 1), (FpPoly::from_i64(3, &[-1, 1]), 1)]
        );
        let g = FpPoly::from_i64(2, &[1, 1, 1]);
        assert_eq!(factor_fp(&g).unwrap(), vec![(g.clone(), 1)]);
        let h = FpPoly::from_i64(5, &[0, 0, 1]);
        assert_eq!(factor_fp(&h).unwrap(), vec![(FpPoly::x(5), 2)]);
        assert!(factor_fp(&FpPoly::zero(5)).is_err());
    }

    #[test]
    fn inseparable_and_mixed() {
        // (x^2 + 1)^2 · (x + 1)^3 · x^3 over 𝔽_3, includes a p-th power
        let p = 3;
        let a = FpPoly::from_i64(p, &[1, 0, 1]);
        let b = FpPoly::from_i64(p, &[1, 1]);
        let f = a.mul(&a).mul(&b).mul(&b).mul(&b).mul(&FpPoly::from_i64(p, &[0, 0, 0, 1]));
        let fs = factor_fp(&f).unwrap();
        assert_eq!(product(p, &fs), f);
        assert_eq!(fs.len(), 3);
    }

    #[test]
    fn characteristic_two_splitting() {
        // x^15 − 1 over 𝔽₂: 1 linear, 1 quadratic, 3 quartics
        let mut c = vec![0i64; 16];
        c[0] = 1;
        c[15] = 1;
        let f = FpPoly::from_i64(2, &c);
        let fs = factor_fp(&f).unwrap();
        let degs: Vec<usize> = fs.iter().map(|(g, _)| g.deg()).collect();
        assert_eq!(degs, vec![1, 2, 4, 4, 4]);
        assert_eq!(product(2, &fs), f);
    }
}
