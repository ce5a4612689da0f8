//! Multimodular gcd over ℤ[x] and the CRT idempotent in ℚ[x]/(g₁g₂).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{FpPoly, IntPoly};
use crate::arith::{big_mod_u64, large_primes, rational_reconstruction_vec, CrtVec};
use crate::error::{Error, Result};

/// Gcd in ℤ[x], normalized with positive leading coefficient.
pub fn gcd_int(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_zero() {
        return b.primitive_part().scale(&b.content().abs());
    }
    if b.is_zero() {
        return a.primitive_part().scale(&a.content().abs());
    }
    let c = a.content().gcd(&b.content());
    let (a, b) = (a.primitive_part(), b.primitive_part());
    if a.deg() == 0 || b.deg() == 0 {
        return IntPoly::constant(c);
    }
    let lcg = a.lc().gcd(&b.lc());
    let mut best_deg = usize::MAX;
    let mut crt: Option<CrtVec> = None;
    let mut primes_used = 0usize;
    for p in large_primes() {
        if big_mod_u64(&a.lc(), p) == 0 || big_mod_u64(&b.lc(), p) == 0 {
            continue;
        }
        let g = FpPoly::from_int(&a, p).gcd(&FpPoly::from_int(&b, p));
        let d = g.deg();
        if d == 0 {
            return IntPoly::constant(c);
        }
        if d > best_deg {
            continue;
        }
        let scaled = g.scale(big_mod_u64(&lcg, p));
        let residues: Vec<u64> = (0..=d).map(|i| scaled.coeff(i)).collect();
        if d < best_deg {
            best_deg = d;
            crt = Some(CrtVec::new(d + 1));
            primes_used = 0;
        }
        let acc = crt.as_mut().expect("initialized above");
        acc.push(&residues, p);
        primes_used += 1;
        // trial division after 1, 2, 4, ... primes
        if primes_used.is_power_of_two() {
            let cand = IntPoly::new(acc.symmetric()).primitive_part();
            if a.div_exact(&cand).is_some() && b.div_exact(&cand).is_some() {
                return cand.scale(&c);
            }
        }
    }
    unreachable!("prime supply is unbounded")
}

/// CRT idempotent: `h = num / den` with `deg h < deg(g1·g2)`,
/// `h ≡ 1 mod g1` and `h ≡ 0 mod g2`.
pub fn crt_split(g1: &IntPoly, g2: &IntPoly) -> Result<(IntPoly, BigInt)> {
    if g1.is_zero() || g2.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if gcd_int(g1, g2).deg() > 0 {
        return Err(Error::NotCoprime);
    }
    if g2.deg() == 0 {
        return Ok((IntPoly::one(), BigInt::one()));
    }
    if g1.deg() == 0 {
        return Ok((IntPoly::zero(), BigInt::one()));
    }
    let n = g1.deg() + g2.deg();
    let mut crt = CrtVec::new(n);
    let mut count = 0usize;
    for p in large_primes() {
        if big_mod_u64(&g1.lc(), p) == 0 || big_mod_u64(&g2.lc(), p) == 0 {
            continue;
        }
        let a = FpPoly::from_int(g1, p);
        let b = FpPoly::from_int(g2, p);
        let (g, _s, t) = a.xgcd(&b);
        if !g.is_one() {
            continue;
        }
        let h = t.mul(&b).rem(&a.mul(&b));
        let residues: Vec<u64> = (0..n).map(|i| h.coeff(i)).collect();
        crt.push(&residues, p);
        count += 1;
        if !count.is_power_of_two() {
            continue;
        }
        let modulus = crt.modulus();
        let values: Vec<BigInt> = crt.symmetric();
        let Some((nums, den)) = rational_reconstruction_vec(&values, &modulus) else {
            continue;
        };
        let h = IntPoly::new(nums);
        let d = IntPoly::constant(den.clone());
        if h.sub(&d).pseudo_rem(g1).is_zero() && h.pseudo_rem(g2).is_zero() {
            return Ok((h, den));
        }
    }
    unreachable!("prime supply is unbounded")
}

/// Reduce `h` modulo `g` over ℚ, with numerator/denominator output.
pub fn rem_rational(h: &IntPoly, g: &IntPoly) -> (IntPoly, BigInt) {
    if h.deg() < g.deg() || h.is_zero() {
        return (h.clone(), BigInt::one());
    }
    let e = (h.deg() - g.deg() + 1) as u32;
    let den = num_traits::pow(g.lc(), e as usize);
    let r = h.pseudo_rem(g);
    let c = r.content().gcd(&den);
    if c.is_zero() || c.is_one() {
        (r, den)
    } else {
        let r = IntPoly::new(r.coeffs().iter().map(|x| x / &c).collect());
        (r, den / c)
    }
}
