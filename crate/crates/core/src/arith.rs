//! Integer and word-size modular arithmetic shared by the linear algebra and
//! polynomial kernels.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Modular multiplication for moduli below 2^63.
#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime (or any modulus coprime to `a`). Panics on zero.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    let (g, x, _) = xgcd_i128(a as i128, p as i128);
    assert_eq!(g, 1, "inv_mod: {a} not invertible mod {p}");
    x.rem_euclid(p as i128) as u64
}

pub fn xgcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Extended gcd over arbitrary precision integers: returns (g, s, t) with
/// g = s·a + t·b and g ≥ 0.
pub fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs()) as i64
}

/// Reduce a big integer into [0, p).
pub fn big_mod_u64(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Word-size primes used by the multimodular kernels, descending from 2^62.
pub fn large_primes() -> impl Iterator<Item = u64> {
    let mut candidate: u64 = (1u64 << 62) - 1;
    std::iter::from_fn(move || {
        while !is_prime_u64(candidate) {
            candidate -= 2;
        }
        let p = candidate;
        candidate -= 2;
        Some(p)
    })
}

/// Primes up to and including `bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| if b { Some(k as u64) } else { None })
        .collect()
}

/// Prime factorization of a small integer, ascending primes with exponents.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    factor_u64(n).iter().all(|&(_, e)| e == 1)
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factor_u64(n) {
        let prev = ds.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            ds.extend(prev.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    ds
}

pub fn euler_phi(n: u64) -> u64 {
    factor_u64(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// p-adic valuation of a nonzero big integer.
pub fn ord_p(x: &BigInt, p: u64) -> u32 {
    assert!(!x.is_zero(), "ord_p of zero");
    let bp = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&bp);
        if !r.is_zero() {
            return v;
        }
        y = q;
        v += 1;
    }
}

/// Split off the p-part: returns (p^ord_p(x), x / p^ord_p(x)).
pub fn split_p_part(x: &BigInt, p: u64) -> (BigInt, BigInt) {
    let e = ord_p(x, p);
    let pe = BigInt::from(p).pow(e);
    let rest = x / &pe;
    (pe, rest)
}

/// Trial-division factorization of a big integer against small primes;
/// returns the factored part and the unfactored cofactor (1 when complete).
pub fn factor_big_partial(x: &BigInt, bound: u64) -> (Vec<(u64, u32)>, BigInt) {
    let mut y = x.abs();
    let mut out = Vec::new();
    if y.is_zero() {
        return (out, y);
    }
    let mut cofactor_is_prime = false;
    for p in primes_up_to(bound) {
        let bp = BigInt::from(p);
        if (&bp * &bp) > y {
            cofactor_is_prime = true;
            break;
        }
        let mut e = 0;
        while (&y % &bp).is_zero() {
            y /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    if y > BigInt::one() {
        if let Some(small) = y.to_u64() {
            if cofactor_is_prime || is_prime_u64(small) {
                out.push((small, 1));
                out.sort_unstable();
                return (out, BigInt::one());
            }
        }
    }
    (out, y)
}

/// Complete factorization of `|x|` (trial division, then Miller–Rabin and
/// Pollard rho on the cofactor), sorted by prime.
pub fn factor_big(x: &BigInt) -> Vec<(BigInt, u32)> {
    let (small, rest) = factor_big_partial(x, 10_000);
    let mut out: Vec<(BigInt, u32)> = small.into_iter().map(|(p, e)| (BigInt::from(p), e)).collect();
    if rest > BigInt::one() {
        let big = rest.to_biguint().expect("cofactor is positive");
        for (p, e) in num_prime::nt_funcs::factorize(big) {
            out.push((BigInt::from(p), e as u32));
        }
    }
    out.sort();
    out
}

/// Incremental Chinese remaindering of residues modulo distinct word primes.
#[derive(Clone, Debug)]
pub struct Crt {
    value: BigInt,
    modulus: BigInt,
}

impl Default for Crt {
    fn default() -> Self {
        Self::new()
    }
}

impl Crt {
    pub fn new() -> Self {
        Crt {
            value: BigInt::zero(),
            modulus: BigInt::one(),
        }
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn push(&mut self, residue: u64, p: u64) {
        let m_mod_p = big_mod_u64(&self.modulus, p);
        let v_mod_p = big_mod_u64(&self.value, p);
        let diff = sub_mod(residue % p, v_mod_p, p);
        let k = mul_mod(diff, inv_mod(m_mod_p, p), p);
        self.value += &self.modulus * BigInt::from(k);
        self.modulus *= BigInt::from(p);
    }

    /// Representative in the symmetric range (−M/2, M/2].
    pub fn symmetric(&self) -> BigInt {
        let half = &self.modulus >> 1;
        if self.value > half {
            &self.value - &self.modulus
        } else {
            self.value.clone()
        }
    }
}

/// Combine residue vectors prime by prime (same length each time).
#[derive(Clone, Debug)]
pub struct CrtVec {
    values: Vec<BigInt>,
    modulus: BigInt,
}

impl CrtVec {
    pub fn new(len: usize) -> Self {
        CrtVec {
            values: vec![BigInt::zero(); len],
            modulus: BigInt::one(),
        }
    }

    pub fn push(&mut self, residues: &[u64], p: u64) {
        assert_eq!(residues.len(), self.values.len());
        let inv = inv_mod(big_mod_u64(&self.modulus, p), p);
        for (v, &r) in self.values.iter_mut().zip(residues) {
            let diff = sub_mod(r % p, big_mod_u64(v, p), p);
            let k = mul_mod(diff, inv, p);
            if k != 0 {
                *v += &self.modulus * BigInt::from(k);
            }
        }
        self.modulus *= BigInt::from(p);
    }

    pub fn modulus(&self) -> BigInt {
        self.modulus.clone()
    }

    pub fn modulus_bits(&self) -> u64 {
        self.modulus.bits()
    }

    /// Residues in `[0, M)`.
    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn symmetric(&self) -> Vec<BigInt> {
        let half = &self.modulus >> 1;
        self.values
            .iter()
            .map(|v| if *v > half { v - &self.modulus } else { v.clone() })
            .collect()
    }
}

/// Rational reconstruction of `a` modulo `m`: finds n/d with |n|, d ≤ sqrt(m/2).
pub fn rational_reconstruction(a: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    let bound = (m >> 1usize).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let (num, den) = if t1.sign() == Sign::Minus {
        (-r1, -t1)
    } else {
        (r1, t1)
    };
    if num.gcd(&den) != BigInt::one() {
        return None;
    }
    Some((num, den))
}

/// Reconstruct a vector of rationals with a common denominator from residues
/// modulo `m`. Returns `(numerators, denominator)` with denominator > 0.
pub fn rational_reconstruction_vec(values: &[BigInt], m: &BigInt) -> Option<(Vec<BigInt>, BigInt)> {
    let half = m >> 1usize;
    let bound = half.sqrt();
    let mut den = BigInt::one();
    // grow the denominator incrementally so later entries reconstruct small
    for v in values {
        let mut scaled = (v * &den).mod_floor(m);
        if scaled > half {
            scaled -= m;
        }
        if scaled.abs() <= bound {
            continue;
        }
        let (_, d) = rational_reconstruction(&scaled, m)?;
        den *= d;
    }
    let mut nums = Vec::with_capacity(values.len());
    for v in values {
        let mut x = (v * &den).mod_floor(m);
        if x > half {
            x -= m;
        }
        if x.abs() > &bound * &den {
            return None;
        }
        nums.push(x);
    }
    Some((nums, den))
}

/// Integer square root when `x` is a perfect square.
pub fn exact_sqrt(x: &BigInt) -> Option<BigInt> {
    if x.is_negative() {
        return None;
    }
    let r = x.sqrt();
    if &r * &r == *x {
        Some(r)
    } else {
        None
    }
}

/// Nearest-integer division with ties rounded away from zero.
pub fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    let twice: BigInt = &r * 2;
    let b_abs = b.abs();
    // r has the sign of b; compare |2r| against |b|
    match twice.abs().cmp(&b_abs) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            // tie: candidates q and q+1, pick the one farther from zero
            let q1: BigInt = &q + 1;
            if q1.abs() > q.abs() {
                q1
            } else {
                q
            }
        }
    }
}
