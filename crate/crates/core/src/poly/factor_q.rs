//! Factorization in ℚ[x]: squarefree decomposition, factorization modulo a
//! good prime, quadratic Hensel lifting and subset recombination.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::factor_fp::factor_fp;
use super::gcd::gcd_int;
use super::{FpPoly, IntPoly};
use crate::arith::{big_mod_u64, is_prime_u64, xgcd};
use crate::error::{Error, Result};

/// `f = content · ∏ factor^mult` with primitive irreducible factors of
/// positive leading coefficient.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Factorization {
    pub content: BigInt,
    pub factors: Vec<(IntPoly, u32)>,
}

impl Factorization {
    pub fn expand(&self) -> IntPoly {
        let mut acc = IntPoly::constant(self.content.clone());
        for (g, m) in &self.factors {
            acc = acc.mul(&g.pow(*m));
        }
        acc
    }
}

/// How many good primes are tried for degree pruning.
const PRIMES_TRIED: usize = 5;

pub fn factor_q(f: &IntPoly) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let content = f.content();
    let g = f.primitive_part();
    let mut factors = Vec::new();
    for (part, mult) in squarefree_int(&g) {
        for irr in factor_squarefree(&part) {
            factors.push((irr, mult));
        }
    }
    factors.sort_by(|a, b| (a.0.deg(), &a.0).cmp(&(b.0.deg(), &b.0)));
    let out = Factorization { content, factors };
    if out.expand() != *f {
        return Err(Error::Internal("factorization does not reproduce input".into()));
    }
    Ok(out)
}

/// Yun's algorithm on a primitive polynomial with positive leading coefficient.
pub fn squarefree_int(f: &IntPoly) -> Vec<(IntPoly, u32)> {
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let d = f.derivative();
    let c = gcd_int(f, &d);
    let mut w = f.div_exact(&c).expect("gcd divides");
    let mut y = d.div_exact(&c).expect("gcd divides derivative");
    let mut z = y.sub(&w.derivative());
    let mut i = 1u32;
    while w.deg() > 0 {
        let g = gcd_int(&w, &z).primitive_part();
        if g.deg() > 0 {
            out.push((g.clone(), i));
        }
        w = w.div_exact(&g).expect("gcd divides");
        y = z.div_exact(&g).expect("gcd divides");
        z = y.sub(&w.derivative());
        i += 1;
    }
    out
}

struct LocalData {
    p: u64,
    factors: Vec<FpPoly>,
}

/// Irreducible factors of a primitive squarefree polynomial.
fn factor_squarefree(f: &IntPoly) -> Vec<IntPoly> {
    let n = f.deg();
    if n <= 1 {
        return vec![f.primitive_part()];
    }
    // x divides: peel it off so constant-term pruning always applies
    if f.coeff(0).is_zero() {
        let rest = f.div_exact(&IntPoly::x()).expect("x divides");
        let mut out = vec![IntPoly::x()];
        out.extend(factor_squarefree(&rest));
        return out;
    }
    let mut locals: Vec<LocalData> = Vec::new();
    let mut allowed: Option<BTreeSet<usize>> = None;
    for p in (2u64..).filter(|&q| is_prime_u64(q)) {
        if locals.len() >= PRIMES_TRIED {
            break;
        }
        if big_mod_u64(&f.lc(), p) == 0 {
            continue;
        }
        let fp = FpPoly::from_int(f, p);
        if fp.gcd(&fp.derivative()).deg() > 0 {
            continue;
        }
        let fs: Vec<FpPoly> = factor_fp(&fp)
            .expect("nonzero")
            .into_iter()
            .map(|(g, _)| g)
            .collect();
        if fs.len() == 1 {
            return vec![f.clone()];
        }
        let sums = subset_degree_sums(&fs, n);
        allowed = Some(match allowed {
            None => sums,
            Some(a) => a.intersection(&sums).copied().collect(),
        });
        if allowed.as_ref().is_some_and(|a| a.is_empty()) {
            return vec![f.clone()];
        }
        locals.push(LocalData { p, factors: fs });
    }
    let allowed = allowed.expect("a good prime exists");
    // fewest local factors; ties go to the smaller prime
    let local = locals
        .into_iter()
        .min_by_key(|l| (l.factors.len(), l.p))
        .expect("at least one prime");
    let p = local.p;
    let bound_bits = mignotte_bits(f) + f.lc().bits() + 2;
    let mut pk = BigInt::from(p);
    while pk.bits() <= bound_bits {
        pk *= p;
    }
    let lifted = hensel_lift(f, &local.factors, p, &pk);
    recombine(f, lifted, &pk, &allowed)
}

/// Degrees in [1, n−1] realizable as sums of a subset of factor degrees.
fn subset_degree_sums(fs: &[FpPoly], n: usize) -> BTreeSet<usize> {
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for g in fs {
        let d = g.deg();
        for s in (d..=n).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    (1..n).filter(|&s| reach[s]).collect()
}

/// Bits of a bound on the coefficients of any factor of `f`.
fn mignotte_bits(f: &IntPoly) -> u64 {
    // |g_j| ≤ C(m, j)·‖f‖₂ ≤ 2^n·‖f‖₂ for any factor g of degree m ≤ n
    let norm_sq: BigInt = f.coeffs().iter().map(|c| c * c).sum();
    let norm_bits = norm_sq.bits() / 2 + 1;
    f.deg() as u64 + norm_bits
}

fn reduce(f: &IntPoly, m: &BigInt) -> IntPoly {
    IntPoly::new(f.coeffs().iter().map(|c| c.mod_floor(m)).collect())
}

fn symmetric(f: &IntPoly, m: &BigInt) -> IntPoly {
    let half = m >> 1usize;
    IntPoly::new(
        f.coeffs()
            .iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

/// Division by a monic polynomial modulo `m`.
fn div_rem_monic(a: &IntPoly, b: &IntPoly, m: &BigInt) -> (IntPoly, IntPoly) {
    debug_assert!(b.is_monic());
    let db = b.deg();
    if a.is_zero() || a.deg() < db {
        return (IntPoly::zero(), reduce(a, m));
    }
    let mut r: Vec<BigInt> = a.coeffs().iter().map(|c| c.mod_floor(m)).collect();
    let mut q = vec![BigInt::zero(); a.deg() - db + 1];
    for k in (0..q.len()).rev() {
        let c = r[k + db].mod_floor(m);
        if !c.is_zero() {
            for (j, bj) in b.coeffs().iter().enumerate() {
                r[k + j] = (&r[k + j] - &c * bj).mod_floor(m);
            }
        }
        q[k] = c;
    }
    r.truncate(db);
    (IntPoly::new(q), reduce(&IntPoly::new(r), m))
}

fn mul_mod(a: &IntPoly, b: &IntPoly, m: &BigInt) -> IntPoly {
    reduce(&a.mul(b), m)
}

/// One quadratic Hensel step: from `f ≡ g·h`, `s·g + t·h ≡ 1 (mod m)` to the
/// same relations modulo m².
#[allow(clippy::too_many_arguments)]
fn hensel_step(
    f: &IntPoly,
    g: &IntPoly,
    h: &IntPoly,
    s: &IntPoly,
    t: &IntPoly,
    m: &BigInt,
) -> (IntPoly, IntPoly, IntPoly, IntPoly) {
    let m2 = m * m;
    let e = reduce(&f.sub(&g.mul(h)), &m2);
    let (q, r) = div_rem_monic(&mul_mod(s, &e, &m2), h, &m2);
    let g2 = reduce(&g.add(&t.mul(&e)).add(&q.mul(g)), &m2);
    let h2 = reduce(&h.add(&r), &m2);
    let b = reduce(&s.mul(&g2).add(&t.mul(&h2)).sub(&IntPoly::one()), &m2);
    let (c, d) = div_rem_monic(&mul_mod(s, &b, &m2), &h2, &m2);
    let s2 = reduce(&s.sub(&d), &m2);
    let t2 = reduce(&t.sub(&t.mul(&b)).sub(&c.mul(&g2)), &m2);
    (g2, h2, s2, t2)
}

/// Lift `f ≡ lc(f)·∏ u_i (mod p)` to monic factors modulo `pk`.
fn hensel_lift(f: &IntPoly, factors: &[FpPoly], p: u64, pk: &BigInt) -> Vec<IntPoly> {
    if factors.len() == 1 {
        let (_, inv, _) = xgcd(&f.lc(), pk);
        return vec![reduce(&f.scale(&inv), pk)];
    }
    let k = factors.len() / 2;
    let (left, right) = factors.split_at(k);
    let lc_p = big_mod_u64(&f.lc(), p);
    let gbar = left
        .iter()
        .fold(FpPoly::one(p), |acc, u| acc.mul(u))
        .scale(lc_p);
    let hbar = right.iter().fold(FpPoly::one(p), |acc, u| acc.mul(u));
    let (one, sbar, tbar) = gbar.xgcd(&hbar);
    debug_assert!(one.is_one());
    let (mut g, mut h, mut s, mut t) = (gbar.to_int(), hbar.to_int(), sbar.to_int(), tbar.to_int());
    let mut m = BigInt::from(p);
    while &m < pk {
        let next = hensel_step(f, &g, &h, &s, &t, &m);
        g = next.0;
        h = next.1;
        s = next.2;
        t = next.3;
        m = &m * &m;
    }
    let g = reduce(&g, pk);
    let h = reduce(&h, pk);
    let mut out = hensel_lift(&g, left, p, pk);
    out.extend(hensel_lift(&h, right, p, pk));
    out
}

fn recombine(f: &IntPoly, lifted: Vec<IntPoly>, pk: &BigInt, allowed: &BTreeSet<usize>) -> Vec<IntPoly> {
    let mut found = Vec::new();
    let mut cur = f.clone();
    let mut rest: Vec<IntPoly> = lifted;
    let mut size = 1;
    'outer: while 2 * size <= rest.len() {
        let lc = cur.lc();
        let target_const = &lc * cur.coeff(0);
        let r = rest.len();
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let deg: usize = idx.iter().map(|&i| rest[i].deg()).sum();
            if allowed.contains(&deg) {
                // constant-term test before forming the full product
                let c0 = idx
                    .iter()
                    .fold(lc.clone(), |acc, &i| (acc * rest[i].coeff(0)).mod_floor(pk));
                let c0 = symmetric(&IntPoly::constant(c0), pk).coeff(0);
                if !c0.is_zero() && target_const.is_multiple_of(&c0) {
                    let prod = idx
                        .iter()
                        .fold(IntPoly::constant(lc.clone()), |acc, &i| mul_mod(&acc, &rest[i], pk));
                    let cand = symmetric(&prod, pk).primitive_part();
                    if let Some(q) = cur.div_exact(&cand) {
                        found.push(cand);
                        cur = q;
                        let chosen: BTreeSet<usize> = idx.iter().copied().collect();
                        rest = rest
                            .into_iter()
                            .enumerate()
                            .filter(|(i, _)| !chosen.contains(i))
                            .map(|(_, u)| u)
                            .collect();
                        continue 'outer;
                    }
                }
            }
            if !next_combination(&mut idx, r) {
                break;
            }
        }
        size += 1;
    }
    if cur.deg() > 0 {
        found.push(cur.primitive_part());
    }
    found
}

/// Advance to the next k-subset of 0..n in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Whether `f` is irreducible over ℚ (positive degree, primitive part).
pub fn is_irreducible(f: &IntPoly) -> Result<bool> {
    let fz = factor_q(f)?;
    Ok(fz.factors.len() == 1 && fz.factors[0].1 == 1)
}
