//! Exact idempotents `e = N/D` of 𝕋_ℚ acting on a lattice, and the two ways
//! of building them from a separating element `t` and a factor `g` of its
//! squarefree characteristic polynomial.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{big_mod_u64, inv_mod, large_primes, mul_mod, rational_reconstruction_vec, CrtVec};
use crate::error::{Error, Result};
use crate::linalg::{IntLattice, IntMatrix, ModEchelon, ModMatrix, RatMatrix};
use crate::poly::{crt_split, FpPoly, IntPoly};

/// Give up on multimodular reconstruction past this many primes.
const MAX_PRIMES: usize = 6000;

/// Rational matrix `num / den` with `den > 0` and `gcd(content(num), den) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Idempotent {
    pub num: IntMatrix,
    pub den: BigInt,
}

impl Idempotent {
    pub fn new(num: IntMatrix, den: BigInt) -> Self {
        let mut g = den.clone();
        for x in num.entries() {
            if g.is_one() {
                break;
            }
            g = g.gcd(x);
        }
        if den.is_negative() {
            g = -g;
        }
        if g.is_one() {
            return Idempotent { num, den };
        }
        let data = num.entries().iter().map(|x| x / &g).collect();
        Idempotent {
            num: IntMatrix::from_vec(num.rows(), num.cols(), data),
            den: den / g,
        }
    }

    pub fn identity(n: usize) -> Self {
        Idempotent {
            num: IntMatrix::identity(n),
            den: BigInt::one(),
        }
    }

    pub fn dim(&self) -> usize {
        self.num.rows()
    }

    /// `1 − e`.
    pub fn complement(&self) -> Self {
        let mut m = self.num.neg();
        for i in 0..self.dim() {
            let v = m.get(i, i) + &self.den;
            m.set(i, i, v);
        }
        Idempotent::new(m, self.den.clone())
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix::from_int_over(&self.num, &self.den)
    }

    /// Rank, read off the trace.
    pub fn rank(&self) -> usize {
        let tr = (0..self.dim()).fold(BigInt::zero(), |a, i| a + self.num.get(i, i));
        let (q, r) = tr.div_rem(&self.den);
        assert!(r.is_zero(), "trace of an idempotent is not integral");
        q.try_into().expect("rank fits in usize")
    }

    /// `N² = D·N`.
    pub fn is_idempotent(&self) -> bool {
        self.num.mul(&self.num) == self.num.scale(&self.den)
    }

    pub fn commutes_with(&self, m: &IntMatrix) -> bool {
        self.num.mul(m) == m.mul(&self.num)
    }

    /// `e` modulo a prime not dividing the denominator.
    pub fn mod_p(&self, p: u64) -> Option<ModMatrix> {
        let d = big_mod_u64(&self.den, p);
        if d == 0 {
            return None;
        }
        let inv = inv_mod(d, p);
        Some(ModMatrix::from_int(&self.num, p).scale(inv))
    }
}

/// `e = h(t)` where `h ≡ 1 mod g` and `h ≡ 0 mod c`.
pub fn idempotent_by_crt(t: &IntMatrix, g: &IntPoly, c: &IntPoly) -> Result<Idempotent> {
    let (h, den) = crt_split(g, c)?;
    let e = Idempotent::new(h.eval_matrix(t), den);
    if !e.is_idempotent() {
        return Err(Error::NotIdempotent);
    }
    Ok(e)
}

/// `x·f(t)` by Horner's rule.
fn apply_poly(t: &ModMatrix, f: &FpPoly, x: &[u64]) -> Vec<u64> {
    let p = t.p;
    let mut acc = vec![0u64; x.len()];
    for k in (0..=f.deg()).rev() {
        acc = t.vec_mul(&acc);
        let c = f.coeff(k);
        if c != 0 {
            for (a, &xi) in acc.iter_mut().zip(x) {
                *a = (*a + mul_mod(c, xi, p)) % p;
            }
        }
    }
    acc
}

/// Echelon basis of the `t`-stable subspace `x·f(t)·𝔽_p[t]`, grown from
/// random `x` until it reaches `target` dimensions.
fn krylov_span(t: &ModMatrix, f: &FpPoly, target: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Vec<u64>>> {
    let p = t.p;
    let n = t.rows;
    let mut ech = ModEchelon::new(n, p);
    let mut basis = Vec::with_capacity(target);
    let mut tries = 0;
    while basis.len() < target {
        tries += 1;
        if tries > 4 * target + 8 {
            return None;
        }
        let x: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p)).collect();
        let mut y = apply_poly(t, f, &x);
        while basis.len() < target && ech.insert(&y) {
            basis.push(y.clone());
            y = t.vec_mul(&y);
        }
    }
    Some(basis)
}

/// The projection onto `ker g(t)` along `ker c(t)` modulo `p`, when `t` is
/// semisimple mod `p` with the expected kernel dimensions.
pub fn projection_mod_p(t: &ModMatrix, g: &FpPoly, c: &FpPoly, rank: usize, seed: u64) -> Option<ModMatrix> {
    let n = t.rows;
    let p = t.p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
    // x·c(t) lands in ker g(t), x·g(t) in ker c(t)
    let v = krylov_span(t, c, rank, &mut rng)?;
    let w = krylov_span(t, g, n - rank, &mut rng)?;
    let mut rows = v;
    rows.extend(w);
    let b = ModMatrix::from_rows(&rows, n, p);
    let b_inv = b.inverse()?;
    // E = B⁻¹·J·B with J the projection onto the first `rank` coordinates
    let mut left = ModMatrix::zeros(n, rank, p);
    for i in 0..n {
        for j in 0..rank {
            left.set(i, j, b_inv.get(i, j));
        }
    }
    let top = ModMatrix::from_rows(&rows[..rank], n, p);
    Some(left.mul(&top))
}

/// Reconstruct a rational matrix from its images modulo many primes.
/// `residue` returns `None` at unusable primes; `verify` is the exact check.
pub fn reconstruct_matrix(
    rows: usize,
    cols: usize,
    mut residue: impl FnMut(u64) -> Option<ModMatrix>,
    verify: impl Fn(&Idempotent) -> bool,
) -> Result<Idempotent> {
    let mut crt = CrtVec::new(rows * cols);
    let mut used = 0usize;
    let mut next_try = 2usize;
    let mut primes = large_primes();
    while used < MAX_PRIMES {
        let p = primes.next().expect("prime supply");
        let Some(m) = residue(p) else { continue };
        let flat: Vec<u64> = (0..rows).flat_map(|i| m.row(i).to_vec()).collect();
        crt.push(&flat, p);
        used += 1;
        if used < next_try {
            continue;
        }
        next_try = used + used.div_ceil(4).max(2);
        let modulus = crt.modulus();
        let Some((nums, den)) = rational_reconstruction_vec(&crt.symmetric(), &modulus) else {
            continue;
        };
        let cand = Idempotent::new(IntMatrix::from_vec(rows, cols, nums), den);
        // one fresh prime before paying for the exact check
        let fresh = loop {
            let q = primes.next().expect("prime supply");
            if let Some(m) = residue(q) {
                break (q, m);
            }
        };
        let (q, mq) = fresh;
        let agrees = cand.mod_p(q).is_some_and(|c| c == mq);
        let flat: Vec<u64> = (0..rows).flat_map(|i| mq.row(i).to_vec()).collect();
        crt.push(&flat, q);
        used += 1;
        if agrees && verify(&cand) {
            return Ok(cand);
        }
    }
    Err(Error::Internal(format!("rational reconstruction did not stabilise after {MAX_PRIMES} primes")))
}

/// `e = projection onto ker g(t) along ker c(t)` by multimodular
/// reconstruction, verified exactly (`N² = D·N`, `N·t = t·N`, rank).
pub fn idempotent_by_projection(t: &IntMatrix, g: &IntPoly, c: &IntPoly, rank: usize, seed: u64) -> Result<Idempotent> {
    let n = t.rows();
    if rank == n {
        return Ok(Idempotent::identity(n));
    }
    if rank == 0 {
        return Ok(Idempotent::new(IntMatrix::zeros(n, n), BigInt::one()));
    }
    let residue = |p: u64| {
        if big_mod_u64(&g.lc(), p) == 0 || big_mod_u64(&c.lc(), p) == 0 {
            return None;
        }
        let tp = ModMatrix::from_int(t, p);
        projection_mod_p(&tp, &FpPoly::from_int(g, p), &FpPoly::from_int(c, p), rank, seed)
    };
    let verify = |e: &Idempotent| e.rank() == rank && e.commutes_with(t) && e.is_idempotent();
    reconstruct_matrix(n, n, residue, verify)
}

/// The same element acting on a 𝕋-stable sublattice `L`, in `L`-coordinates:
/// the matrix `E_L` with `E_L·B = B·E` for the basis `B` of `L`.
pub fn restrict_idempotent(l: &IntLattice, e: &Idempotent) -> Result<Idempotent> {
    let g = l.rank();
    let b = l.basis();
    let piv = l.pivots().to_vec();
    let bn = |p: u64| -> Option<ModMatrix> {
        let d = big_mod_u64(&e.den, p);
        if d == 0 {
            return None;
        }
        let bp = ModMatrix::from_int(b, p);
        let mut square = ModMatrix::zeros(g, g, p);
        for i in 0..g {
            for (k, &c) in piv.iter().enumerate() {
                square.set(i, k, bp.get(i, c));
            }
        }
        let inv = square.inverse()?;
        let img = bp.mul(&ModMatrix::from_int(&e.num, p)).scale(inv_mod(d, p));
        let mut img_p = ModMatrix::zeros(g, g, p);
        for i in 0..g {
            for (k, &c) in piv.iter().enumerate() {
                img_p.set(i, k, img.get(i, c));
            }
        }
        Some(img_p.mul(&inv))
    };
    let lhs_b = b.scale(&e.den);
    let rhs = b.mul(&e.num);
    let verify = |cand: &Idempotent| cand.num.mul(&lhs_b) == rhs.scale(&cand.den);
    if g == 0 {
        return Ok(Idempotent::new(IntMatrix::zeros(0, 0), BigInt::one()));
    }
    reconstruct_matrix(g, g, bn, verify)
}
