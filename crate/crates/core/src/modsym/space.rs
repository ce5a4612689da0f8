//! Manin-symbol presentation of weight-2 modular symbols for Γ₀(n).
//!
//! A Manin symbol `(c : d)` stands for `g{0, ∞} = {b/d, a/c}` where
//! `g = [[a, b], [c, d]] ∈ SL₂(ℤ)`. Row vectors throughout; an operator acts
//! on the right.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::p1::{P1List, P1Point};
use crate::arith::{gcd_i64, xgcd_i128};
use crate::linalg::{hnf, kernel_saturated, left_kernel, IntLattice, IntMatrix};

/// Sparse integer vector as sorted `(index, coefficient)` pairs.
pub type SparseVec = Vec<(u32, i64)>;

/// A cusp `u/v` with `gcd(u, v) = 1`, `v ≥ 0`; `1/0` is ∞.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Cusp {
    pub u: i64,
    pub v: i64,
}

impl Cusp {
    pub fn new(u: i64, v: i64) -> Self {
        if v == 0 {
            return Cusp { u: 1, v: 0 };
        }
        let g = gcd_i64(u, v);
        let (u, v) = (u / g, v / g);
        if v < 0 {
            Cusp { u: -u, v: -v }
        } else {
            Cusp { u, v }
        }
    }
}

impl std::fmt::Display for Cusp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.v == 0 {
            write!(f, "oo")
        } else {
            write!(f, "{}/{}", self.u, self.v)
        }
    }
}

/// Equivalence of cusps under Γ₀(n): `u₁/v₁ ~ u₂/v₂` iff
/// `s₁v₂ ≡ s₂v₁ (mod gcd(v₁v₂, n))` where `uⱼsⱼ ≡ 1 (mod vⱼ)`.
pub fn cusps_equivalent(n: u64, a: Cusp, b: Cusp) -> bool {
    let s = |c: Cusp| -> i128 {
        match c.v {
            0 => c.u as i128,
            1 => 0,
            v => {
                let (_, x, _) = xgcd_i128(c.u as i128, v as i128);
                x.rem_euclid(v as i128)
            }
        }
    };
    let prod = a.v as i128 * b.v as i128;
    let g = if prod == 0 {
        n as i128
    } else {
        (prod.abs()).gcd(&(n as i128))
    };
    (s(a) * b.v as i128 - s(b) * a.v as i128).rem_euclid(g) == 0
}

/// Canonical cusp representatives `u/v` with `v | n`, ordered by `v` then `u`.
pub fn cusp_representatives(n: u64) -> Vec<Cusp> {
    let mut reps: Vec<Cusp> = Vec::new();
    for v in crate::arith::divisors(n) {
        let v = v as i64;
        for u in 0..v.max(1) {
            if gcd_i64(u, v) != 1 {
                continue;
            }
            let c = Cusp::new(u, v);
            if !reps.iter().any(|&r| cusps_equivalent(n, r, c)) {
                reps.push(c);
            }
        }
    }
    reps
}

/// Integers `(a, b, c', d')` with `a·d' − b·c' = 1`, `c' ≡ c`, `d' ≡ d (mod n)`.
pub fn lift_to_sl2(c: u64, d: u64, n: u64) -> (i64, i64, i64, i64) {
    let n = n as i64;
    let c1 = if c == 0 { n } else { c as i64 };
    let mut d1 = d as i64;
    while gcd_i64(c1, d1) != 1 {
        d1 += n;
    }
    let (_, s, t) = xgcd_i128(d1 as i128, c1 as i128);
    (s as i64, -(t as i64), c1, d1)
}

/// Weight-2 modular symbols for Γ₀(n) with their cuspidal sublattice.
#[derive(Clone, Debug)]
pub struct ModSymSpace {
    level: u64,
    p1: P1List,
    relations: Vec<SparseVec>,
    images: Vec<SparseVec>,
    lifts: Vec<SparseVec>,
    cusps: Vec<Cusp>,
    boundary: IntMatrix,
    cuspidal: IntLattice,
}

/// Build the space of level `n`.
pub fn build_space(n: u64) -> ModSymSpace {
    ModSymSpace::new(n)
}

fn add_into(row: &mut BTreeMap<usize, BigInt>, var: usize, c: &BigInt) {
    let e = row.entry(var).or_insert_with(BigInt::zero);
    *e += c;
    if e.is_zero() {
        row.remove(&var);
    }
}

fn axpy(row: &mut BTreeMap<usize, BigInt>, c: &BigInt, other: &BTreeMap<usize, BigInt>) {
    for (&k, v) in other {
        add_into(row, k, &(c * v));
    }
}

fn make_primitive(row: &mut BTreeMap<usize, BigInt>) {
    let g = row.values().fold(BigInt::zero(), |g, v| g.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for v in row.values_mut() {
            *v /= &g;
        }
    }
}

fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("modular symbol coefficient exceeds 64 bits")
}

impl ModSymSpace {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1);
        let p1 = P1List::new(n);
        let npts = p1.len();
        let pt = |i: usize| -> (i64, i64) {
            let P1Point { c, d } = p1.point(i);
            (c as i64, d as i64)
        };
        let sigma = |i: usize| {
            let (c, d) = pt(i);
            p1.index(d, -c).unwrap()
        };
        let tau = |i: usize| {
            let (c, d) = pt(i);
            p1.index(d, -c - d).unwrap()
        };

        let mut relations: Vec<SparseVec> = Vec::new();

        // two-term relations: each symbol becomes ±(free variable) or zero
        let mut two: Vec<Option<(usize, i64)>> = vec![None; npts];
        let mut done = vec![false; npts];
        let mut rep_symbol: Vec<usize> = Vec::new();
        for i in 0..npts {
            if done[i] {
                continue;
            }
            let j = sigma(i);
            done[i] = true;
            done[j] = true;
            if i == j {
                relations.push(vec![(i as u32, 2)]);
                continue;
            }
            relations.push(vec![(i.min(j) as u32, 1), (i.max(j) as u32, 1)]);
            let var = rep_symbol.len();
            rep_symbol.push(i);
            two[i] = Some((var, 1));
            two[j] = Some((var, -1));
        }
        let nvars = rep_symbol.len();

        // three-term relations expressed in the free variables
        let mut three: Vec<BTreeMap<usize, BigInt>> = Vec::new();
        let mut seen = vec![false; npts];
        for i in 0..npts {
            if seen[i] {
                continue;
            }
            let orbit = [i, tau(i), tau(tau(i))];
            let mut raw: BTreeMap<u32, i64> = BTreeMap::new();
            let mut rel = BTreeMap::new();
            for &s in &orbit {
                seen[s] = true;
                *raw.entry(s as u32).or_insert(0) += 1;
                if let Some((v, sg)) = two[s] {
                    add_into(&mut rel, v, &BigInt::from(sg));
                }
            }
            relations.push(raw.into_iter().collect());
            make_primitive(&mut rel);
            if !rel.is_empty() {
                three.push(rel);
            }
        }

        // sparse Gauss–Jordan with unit pivots
        let mut pivot_row: Vec<Option<usize>> = vec![None; nvars];
        let mut rows: Vec<(usize, BTreeMap<usize, BigInt>)> = Vec::new();
        let mut pending = three;
        loop {
            let mut leftover = Vec::new();
            let mut progress = false;
            for mut rel in pending {
                let hits: Vec<(usize, BigInt)> = rel
                    .iter()
                    .filter(|(k, _)| pivot_row[**k].is_some())
                    .map(|(k, v)| (*k, v.clone()))
                    .collect();
                for (k, c) in hits {
                    let r = &rows[pivot_row[k].unwrap()].1;
                    axpy(&mut rel, &(-c), r);
                }
                make_primitive(&mut rel);
                if rel.is_empty() {
                    continue;
                }
                let unit = rel
                    .iter()
                    .rev()
                    .find(|(_, v)| v.abs().is_one())
                    .map(|(k, v)| (*k, v.clone()));
                let Some((var, c)) = unit else {
                    leftover.push(rel);
                    continue;
                };
                if c.is_negative() {
                    for v in rel.values_mut() {
                        *v = -&*v;
                    }
                }
                for (_, r) in rows.iter_mut() {
                    if let Some(c) = r.get(&var).cloned() {
                        axpy(r, &(-c), &rel);
                    }
                }
                pivot_row[var] = Some(rows.len());
                rows.push((var, rel));
                progress = true;
            }
            pending = leftover;
            if !progress || pending.is_empty() {
                break;
            }
        }

        let free: Vec<usize> = (0..nvars).filter(|&v| pivot_row[v].is_none()).collect();
        let mut free_pos = vec![usize::MAX; nvars];
        for (p, &v) in free.iter().enumerate() {
            free_pos[v] = p;
        }
        let var_image = |v: usize| -> BTreeMap<usize, BigInt> {
            match pivot_row[v] {
                None => BTreeMap::from([(free_pos[v], BigInt::one())]),
                Some(r) => rows[r]
                    .1
                    .iter()
                    .filter(|(k, _)| **k != v)
                    .map(|(k, c)| (free_pos[*k], -c))
                    .collect(),
            }
        };

        // relations without a unit pivot: pass to M = ℤ^free / saturation
        let nfree = free.len();
        let (kt, k_rank, lift_coeffs): (Option<IntMatrix>, usize, IntMatrix) = if pending.is_empty() {
            (None, nfree, IntMatrix::identity(nfree))
        } else {
            let mut l = IntMatrix::zeros(pending.len(), nfree);
            for (i, rel) in pending.iter().enumerate() {
                for (k, c) in rel {
                    l.set(i, free_pos[*k], c.clone());
                }
            }
            let kmat = kernel_saturated(&l);
            let kt = kmat.basis().transpose();
            let (_, u) = hnf(&kt);
            let k = kmat.rank();
            let lifts = u.select_rows(&(0..k).collect::<Vec<_>>());
            (Some(kt), k, lifts)
        };

        let to_m = |free_vec: &BTreeMap<usize, BigInt>| -> SparseVec {
            match &kt {
                None => free_vec.iter().map(|(k, c)| (*k as u32, to_i64(c))).collect(),
                Some(kt) => {
                    let mut acc = vec![BigInt::zero(); k_rank];
                    for (k, c) in free_vec {
                        for (j, a) in acc.iter_mut().enumerate() {
                            let e = kt.get(*k, j);
                            if !e.is_zero() {
                                *a += c * e;
                            }
                        }
                    }
                    acc.iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(j, c)| (j as u32, to_i64(c)))
                        .collect()
                }
            }
        };

        let var_images: Vec<SparseVec> = (0..nvars).map(|v| to_m(&var_image(v))).collect();
        let images: Vec<SparseVec> = two
            .iter()
            .map(|t| match t {
                None => Vec::new(),
                Some((v, s)) => var_images[*v].iter().map(|&(k, c)| (k, c * s)).collect(),
            })
            .collect();

        let lifts: Vec<SparseVec> = (0..k_rank)
            .map(|j| {
                let mut v: Vec<(u32, i64)> = (0..nfree)
                    .filter(|&f| !lift_coeffs.get(j, f).is_zero())
                    .map(|f| (rep_symbol[free[f]] as u32, to_i64(lift_coeffs.get(j, f))))
                    .collect();
                v.sort_unstable();
                v
            })
            .collect();

        let cusps = cusp_representatives(n);
        let cusp_index = |c: Cusp| -> usize {
            cusps
                .iter()
                .position(|&r| cusps_equivalent(n, r, c))
                .expect("cusp representative list is complete")
        };
        let mut boundary = IntMatrix::zeros(k_rank, cusps.len());
        for (j, lift) in lifts.iter().enumerate() {
            let mut row = vec![0i64; cusps.len()];
            for &(s, c) in lift {
                let P1Point { c: sc, d: sd } = p1.point(s as usize);
                let (a, b, c1, d1) = lift_to_sl2(sc, sd, n);
                row[cusp_index(Cusp::new(a, c1))] += c;
                row[cusp_index(Cusp::new(b, d1))] -= c;
            }
            for (i, v) in row.into_iter().enumerate() {
                boundary.set(j, i, BigInt::from(v));
            }
        }
        let cuspidal = left_kernel(&boundary);

        ModSymSpace {
            level: n,
            p1,
            relations,
            images,
            lifts,
            cusps,
            boundary,
            cuspidal,
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn p1(&self) -> &P1List {
        &self.p1
    }

    pub fn generators(&self) -> &[P1Point] {
        self.p1.points()
    }

    /// Relation matrix: one row per two- or three-term relation, columns
    /// indexed by Manin symbols.
    pub fn presentation(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.relations.len(), self.p1.len());
        for (i, r) in self.relations.iter().enumerate() {
            for &(k, c) in r {
                m.set(i, k as usize, BigInt::from(c));
            }
        }
        m
    }

    /// Rank of M, the presentation modulo torsion.
    pub fn rank(&self) -> usize {
        self.lifts.len()
    }

    pub fn full_lattice(&self) -> IntLattice {
        IntLattice::full(self.rank())
    }

    pub fn boundary_matrix(&self) -> &IntMatrix {
        &self.boundary
    }

    pub fn cusps(&self) -> &[Cusp] {
        &self.cusps
    }

    pub fn cusp_count(&self) -> usize {
        self.cusps.len()
    }

    /// S as a sublattice of M = ℤ^rank.
    pub fn cuspidal_lattice(&self) -> &IntLattice {
        &self.cuspidal
    }

    pub fn cuspidal_rank(&self) -> usize {
        self.cuspidal.rank()
    }

    /// Image of the Manin symbol with the given index in M.
    pub fn symbol_image(&self, i: usize) -> &SparseVec {
        &self.images[i]
    }

    /// Each basis vector of M as a combination of Manin symbols.
    pub fn basis_lifts(&self) -> &[SparseVec] {
        &self.lifts
    }

    #[inline]
    pub fn add_symbol(&self, c: i64, d: i64, coeff: i64, acc: &mut [i64]) {
        if let Some(i) = self.p1.index(c, d) {
            for &(k, v) in &self.images[i] {
                acc[k as usize] += coeff * v;
            }
        }
    }

    /// Accumulate `coeff·{0, x}` where `x = num/den` (den = 0 means ∞).
    pub fn add_zero_to(&self, num: i64, den: i64, coeff: i64, acc: &mut [i64]) {
        // {0, ∞} is (0 : 1)
        self.add_symbol(0, 1, coeff, acc);
        if den == 0 {
            return;
        }
        let (mut x, mut y) = if den < 0 { (-num, -den) } else { (num, den) };
        let (mut q2, mut q1) = (1i64, 0i64);
        let mut sign = -1i64;
        loop {
            let a = x.div_euclid(y);
            let r = x.rem_euclid(y);
            let q = a * q1 + q2;
            self.add_symbol(sign * q, q1, coeff, acc);
            q2 = q1;
            q1 = q;
            sign = -sign;
            if r == 0 {
                break;
            }
            x = y;
            y = r;
        }
    }

    /// Accumulate `coeff·{α, β}` for cusps `α = a.0/a.1`, `β = b.0/b.1`.
    pub fn add_modsym(&self, a: (i64, i64), b: (i64, i64), coeff: i64, acc: &mut [i64]) {
        self.add_zero_to(b.0, b.1, coeff, acc);
        self.add_zero_to(a.0, a.1, -coeff, acc);
    }

    /// The pair `{b/d, a/c}` of cusps represented by a Manin symbol.
    pub fn symbol_endpoints(&self, i: usize) -> ((i64, i64), (i64, i64)) {
        let P1Point { c, d } = self.p1.point(i);
        let (a, b, c1, d1) = lift_to_sl2(c, d, self.level);
        ((b, d1), (a, c1))
    }

    /// Matrix on M of the linear map sending the Manin symbol `i` to the
    /// M-vector accumulated by `f(i, acc)`.
    pub fn operator_on_m<F>(&self, target_rank: usize, f: F) -> IntMatrix
    where
        F: Fn(usize, i64, &mut [i64]) + Sync,
    {
        use rayon::prelude::*;
        let rows: Vec<Vec<i64>> = self
            .lifts
            .par_iter()
            .map(|lift| {
                let mut acc = vec![0i64; target_rank];
                for &(s, c) in lift {
                    f(s as usize, c, &mut acc);
                }
                acc
            })
            .collect();
        let mut m = IntMatrix::zeros(self.rank(), target_rank);
        for (i, r) in rows.into_iter().enumerate() {
            for (j, v) in r.into_iter().enumerate() {
                if v != 0 {
                    m.set(i, j, BigInt::from(v));
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modsym::{cusp_count_formula, genus};

    #[test]
    fn spec_ranks() {
        assert_eq!(build_space(11).cuspidal_rank(), 2);
        assert_eq!(build_space(13).cuspidal_rank(), 0);
        let s15 = build_space(15);
        assert_eq!(s15.cuspidal_rank(), 2);
        assert_eq!(s15.cusp_count(), 4);
        assert_eq!(build_space(1).cuspidal_rank(), 0);
    }

    #[test]
    fn ranks_match_genus() {
        for n in 1..=80u64 {
            let s = build_space(n);
            assert_eq!(s.cusp_count() as u64, cusp_count_formula(n), "cusps n={n}");
            assert_eq!(s.cuspidal_rank() as u64, 2 * genus(n), "rank n={n}");
            assert_eq!(s.rank(), s.cuspidal_rank() + s.cusp_count() - 1, "M n={n}");
        }
    }

    #[test]
    fn manin_trick_matches_symbols() {
        let s = build_space(37);
        for i in 0..s.p1().len() {
            let (a, b) = s.symbol_endpoints(i);
            let mut acc = vec![0i64; s.rank()];
            s.add_modsym(a, b, 1, &mut acc);
            let mut expect = vec![0i64; s.rank()];
            for &(k, c) in s.symbol_image(i) {
                expect[k as usize] += c;
            }
            assert_eq!(acc, expect, "symbol {i}");
        }
    }

    #[test]
    fn cusp_equivalence() {
        assert!(!cusps_equivalent(11, Cusp::new(0, 1), Cusp::new(1, 0)));
        assert!(cusps_equivalent(11, Cusp::new(1, 11), Cusp::new(1, 0)));
        assert!(cusps_equivalent(11, Cusp::new(1, 1), Cusp::new(0, 1)));
    }
}
