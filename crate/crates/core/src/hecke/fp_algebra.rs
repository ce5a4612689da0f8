//! Finite commutative 𝔽_p-algebras presented through a faithful cyclic module.
//!
//! The algebra `A` is given by commuting generator matrices acting on the
//! right of `𝔽_p^k` together with a cyclic vector `u` for which `a ↦ u·a` is
//! a bijection `A → 𝔽_p^k`. Elements are stored as their image vectors. A
//! monomial basis found by breadth-first search turns any vector back into a
//! matrix, which also lets the same element act on other modules.

use crate::arith::{inv_mod, mul_mod, sub_mod};
use crate::error::{Error, Result};
use crate::linalg::{ModEchelon, ModMatrix};
use crate::poly::{factor_fp, FpPoly};

/// Which ring a maximal ideal belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RingKind {
    Hecke,
    Order,
}

/// A maximal ideal of a ℤ-order, seen through its mod-p local factor.
#[derive(Clone, Debug)]
pub struct MaxIdeal {
    pub parent: RingKind,
    pub p: u64,
    /// Position among the local factors of `ring / p`.
    pub index: usize,
    /// `[k : 𝔽_p]` for the residue field `k`.
    pub residue_degree: usize,
    /// `dim_{𝔽_p}` of the local factor.
    pub local_dim: usize,
    /// Local idempotent, as a vector of the presentation module.
    pub idempotent: Vec<u64>,
    /// Basis of the radical of the local factor.
    pub radical: Vec<Vec<u64>>,
}

#[derive(Clone, Debug)]
pub struct FpAlgebra {
    p: u64,
    dim: usize,
    gens: Vec<ModMatrix>,
    unit: Vec<u64>,
    /// `(parent, generator)` per monomial; the root is the empty word.
    words: Vec<Option<(usize, usize)>>,
    mono: Vec<ModMatrix>,
    basis_inv: ModMatrix,
}

impl FpAlgebra {
    pub fn new(p: u64, gens: Vec<ModMatrix>, unit: Vec<u64>) -> Result<Self> {
        let dim = unit.len();
        for g in &gens {
            if g.rows != dim || g.cols != dim || g.p != p {
                return Err(Error::Internal("generator shape mismatch".into()));
            }
        }
        let mut words = vec![None];
        let mut mono = vec![ModMatrix::identity(dim, p)];
        let mut vecs = vec![unit.clone()];
        let mut ech = ModEchelon::new(dim, p);
        if dim > 0 && !ech.insert(&unit) {
            return Err(Error::Internal("cyclic vector is zero".into()));
        }
        let mut head = 0;
        while head < vecs.len() && ech.rank() < dim {
            for (gi, g) in gens.iter().enumerate() {
                let w = g.vec_mul(&vecs[head]);
                if ech.insert(&w) {
                    words.push(Some((head, gi)));
                    mono.push(mono[head].mul(g));
                    vecs.push(w);
                    if ech.rank() == dim {
                        break;
                    }
                }
            }
            head += 1;
        }
        if ech.rank() < dim {
            return Err(Error::Internal(format!(
                "vector does not generate the module mod {p} ({} of {dim})",
                ech.rank()
            )));
        }
        let basis_inv = if dim == 0 {
            ModMatrix::zeros(0, 0, p)
        } else {
            ModMatrix::from_rows(&vecs, dim, p)
                .inverse()
                .ok_or_else(|| Error::Internal("monomial basis is singular".into()))?
        };
        Ok(FpAlgebra {
            p,
            dim,
            gens,
            unit,
            words,
            mono,
            basis_inv,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn one(&self) -> Vec<u64> {
        self.unit.clone()
    }

    pub fn gens(&self) -> &[ModMatrix] {
        &self.gens
    }

    /// Image vector of the `i`-th generator.
    pub fn generator(&self, i: usize) -> Vec<u64> {
        self.gens[i].vec_mul(&self.unit)
    }

    /// Monomial words as `(parent, generator)`; `None` is the empty word.
    pub fn words(&self) -> &[Option<(usize, usize)>] {
        &self.words
    }

    /// Coordinates of `x` in the monomial basis listed by [`Self::words`].
    pub fn monomial_coords(&self, x: &[u64]) -> Vec<u64> {
        self.basis_inv.vec_mul(x)
    }

    /// Matrix of multiplication by `x` on the presentation module.
    pub fn matrix_of(&self, x: &[u64]) -> ModMatrix {
        let c = self.monomial_coords(x);
        let mut m = ModMatrix::zeros(self.dim, self.dim, self.p);
        for (cj, mj) in c.iter().zip(&self.mono) {
            m.add_scaled(*cj, mj);
        }
        m
    }

    pub fn mul(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        self.matrix_of(y).vec_mul(x)
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter().zip(y).map(|(&a, &b)| crate::arith::add_mod(a, b, self.p)).collect()
    }

    pub fn sub(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter().zip(y).map(|(&a, &b)| sub_mod(a, b, self.p)).collect()
    }

    pub fn scale(&self, c: u64, x: &[u64]) -> Vec<u64> {
        x.iter().map(|&a| mul_mod(a, c, self.p)).collect()
    }

    /// Matrix of `x ↦ x^p`, which is 𝔽_p-linear on a commutative algebra.
    pub fn frobenius(&self) -> ModMatrix {
        let p = self.p;
        let k = self.dim;
        let mut rows = Vec::with_capacity(k);
        for m in &self.mono {
            // u·m^p, either by repeated vector products or by a matrix power
            let by_vector = (p as u128) * (k as u128) * (k as u128);
            let by_power = 64u128 * (k as u128).pow(3);
            let v = if by_vector <= by_power {
                let mut v = self.unit.clone();
                for _ in 0..p {
                    v = m.vec_mul(&v);
                }
                v
            } else {
                m.pow(p).vec_mul(&self.unit)
            };
            rows.push(v);
        }
        self.basis_inv.mul(&ModMatrix::from_rows(&rows, k, p))
    }

    /// Maximal ideals, one per local factor, in a deterministic order.
    pub fn maximal_ideals(&self, parent: RingKind) -> Vec<MaxIdeal> {
        let p = self.p;
        let k = self.dim;
        if k == 0 {
            return Vec::new();
        }
        let frob = self.frobenius();
        let fixed = frob.sub(&ModMatrix::identity(k, p)).left_kernel();
        let mut idems = vec![self.unit.clone()];
        for b in 0..fixed.rows {
            if idems.len() == fixed.rows {
                break;
            }
            let b = fixed.row(b).to_vec();
            let mut next = Vec::new();
            for e in idems {
                next.extend(self.split_idempotent(&e, &b));
            }
            idems = next;
        }
        assert_eq!(idems.len(), fixed.rows, "Frobenius-fixed algebra not split");
        idems.sort();

        // nilradical = kernel of a high Frobenius power
        let mut power = 1u128;
        let mut fk = frob.clone();
        power *= p as u128;
        while power < k as u128 {
            fk = fk.mul(&frob);
            power *= p as u128;
        }
        idems
            .into_iter()
            .enumerate()
            .map(|(index, e)| {
                let local = self.matrix_of(&e).row_space();
                let images = local.mul(&fk);
                let kern = images.left_kernel();
                let radical_m = kern.mul(&local);
                let radical: Vec<Vec<u64>> = (0..radical_m.rows).map(|i| radical_m.row(i).to_vec()).collect();
                MaxIdeal {
                    parent,
                    p,
                    index,
                    residue_degree: local.rows - radical.len(),
                    local_dim: local.rows,
                    idempotent: e,
                    radical,
                }
            })
            .collect()
    }

    /// Split the idempotent `e` along the 𝔽_p-valued eigenvalues of `b·e`,
    /// where `b^p = b`.
    fn split_idempotent(&self, e: &[u64], b: &[u64]) -> Vec<Vec<u64>> {
        let p = self.p;
        let x = self.mul(b, e);
        let cp = self.matrix_of(&x).charpoly();
        let roots: Vec<u64> = factor_fp(&FpPoly::new(p, cp))
            .expect("charpoly is nonzero")
            .into_iter()
            .filter(|(f, _)| f.deg() == 1)
            .map(|(f, _)| (p - f.coeff(0)) % p)
            .collect();
        if roots.len() <= 1 {
            return vec![e.to_vec()];
        }
        let mut out = Vec::new();
        for &lambda in &roots {
            let mut acc = e.to_vec();
            for &mu in &roots {
                if mu == lambda {
                    continue;
                }
                let factor = self.sub(&x, &self.scale(mu, e));
                let c = inv_mod(sub_mod(lambda, mu, p), p);
                acc = self.scale(c, &self.mul(&acc, &factor));
            }
            if acc.iter().any(|&a| a != 0) {
                out.push(acc);
            }
        }
        out
    }

    /// Replays the monomial basis on another module carrying the same
    /// generators.
    pub fn module_action(&self, gens: &[ModMatrix]) -> ModuleAction {
        assert_eq!(gens.len(), self.gens.len());
        let dim = gens.first().map_or(0, |g| g.rows);
        let mut mono: Vec<ModMatrix> = Vec::with_capacity(self.words.len());
        for w in &self.words {
            let m = match w {
                None => ModMatrix::identity(dim, self.p),
                Some((parent, g)) => mono[*parent].mul(&gens[*g]),
            };
            mono.push(m);
        }
        ModuleAction { dim, p: self.p, mono }
    }

    /// Subspace `A·e` of the local factor, as echelon rows.
    pub fn local_factor(&self, m: &MaxIdeal) -> ModMatrix {
        self.matrix_of(&m.idempotent).row_space()
    }
}

/// Elements of an [`FpAlgebra`] acting on some other module.
#[derive(Clone, Debug)]
pub struct ModuleAction {
    dim: usize,
    p: u64,
    mono: Vec<ModMatrix>,
}

impl ModuleAction {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix_of(&self, alg: &FpAlgebra, x: &[u64]) -> ModMatrix {
        let c = alg.monomial_coords(x);
        let mut m = ModMatrix::zeros(self.dim, self.dim, self.p);
        for (cj, mj) in c.iter().zip(&self.mono) {
            m.add_scaled(*cj, mj);
        }
        m
    }

    /// `dim_k(M_𝔪 / 𝔪 M_𝔪)` where `k` is the residue field of `m`.
    pub fn fiber_dim(&self, alg: &FpAlgebra, m: &MaxIdeal) -> usize {
        let local = self.matrix_of(alg, &m.idempotent).row_space();
        if local.rows == 0 {
            return 0;
        }
        let mut ech = ModEchelon::new(self.dim, self.p);
        for r in &m.radical {
            let img = local.mul(&self.matrix_of(alg, r));
            for i in 0..img.rows {
                ech.insert(img.row(i));
            }
        }
        let quotient = local.rows - ech.rank();
        assert_eq!(quotient % m.residue_degree, 0, "fiber is not a k-space");
        quotient / m.residue_degree
    }
}

impl FpAlgebra {
    /// `dim_k (A[𝔪])`, the 𝔪-torsion of the algebra itself.
    pub fn socle_dim(&self, m: &MaxIdeal) -> usize {
        let local = self.local_factor(m);
        if m.radical.is_empty() {
            return local.rows / m.residue_degree;
        }
        let mut blocks = local.mul(&self.matrix_of(&m.radical[0]));
        for r in &m.radical[1..] {
            blocks = blocks.hstack(&local.mul(&self.matrix_of(r)));
        }
        let k = blocks.left_kernel().rows;
        assert_eq!(k % m.residue_degree, 0, "socle is not a k-space");
        k / m.residue_degree
    }

    /// Residue of `x` modulo `m` when it lies in the prime field.
    pub fn residue_value(&self, x: &[u64], m: &MaxIdeal) -> Option<u64> {
        let p = self.p;
        // x·e acts as x on the local factor and as 0 elsewhere
        let xe = self.mul(x, &m.idempotent);
        let cp = self.matrix_of(&xe).charpoly();
        let factors = factor_fp(&FpPoly::new(p, cp)).expect("charpoly is nonzero");
        let nonzero: Vec<_> = factors.iter().filter(|(f, _)| !(f.deg() == 1 && f.coeff(0) == 0)).collect();
        match nonzero.as_slice() {
            [] => Some(0),
            [(f, mult)] if f.deg() == 1 && *mult as usize == m.local_dim => Some((p - f.coeff(0)) % p),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(p: u64, k: usize, e: &[u64]) -> ModMatrix {
        ModMatrix::from_rows(&e.chunks(k).map(|c| c.to_vec()).collect::<Vec<_>>(), k, p)
    }

    #[test]
    fn dual_numbers_are_local() {
        // 𝔽_p[x]/(x²) on basis (1, x): right multiplication by x sends 1 ↦ x, x ↦ 0
        for p in [2u64, 3, 5] {
            let x = mat(p, 2, &[0, 1, 0, 0]);
            let a = FpAlgebra::new(p, vec![x], vec![1, 0]).unwrap();
            let ms = a.maximal_ideals(RingKind::Order);
            assert_eq!(ms.len(), 1);
            assert_eq!(ms[0].residue_degree, 1);
            assert_eq!(ms[0].radical.len(), 1);
            assert_eq!(a.socle_dim(&ms[0]), 1);
        }
    }

    #[test]
    fn split_and_inert_quadratics() {
        // ℤ[x]/(x² + x − 1) mod 2 is 𝔽₄; mod 11 it splits (disc 5 is a square)
        let companion = |p: u64| mat(p, 2, &[0, 1, 1, p - 1]);
        let f4 = FpAlgebra::new(2, vec![companion(2)], vec![1, 0]).unwrap();
        let ms = f4.maximal_ideals(RingKind::Order);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].residue_degree, 2);
        let split = FpAlgebra::new(11, vec![companion(11)], vec![1, 0]).unwrap();
        let ms = split.maximal_ideals(RingKind::Order);
        assert_eq!(ms.len(), 2);
        let sum = split.add(&ms[0].idempotent, &ms[1].idempotent);
        assert_eq!(sum, split.one());
        assert!(split.mul(&ms[0].idempotent, &ms[1].idempotent).iter().all(|&c| c == 0));
        for m in &ms {
            assert_eq!(split.mul(&m.idempotent, &m.idempotent), m.idempotent);
        }
    }

    #[test]
    fn fiber_of_regular_module_is_one() {
        let p = 3;
        let x = mat(p, 3, &[0, 1, 0, 0, 0, 1, 0, 0, 0]);
        let a = FpAlgebra::new(p, vec![x.clone()], vec![1, 0, 0]).unwrap();
        let act = a.module_action(&[x]);
        for m in a.maximal_ideals(RingKind::Order) {
            assert_eq!(act.fiber_dim(&a, &m), 1);
            assert_eq!(a.socle_dim(&m), 1);
        }
    }
}
