//! Commutative ℤ-orders given by their regular representation, and the order
//! type 𝒪_f with an explicit multiplication table.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::fp_algebra::{FpAlgebra, MaxIdeal, RingKind};
use crate::arith::{big_mod_u64, large_primes};
use crate::error::{Error, Result};
use crate::linalg::hnf_modular::hnf_mod_d;
use crate::linalg::{det, IntMatrix, ModMatrix, RatMatrix};

/// A commutative ring that is free of rank `k` over ℤ, presented by integer
/// matrices of some generators acting on the right of `ℤ^k` and a vector
/// `unit` with `ℤ^k = unit·ring`.
#[derive(Clone, Debug)]
pub struct RegularRep {
    pub gens: Vec<IntMatrix>,
    pub unit: Vec<BigInt>,
}

impl RegularRep {
    pub fn dim(&self) -> usize {
        self.unit.len()
    }

    pub fn mod_p(&self, p: u64) -> Result<FpAlgebra> {
        let gens = self.gens.iter().map(|g| ModMatrix::from_int(g, p)).collect();
        let unit = self.unit.iter().map(|x| big_mod_u64(x, p)).collect();
        FpAlgebra::new(p, gens, unit)
    }

    /// Words of a monomial ℚ-basis, found modulo a large prime.
    fn monomial_words(&self) -> Result<Vec<Option<(usize, usize)>>> {
        for p in large_primes().take(8) {
            if let Ok(alg) = self.mod_p(p) {
                return Ok(alg.words().to_vec());
            }
        }
        Err(Error::Internal("unit does not generate the ring over ℚ".into()))
    }

    /// Matrices by which the basis elements act on another module, given the
    /// generator matrices there. The basis element `a_j` is the one with
    /// `unit·a_j = e_j`.
    pub fn basis_action(&self, module_gens: &[IntMatrix]) -> Result<Vec<IntMatrix>> {
        let k = self.dim();
        if k == 0 {
            return Ok(Vec::new());
        }
        assert_eq!(module_gens.len(), self.gens.len());
        let words = self.monomial_words()?;
        let dim = module_gens.first().map_or(0, |g| g.rows());
        let mut mono: Vec<IntMatrix> = Vec::with_capacity(k);
        let mut vecs: Vec<Vec<BigInt>> = Vec::with_capacity(k);
        let mut module_mono: Vec<IntMatrix> = Vec::with_capacity(k);
        for w in &words {
            let (m, mm) = match w {
                None => (IntMatrix::identity(k), IntMatrix::identity(dim)),
                Some((parent, g)) => (mono[*parent].mul(&self.gens[*g]), module_mono[*parent].mul(&module_gens[*g])),
            };
            vecs.push(m.vec_mul(&self.unit));
            mono.push(m);
            module_mono.push(mm);
        }
        let w = RatMatrix::from_int(&IntMatrix::from_rows(vecs, k));
        let w_inv = w
            .inverse()
            .ok_or_else(|| Error::Internal("monomial vectors are dependent".into()))?;
        let (winv_num, winv_den) = w_inv.to_common_denominator();
        let mut out = Vec::with_capacity(k);
        for j in 0..k {
            let mut acc = IntMatrix::zeros(dim, dim);
            for (l, m) in module_mono.iter().enumerate() {
                let c = winv_num.get(j, l);
                if !c.is_zero() {
                    acc = acc.add(&m.scale(c));
                }
            }
            let r = RatMatrix::from_int_over(&acc, &winv_den);
            let int = r
                .to_integer()
                .ok_or_else(|| Error::Internal("basis element does not act integrally".into()))?;
            out.push(int);
        }
        Ok(out)
    }

    /// Multiplication matrices of the standard basis vectors.
    pub fn basis_matrices(&self) -> Result<Vec<IntMatrix>> {
        self.basis_action(&self.gens)
    }
}

/// An order of rank `d` with structure constants `table[i][j] = ω_i·ω_j`.
#[derive(Clone, Debug, Serialize)]
pub struct OrderOf {
    pub rank: usize,
    #[serde(serialize_with = "crate::serde_big::ser_table")]
    pub table: Vec<Vec<Vec<BigInt>>>,
    #[serde(serialize_with = "crate::serde_big::ser_vec")]
    pub unit: Vec<BigInt>,
    #[serde(skip)]
    pub rep: RegularRep,
}

impl OrderOf {
    /// Order presented by the regular representation `rep` (generator
    /// matrices are kept so that maximal ideals stay comparable with the
    /// ring they came from).
    pub fn from_rep(rep: RegularRep) -> Result<Self> {
        let mats = rep.basis_matrices()?;
        let d = rep.dim();
        let table = (0..d)
            .map(|i| (0..d).map(|j| mats[j].row_vec(i)).collect())
            .collect();
        Ok(OrderOf {
            rank: d,
            table,
            unit: rep.unit.clone(),
            rep,
        })
    }

    /// Order from structure constants; checks commutativity, associativity
    /// and the unit.
    pub fn from_structure_constants(table: Vec<Vec<Vec<BigInt>>>, unit: Vec<BigInt>) -> Result<Self> {
        let d = unit.len();
        if table.len() != d || table.iter().any(|r| r.len() != d || r.iter().any(|v| v.len() != d)) {
            return Err(Error::Internal("structure constants have the wrong shape".into()));
        }
        let gens: Vec<IntMatrix> = (0..d)
            .map(|j| IntMatrix::from_rows((0..d).map(|i| table[i][j].clone()).collect(), d))
            .collect();
        let o = OrderOf {
            rank: d,
            table,
            unit: unit.clone(),
            rep: RegularRep { gens, unit },
        };
        for i in 0..d {
            for j in 0..d {
                if o.table[i][j] != o.table[j][i] {
                    return Err(Error::Internal("multiplication is not commutative".into()));
                }
                for k in 0..d {
                    let a = o.mul(&o.mul(&basis(d, i), &basis(d, j)), &basis(d, k));
                    let b = o.mul(&basis(d, i), &o.mul(&basis(d, j), &basis(d, k)));
                    if a != b {
                        return Err(Error::Internal("multiplication is not associative".into()));
                    }
                }
            }
            if o.mul(&o.unit, &basis(d, i)) != basis(d, i) {
                return Err(Error::Internal("unit does not act as identity".into()));
            }
        }
        Ok(o)
    }

    pub fn mul(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let d = self.rank;
        let mut out = vec![BigInt::zero(); d];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                for (o, t) in out.iter_mut().zip(&self.table[i][j]) {
                    if !t.is_zero() {
                        *o += &c * t;
                    }
                }
            }
        }
        out
    }

    /// `Tr(ω_i)` via the trace of the multiplication matrix.
    fn traces(&self) -> Vec<BigInt> {
        let d = self.rank;
        (0..d)
            .map(|j| (0..d).fold(BigInt::zero(), |acc, i| acc + &self.table[i][j][i]))
            .collect()
    }

    /// `det(Tr(ω_i ω_j))`.
    pub fn discriminant(&self) -> BigInt {
        let d = self.rank;
        let tr = self.traces();
        let mut form = IntMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let v = self.table[i][j].iter().zip(&tr).fold(BigInt::zero(), |a, (c, t)| a + c * t);
                form.set(i, j, v);
            }
        }
        det(&form)
    }

    pub fn maximal_ideals(&self, p: u64) -> Result<Vec<MaxIdeal>> {
        Ok(self.rep.mod_p(p)?.maximal_ideals(RingKind::Order))
    }

    /// Cotangent dimension `dim_k(𝔪/𝔪²)` of the maximal ideal `m`.
    pub fn cotangent_dim(&self, m: &MaxIdeal) -> Result<usize> {
        let p = m.p;
        let d = self.rank;
        let alg = self.rep.mod_p(p)?;
        let pb = BigInt::from(p);
        // 𝔪 = p·𝒪 + rad(A_𝔪) + (1 − e)·A, lifted to ℤ^d
        let mut gens: Vec<Vec<BigInt>> = m.radical.iter().map(|r| lift(r)).collect();
        let co = alg.matrix_of(&alg.sub(&alg.one(), &m.idempotent));
        gens.extend((0..co.rows).map(|i| lift(co.row(i))));
        let m_basis = hnf_mod_d(&gens, d, &pb);
        let index_m = m_basis.iter().enumerate().fold(BigInt::one(), |a, (i, r)| a * &r[i]);
        if index_m != num_traits::pow(pb.clone(), m.residue_degree) {
            return Err(Error::Internal(format!("maximal ideal has index {index_m}")));
        }
        let p2 = &pb * &pb;
        let mut prods = Vec::with_capacity(d * (d + 1) / 2);
        for i in 0..d {
            for j in i..d {
                prods.push(self.mul(&m_basis[i], &m_basis[j]));
            }
        }
        let sq = hnf_mod_d(&prods, d, &p2);
        let index_sq = sq.iter().enumerate().fold(BigInt::one(), |a, (i, r)| a * &r[i]);
        let mut e = 0usize;
        let mut q = index_sq;
        while (&q % &pb).is_zero() {
            q /= &pb;
            e += 1;
        }
        let f = m.residue_degree;
        let cot = e - f;
        if cot % f != 0 {
            return Err(Error::Internal("cotangent space is not a k-space".into()));
        }
        Ok(cot / f)
    }

    pub fn is_dvr(&self, m: &MaxIdeal) -> Result<bool> {
        Ok(self.cotangent_dim(m)? == 1)
    }

    /// Rational matrix of multiplication by `ω_j`.
    pub fn basis_matrix(&self, j: usize) -> RatMatrix {
        RatMatrix::from_int(&self.rep_matrix(j))
    }

    fn rep_matrix(&self, j: usize) -> IntMatrix {
        let d = self.rank;
        IntMatrix::from_rows((0..d).map(|i| self.table[i][j].clone()).collect(), d)
    }
}

fn basis(d: usize, i: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); d];
    v[i] = BigInt::one();
    v
}

fn lift(v: &[u64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_table(d: usize, f: impl Fn(usize, usize) -> Vec<i64>) -> Vec<Vec<Vec<BigInt>>> {
        (0..d)
            .map(|i| (0..d).map(|j| f(i, j).into_iter().map(BigInt::from).collect()).collect())
            .collect()
    }

    #[test]
    fn integers_are_a_dvr_everywhere() {
        let z = OrderOf::from_structure_constants(int_table(1, |_, _| vec![1]), vec![BigInt::one()]).unwrap();
        assert_eq!(z.discriminant(), BigInt::one());
        for p in [2u64, 3, 5, 7] {
            let ms = z.maximal_ideals(p).unwrap();
            assert_eq!(ms.len(), 1);
            assert_eq!(ms[0].residue_degree, 1);
            assert!(z.is_dvr(&ms[0]).unwrap());
        }
    }

    #[test]
    fn dual_numbers_are_not_a_dvr() {
        // ℤ[x]/(x²): 1·1 = 1, 1·x = x, x·x = 0
        let t = int_table(2, |i, j| match (i, j) {
            (0, 0) => vec![1, 0],
            (0, 1) | (1, 0) => vec![0, 1],
            _ => vec![0, 0],
        });
        let o = OrderOf::from_structure_constants(t, vec![BigInt::one(), BigInt::zero()]).unwrap();
        for p in [2u64, 3] {
            let ms = o.maximal_ideals(p).unwrap();
            assert_eq!(ms.len(), 1);
            assert_eq!(o.cotangent_dim(&ms[0]).unwrap(), 2);
            assert!(!o.is_dvr(&ms[0]).unwrap());
        }
    }

    #[test]
    fn golden_ratio_order() {
        // ℤ[x]/(x² + x − 1), so x² = 1 − x
        let t = int_table(2, |i, j| match (i, j) {
            (0, 0) => vec![1, 0],
            (0, 1) | (1, 0) => vec![0, 1],
            _ => vec![1, -1],
        });
        let o = OrderOf::from_structure_constants(t, vec![BigInt::one(), BigInt::zero()]).unwrap();
        assert_eq!(o.discriminant(), BigInt::from(5));
        let m2 = o.maximal_ideals(2).unwrap();
        assert_eq!(m2.len(), 1);
        assert_eq!(m2[0].residue_degree, 2);
        assert!(o.is_dvr(&m2[0]).unwrap());
        let m5 = o.maximal_ideals(5).unwrap();
        assert_eq!(m5.len(), 1);
        assert!(o.is_dvr(&m5[0]).unwrap());
    }

    #[test]
    fn non_maximal_order_fails_dvr_at_conductor() {
        // ℤ[2i] = ℤ[y]/(y² + 4) is not regular above 2
        let t = int_table(2, |i, j| match (i, j) {
            (0, 0) => vec![1, 0],
            (0, 1) | (1, 0) => vec![0, 1],
            _ => vec![-4, 0],
        });
        let o = OrderOf::from_structure_constants(t, vec![BigInt::one(), BigInt::zero()]).unwrap();
        let m = o.maximal_ideals(2).unwrap();
        assert_eq!(m.len(), 1);
        assert!(!o.is_dvr(&m[0]).unwrap());
        assert!(o.is_dvr(&o.maximal_ideals(3).unwrap()[0]).unwrap());
    }
}
