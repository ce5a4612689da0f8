//! Splitting the new part of S into newform classes.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::algebra::HeckeAlgebra;
use super::idempotent::{idempotent_by_crt, idempotent_by_projection, restrict_idempotent, Idempotent};
use crate::arith::{large_primes, primes_up_to};
use crate::error::{Error, Result};
use crate::linalg::{kernel_of_map, IntLattice, IntMatrix, ModMatrix, RatMatrix};
use crate::modsym::{hecke, new_lattice, ModSymSpace};
use crate::poly::{charpoly_int, factor_q, squarefree_int, IntPoly};

/// Cuspidal rank up to which idempotents come from `crt_split` and the
/// isotypic lattices are saturated explicitly.
pub const SMALL_RANK: usize = 160;
/// Largest class dimension for which eigenvalue coordinates are solved.
pub const EIGEN_DIM_LIMIT: usize = 40;
/// Primes `ℓ` whose eigenvalues are previewed.
pub const EIGEN_PRIMES: u64 = 29;
const SEPARATOR_BUDGET: usize = 1000;
const SPIRAL_WIDTH: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassLabel {
    pub level: u64,
    /// 1-based position in the canonical order.
    pub index: usize,
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.level, self.index)
    }
}

impl Serialize for ClassLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug)]
pub struct NewformClass {
    pub label: ClassLabel,
    pub dim: usize,
    /// Minimal polynomial of the separating element on the class.
    pub field_poly: IntPoly,
    /// `e_f` on S.
    pub e_s: Idempotent,
    /// `e_f` on the orbit lattice of 𝕋.
    pub e_t: Idempotent,
    /// `(ℓ, Tr_{K_f/ℚ}(a_ℓ))` for every generator of 𝕋.
    pub traces: Vec<(u64, BigInt)>,
    /// `(ℓ, coordinates of a_ℓ in the power basis of a root of field_poly)`.
    pub eigenvalues: Vec<(u64, Vec<BigRational>)>,
    /// `S[e_{f⊥}]`, saturated of rank `2·dim` (small levels only).
    pub isotypic: Option<IntLattice>,
}

impl NewformClass {
    pub fn e_perp(&self) -> Idempotent {
        self.e_s.complement()
    }

    pub fn trace(&self, l: u64) -> Option<&BigInt> {
        self.traces.iter().find(|(x, _)| *x == l).map(|(_, t)| t)
    }

    pub fn eigenvalue(&self, l: u64) -> Option<&[BigRational]> {
        self.eigenvalues.iter().find(|(x, _)| *x == l).map(|(_, c)| c.as_slice())
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub level: u64,
    /// Coefficients of the separating element in the generators of 𝕋.
    pub separator: Vec<i64>,
    pub new_rank: usize,
    pub classes: Vec<NewformClass>,
}

/// Candidate coefficient vectors: single generators first, then a spiral
/// of integer combinations of the first few generators.
fn separator_candidates(gens: usize) -> impl Iterator<Item = Vec<i64>> {
    let singles = (0..gens).map(move |i| {
        let mut c = vec![0; gens];
        c[i] = 1;
        c
    });
    let k = gens.min(SPIRAL_WIDTH);
    let combos = (1i64..).flat_map(move |radius| {
        let side = (2 * radius + 1) as usize;
        let total = side.pow(k as u32);
        (0..total).filter_map(move |mut idx| {
            let mut c = vec![0i64; gens];
            for slot in c.iter_mut().take(k) {
                *slot = (idx % side) as i64 - radius;
                idx /= side;
            }
            let head = &c[..k];
            let on_shell = head.iter().any(|x| x.abs() == radius);
            let support = head.iter().filter(|x| **x != 0).count();
            (on_shell && support >= 2).then_some(c)
        })
    });
    singles.chain(combos).take(SEPARATOR_BUDGET)
}

fn combination(alg: &HeckeAlgebra, coeffs: &[i64]) -> IntMatrix {
    let r = alg.cuspidal_rank();
    let mut t = IntMatrix::zeros(r, r);
    for (c, g) in coeffs.iter().zip(alg.generators()) {
        if *c != 0 {
            t = t.add(&g.matrix.scale(&BigInt::from(*c)));
        }
    }
    t
}

fn multiplicity(f: &IntPoly, g: &IntPoly) -> u32 {
    let mut m = 0;
    let mut rest = f.clone();
    while let Some(q) = rest.div_exact(g) {
        rest = q;
        m += 1;
    }
    m
}

fn radical(f: &IntPoly) -> IntPoly {
    squarefree_int(f).into_iter().fold(IntPoly::one(), |acc, (g, _)| acc.mul(&g))
}

/// The new factors of `t` when `t` separates the classes: every irreducible
/// factor of its charpoly on the new part occurs exactly twice there and
/// exactly twice on S.
fn separated_factors(chi_new: &IntPoly, chi_s: &IntPoly) -> Result<Option<Vec<IntPoly>>> {
    let parts = squarefree_int(chi_new);
    if parts.iter().any(|(_, m)| *m != 2) {
        return Ok(None);
    }
    let rad_new = radical(chi_new);
    if multiplicity(chi_s, &rad_new) != 2 || chi_s.div_exact(&rad_new.mul(&rad_new)).is_some_and(|rest| {
        crate::poly::gcd_int(&rest, &rad_new).deg() > 0
    }) {
        return Ok(None);
    }
    let fac = factor_q(&rad_new)?;
    Ok(Some(fac.factors.into_iter().map(|(g, _)| g).collect()))
}

/// Canonical order: dimension, then the trace vector.
fn sort_key(c: &NewformClass) -> (usize, Vec<BigInt>) {
    (c.dim, c.traces.iter().map(|(_, t)| t.clone()).collect())
}

/// Coordinates of `y·X` in the basis `y, y·t, …, y·t^{d−1}`.
fn krylov_coordinates(y: &[BigInt], t: &IntMatrix, x: &IntMatrix, d: usize) -> Result<Vec<BigRational>> {
    let mut rows = vec![y.to_vec()];
    for k in 1..d {
        let next = t.vec_mul(&rows[k - 1]);
        rows.push(next);
    }
    let r = y.len();
    let k = RatMatrix::from_int(&IntMatrix::from_rows(rows.clone(), r));
    let kt = RatMatrix::from_int(&IntMatrix::from_rows(rows, r).transpose());
    let gram_inv = k
        .mul(&kt)
        .inverse()
        .ok_or_else(|| Error::Internal("eigenvector orbit is degenerate".into()))?;
    let target = x.vec_mul(y);
    let tv: Vec<BigRational> = target.into_iter().map(BigRational::from_integer).collect();
    let proj = kt.vec_mul(&tv);
    let coords = gram_inv.vec_mul(&proj);
    // confirm the solution is exact
    let back = k.vec_mul(&coords);
    if back != tv {
        return Err(Error::Internal("eigenvalue is not a polynomial in the separator".into()));
    }
    Ok(coords)
}

fn trace_product(a: &IntMatrix, b: &IntMatrix) -> BigInt {
    let n = a.rows();
    let mut acc = BigInt::zero();
    for i in 0..n {
        for k in 0..n {
            let x = a.get(i, k);
            if !x.is_zero() {
                acc += x * b.get(k, i);
            }
        }
    }
    acc
}

/// Generators of 𝕋 commute with `e` (exactly at small rank, modulo a
/// few large primes otherwise).
fn check_commutes(alg: &HeckeAlgebra, e: &Idempotent, exact: bool) -> Result<()> {
    for g in alg.generators() {
        let ok = if exact {
            e.commutes_with(&g.matrix)
        } else {
            large_primes().skip(100).take(3).all(|p| {
                let Some(em) = e.mod_p(p) else { return true };
                let gm = ModMatrix::from_int(&g.matrix, p);
                em.mul(&gm) == gm.mul(&em)
            })
        };
        if !ok {
            return Err(Error::InvariantViolation(format!("e_f does not commute with {}", g.name)));
        }
    }
    Ok(())
}

/// Decomposes the new part of S into newform classes.
pub fn decompose_new(space: &ModSymSpace, alg: &HeckeAlgebra) -> Result<Decomposition> {
    let n = space.level();
    let r = alg.cuspidal_rank();
    let new = new_lattice(space)?;
    let new_rank = new.rank();
    if new_rank == 0 {
        return Ok(Decomposition {
            level: n,
            separator: Vec::new(),
            new_rank,
            classes: Vec::new(),
        });
    }
    let whole_is_new = new_rank == r;
    let mut chosen = None;
    for coeffs in separator_candidates(alg.generators().len()) {
        let t = combination(alg, &coeffs);
        let chi_s = charpoly_int(&t)?;
        let chi_new = if whole_is_new {
            chi_s.clone()
        } else {
            charpoly_int(&new.restrict_operator(&t)?)?
        };
        if let Some(factors) = separated_factors(&chi_new, &chi_s)? {
            chosen = Some((coeffs, t, chi_s, factors));
            break;
        }
    }
    let Some((separator, t, chi_s, factors)) = chosen else {
        return Err(Error::SeparationFailure(SEPARATOR_BUDGET));
    };
    let rad_s = radical(&chi_s);
    let small = r <= SMALL_RANK;
    let eigen_ops: Vec<(u64, IntMatrix)> = if factors.iter().any(|g| g.deg() <= EIGEN_DIM_LIMIT) {
        primes_up_to(EIGEN_PRIMES)
            .into_iter()
            .map(|l| Ok((l, hecke(space, l)?.matrix)))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let mut classes = Vec::with_capacity(factors.len());
    for g in factors {
        let d = g.deg();
        let c = rad_s
            .div_exact(&g)
            .ok_or_else(|| Error::Internal("class factor does not divide the radical".into()))?;
        let e_s = if small {
            idempotent_by_crt(&t, &g, &c)?
        } else {
            idempotent_by_projection(&t, &g, &c, 2 * d, n)?
        };
        if e_s.rank() != 2 * d {
            return Err(Error::InvariantViolation(format!("class idempotent has rank {}", e_s.rank())));
        }
        check_commutes(alg, &e_s, small)?;
        let e_t = restrict_idempotent(alg.lattice(), &e_s)?;
        let two_den = &e_s.den * 2;
        let traces = alg
            .generators()
            .iter()
            .map(|op| {
                let (q, rem) = trace_product(&op.matrix, &e_s.num).div_rem(&two_den);
                if !rem.is_zero() {
                    return Err(Error::InvariantViolation(format!("trace of a_{} is not integral", op.name)));
                }
                let l = match op.name {
                    crate::modsym::OperatorName::T(l) | crate::modsym::OperatorName::U(l) => l,
                    _ => unreachable!("generators are Hecke operators"),
                };
                Ok((l, q))
            })
            .collect::<Result<Vec<_>>>()?;
        let eigenvalues = if d <= EIGEN_DIM_LIMIT {
            let y = (0..r)
                .map(|i| e_s.num.row_vec(i))
                .find(|row| row.iter().any(|x| !x.is_zero()))
                .expect("nonzero idempotent");
            eigen_ops
                .iter()
                .map(|(l, m)| Ok((*l, krylov_coordinates(&y, &t, m, d)?)))
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        let isotypic = if small {
            let s_f = kernel_of_map(&IntLattice::full(r), &e_s.complement().to_rational());
            if s_f.rank() != 2 * d {
                return Err(Error::InvariantViolation("isotypic lattice has the wrong rank".into()));
            }
            Some(s_f)
        } else {
            None
        };
        classes.push(NewformClass {
            label: ClassLabel { level: n, index: 0 },
            dim: d,
            field_poly: g,
            e_s,
            e_t,
            traces,
            eigenvalues,
            isotypic,
        });
    }
    classes.sort_by_key(sort_key);
    for (i, c) in classes.iter_mut().enumerate() {
        c.label.index = i + 1;
    }
    if classes.iter().map(|c| 2 * c.dim).sum::<usize>() != new_rank {
        return Err(Error::InvariantViolation("class dimensions do not fill the new part".into()));
    }
    Ok(Decomposition {
        level: n,
        separator,
        new_rank,
        classes,
    })
}

/// Rational number as a polynomial coordinate vector of length one.
pub fn rational_scalar(x: i64) -> Vec<BigRational> {
    vec![BigRational::from_integer(BigInt::from(x))]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::hecke::build_hecke_algebra;
    use crate::modsym::build_space;

    fn decompose(n: u64) -> Decomposition {
        let s = build_space(n);
        let t = build_hecke_algebra(&s).unwrap();
        decompose_new(&s, &t).unwrap()
    }

    #[test]
    fn level_eleven_is_one_class() {
        let d = decompose(11);
        assert_eq!(d.classes.len(), 1);
        let c = &d.classes[0];
        assert_eq!(c.dim, 1);
        assert_eq!(c.e_s, Idempotent::identity(2));
        assert_eq!(c.eigenvalue(2).unwrap(), rational_scalar(-2).as_slice());
        assert_eq!(c.eigenvalue(3).unwrap(), rational_scalar(-1).as_slice());
        assert_eq!(c.label.to_string(), "11.1");
    }

    #[test]
    fn idempotents_are_orthogonal_and_complete() {
        for n in [33u64, 35, 37, 43, 65] {
            let d = decompose(n);
            let r = build_space(n).cuspidal_rank();
            let mut sum = RatMatrix::zeros(r, r);
            for (i, a) in d.classes.iter().enumerate() {
                let ea = a.e_s.to_rational();
                sum = sum.add(&ea);
                for b in d.classes.iter().skip(i + 1) {
                    assert!(ea.mul(&b.e_s.to_rational()).is_zero(), "level {n}");
                }
                assert!(a.e_t.is_idempotent());
                assert_eq!(a.e_t.rank(), a.dim);
            }
            assert_eq!(2 * d.classes.iter().map(|c| c.dim).sum::<usize>(), d.new_rank);
            // new classes plus old part: sum is the projection onto the new space
            assert!(sum.is_idempotent());
        }
    }

    #[test]
    fn level_23_quadratic_class() {
        let d = decompose(23);
        assert_eq!(d.classes.len(), 1);
        assert_eq!(d.classes[0].dim, 2);
        // Tr(a_2) = −1 for x² + x − 1
        assert_eq!(d.classes[0].trace(2), Some(&BigInt::from(-1)));
    }

    #[test]
    fn one_is_sum_at_prime_level() {
        let d = decompose(37);
        let mut sum = RatMatrix::zeros(4, 4);
        for c in &d.classes {
            sum = sum.add(&c.e_s.to_rational());
        }
        assert_eq!(sum, RatMatrix::identity(4));
        assert!(d.classes.iter().all(|c| !c.e_s.den.is_zero() && c.e_s.den >= BigInt::one()));
    }
}
