//! Finite-rank sublattices of ℤ^d (and of ℚ^d after clearing denominators),
//! stored by canonical HNF basis so that equal lattices compare equal.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::det::det;
use super::hnf::{hnf, hnf_basis, pivot_columns};
use super::matrix::{IntMatrix, RatMatrix};
use super::snf::snf;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntLattice {
    ambient_dim: usize,
    basis: IntMatrix,
    pivots: Vec<usize>,
}

/// Structure of a finitely generated quotient `L / L_sub`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuotientStructure {
    /// Elementary divisors greater than one, ascending divisibility chain.
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl QuotientStructure {
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            None
        } else {
            Some(self.torsion.iter().fold(BigInt::one(), |a, b| a * b))
        }
    }
}

impl IntLattice {
    /// Lattice generated by the rows of `gens`.
    pub fn from_generators(gens: &IntMatrix) -> Self {
        let basis = hnf_basis(gens);
        let pivots = pivot_columns(&basis);
        IntLattice {
            ambient_dim: gens.cols(),
            basis,
            pivots,
        }
    }

    pub fn from_rows(ambient_dim: usize, rows: Vec<Vec<BigInt>>) -> Self {
        Self::from_generators(&IntMatrix::from_rows(rows, ambient_dim))
    }

    /// Wrap a matrix already known to be in canonical HNF with no zero rows.
    pub fn from_hnf_unchecked(basis: IntMatrix) -> Self {
        debug_assert!(super::hnf::is_hnf(&basis));
        let pivots = pivot_columns(&basis);
        debug_assert_eq!(pivots.len(), basis.rows());
        IntLattice {
            ambient_dim: basis.cols(),
            basis,
            pivots,
        }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        IntLattice {
            ambient_dim,
            basis: IntMatrix::zeros(0, ambient_dim),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        IntLattice {
            ambient_dim,
            basis: IntMatrix::identity(ambient_dim),
            pivots: (0..ambient_dim).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    /// Integer coordinates of `v` in the basis, or `None` when `v ∉ L`.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.ambient_dim);
        let mut rest = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for (i, &pc) in self.pivots.iter().enumerate() {
            let piv = self.basis.get(i, pc);
            let (q, r) = rest[pc].div_rem(piv);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for (x, b) in rest.iter_mut().zip(self.basis.row(i)) {
                    if !b.is_zero() {
                        *x -= &q * b;
                    }
                }
            }
            coords.push(q);
        }
        if rest.iter().all(Zero::is_zero) {
            Some(coords)
        } else {
            None
        }
    }

    /// Rational coordinates of `v` in the basis, or `None` when `v` lies
    /// outside the ℚ-span.
    pub fn rational_coordinates(&self, v: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(v.len(), self.ambient_dim);
        let mut rest = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for (i, &pc) in self.pivots.iter().enumerate() {
            let piv = BigRational::from_integer(self.basis.get(i, pc).clone());
            let q = &rest[pc] / &piv;
            if !q.is_zero() {
                for (x, b) in rest.iter_mut().zip(self.basis.row(i)) {
                    if !b.is_zero() {
                        *x -= &q * BigRational::from_integer(b.clone());
                    }
                }
            }
            coords.push(q);
        }
        if rest.iter().all(Zero::is_zero) {
            Some(coords)
        } else {
            None
        }
    }

    /// Coordinates (rows) of every basis vector of `other` in this basis.
    pub fn coordinate_matrix(&self, other: &IntLattice) -> Result<IntMatrix> {
        if other.ambient_dim != self.ambient_dim {
            return Err(Error::AmbientMismatch(self.ambient_dim, other.ambient_dim));
        }
        let mut rows = Vec::with_capacity(other.rank());
        for i in 0..other.rank() {
            rows.push(self.coordinates(other.basis.row(i)).ok_or(Error::NotSublattice)?);
        }
        Ok(IntMatrix::from_rows(rows, self.rank()))
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &IntLattice) -> bool {
        other.ambient_dim == self.ambient_dim
            && (0..other.rank()).all(|i| self.contains(other.basis.row(i)))
    }

    /// Vector with the given coordinates.
    pub fn combination(&self, coords: &[BigInt]) -> Vec<BigInt> {
        self.basis.vec_mul(coords)
    }

    /// Image of the lattice under `x ↦ x·M`.
    pub fn image(&self, m: &IntMatrix) -> IntLattice {
        assert_eq!(m.rows(), self.ambient_dim);
        IntLattice::from_generators(&self.basis.mul(m))
    }

    /// Matrix of an operator `x ↦ x·M` (ambient coordinates) restricted to
    /// this lattice, in basis coordinates. Fails if the lattice is not stable.
    pub fn restrict_operator(&self, m: &IntMatrix) -> Result<IntMatrix> {
        let img = self.basis.mul(m);
        let mut rows = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            rows.push(
                self.coordinates(img.row(i))
                    .ok_or_else(|| Error::NotStable("operator does not preserve lattice".into()))?,
            );
        }
        Ok(IntMatrix::from_rows(rows, self.rank()))
    }

    /// Smallest saturated lattice containing this one: (L ⊗ ℚ) ∩ ℤ^d.
    pub fn saturation(&self) -> IntLattice {
        if self.rank() == 0 {
            return self.clone();
        }
        let annihilator = kernel_saturated(&self.basis);
        if annihilator.rank() == 0 {
            return IntLattice::full(self.ambient_dim);
        }
        kernel_saturated(annihilator.basis())
    }

    pub fn is_saturated(&self) -> bool {
        self.saturation() == *self
    }

    /// Basis of the annihilator {w : B·wᵀ = 0}.
    pub fn annihilator(&self) -> IntLattice {
        kernel_saturated(&self.basis)
    }

    pub fn to_text(&self) -> String {
        self.basis.to_text()
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let m = IntMatrix::from_text(s)?;
        Ok(IntLattice::from_generators(&m))
    }
}

/// Saturated integer kernel {v ∈ ℤ^cols : M·vᵀ = 0}.
pub fn kernel_saturated(m: &IntMatrix) -> IntLattice {
    let cols = m.cols();
    if m.rows() == 0 || m.is_zero() {
        return IntLattice::full(cols);
    }
    let (h, u) = hnf(&m.transpose());
    let rank = (0..h.rows()).take_while(|&i| !h.row(i).iter().all(Zero::is_zero)).count();
    let kernel_rows: Vec<usize> = (rank..h.rows()).collect();
    let gens = u.select_rows(&kernel_rows);
    IntLattice::from_generators(&gens)
}

/// Saturated left kernel {x ∈ ℤ^rows : x·M = 0}.
pub fn left_kernel(m: &IntMatrix) -> IntLattice {
    kernel_saturated(&m.transpose())
}

pub fn lattice_sum(l1: &IntLattice, l2: &IntLattice) -> Result<IntLattice> {
    if l1.ambient_dim != l2.ambient_dim {
        return Err(Error::AmbientMismatch(l1.ambient_dim, l2.ambient_dim));
    }
    Ok(IntLattice::from_generators(&l1.basis.vstack(&l2.basis)))
}

pub fn lattice_intersect(l1: &IntLattice, l2: &IntLattice) -> Result<IntLattice> {
    if l1.ambient_dim != l2.ambient_dim {
        return Err(Error::AmbientMismatch(l1.ambient_dim, l2.ambient_dim));
    }
    if l1.rank() == 0 || l2.rank() == 0 {
        return Ok(IntLattice::zero(l1.ambient_dim));
    }
    // (a, b) with a·B1 + b·B2 = 0 gives a·B1 ∈ L1 ∩ L2
    let stacked = l1.basis.vstack(&l2.basis);
    let k = left_kernel(&stacked);
    if k.rank() == 0 {
        return Ok(IntLattice::zero(l1.ambient_dim));
    }
    let first: Vec<usize> = (0..l1.rank()).collect();
    let a = k.basis().select_cols(&first);
    Ok(IntLattice::from_generators(&a.mul(&l1.basis)))
}

/// Index [L : L_sub] for a full-rank sublattice.
pub fn sublattice_index(l_sub: &IntLattice, l: &IntLattice) -> Result<BigInt> {
    let coords = l.coordinate_matrix(l_sub)?;
    if l_sub.rank() != l.rank() {
        return Err(Error::InfiniteIndex {
            sub: l_sub.rank(),
            full: l.rank(),
        });
    }
    if l.rank() == 0 {
        return Ok(BigInt::one());
    }
    Ok(det(&coords).abs())
}

/// Elementary divisors of L / L_sub, with rank drop reported as free rank.
pub fn quotient_invariants(l: &IntLattice, l_sub: &IntLattice) -> Result<QuotientStructure> {
    let coords = l.coordinate_matrix(l_sub)?;
    let factors = snf(&coords);
    let free_rank = l.rank() - factors.len();
    Ok(QuotientStructure {
        torsion: factors.into_iter().filter(|d| !d.is_one()).collect(),
        free_rank,
    })
}

/// L[e] = L ∩ Ker(x ↦ x·e) for an idempotent `e` acting on the ambient space.
pub fn idempotent_kernel_sublattice(l: &IntLattice, e: &RatMatrix) -> Result<IntLattice> {
    if e.rows() != l.ambient_dim || e.cols() != l.ambient_dim {
        return Err(Error::AmbientMismatch(l.ambient_dim, e.rows()));
    }
    if !e.is_idempotent() {
        return Err(Error::NotIdempotent);
    }
    Ok(kernel_of_map(l, e))
}

/// {x ∈ L : x·A = 0} for a rational matrix A on the ambient space
/// (saturated in L).
pub fn kernel_of_map(l: &IntLattice, a: &RatMatrix) -> IntLattice {
    if l.rank() == 0 {
        return l.clone();
    }
    let (num, _den) = a.to_common_denominator();
    let images = l.basis.mul(&num);
    let k = left_kernel(&images);
    if k.rank() == 0 {
        return IntLattice::zero(l.ambient_dim);
    }
    IntLattice::from_generators(&k.basis().mul(&l.basis))
}

/// L ∩ V where V is the ℚ-span of the rows of `span`.
pub fn intersect_with_span(l: &IntLattice, span: &IntMatrix) -> IntLattice {
    assert_eq!(span.cols(), l.ambient_dim);
    if l.rank() == 0 {
        return l.clone();
    }
    let ann = kernel_saturated(span);
    if ann.rank() == 0 {
        return l.clone();
    }
    // x = c·B lies in V iff c·B·annᵀ = 0
    let images = l.basis.mul(&ann.basis().transpose());
    let k = left_kernel(&images);
    if k.rank() == 0 {
        return IntLattice::zero(l.ambient_dim);
    }
    IntLattice::from_generators(&k.basis().mul(&l.basis))
}

/// Scale a rational row vector to a primitive integer vector (same ℚ-line).
pub fn primitive_integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    let mut den = BigInt::one();
    for x in v {
        den = den.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(d: usize, rows: &[&[i64]]) -> IntLattice {
        IntLattice::from_rows(
            d,
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_saturated(&IntMatrix::identity(2)).rank(), 0);
        assert_eq!(kernel_saturated(&IntMatrix::zeros(1, 2)), IntLattice::full(2));
        let k = kernel_saturated(&IntMatrix::from_i64(1, 2, &[2, 4]));
        assert_eq!(k, lat(2, &[&[2, -1]]));
    }

    #[test]
    fn sum_examples() {
        let a = lat(2, &[&[2, 0], &[0, 2]]);
        let b = lat(2, &[&[1, 1]]);
        let s = lattice_sum(&a, &b).unwrap();
        assert_eq!(s, lat(2, &[&[1, 1], &[0, 2]]));
        assert_eq!(sublattice_index(&s, &IntLattice::full(2)).unwrap(), BigInt::from(2));
        assert_eq!(lattice_sum(&a, &IntLattice::zero(2)).unwrap(), a);
        assert_eq!(lattice_sum(&a, &a).unwrap(), a);
        assert!(lattice_sum(&a, &IntLattice::zero(3)).is_err());
    }

    #[test]
    fn intersect_examples() {
        let x = lat(2, &[&[1, 0]]);
        let y = lat(2, &[&[0, 1]]);
        assert_eq!(lattice_intersect(&x, &y).unwrap(), IntLattice::zero(2));
        assert_eq!(lattice_intersect(&x, &x).unwrap(), x);
        let xeven = lat(2, &[&[2, 0], &[0, 1]]);
        let yeven = lat(2, &[&[1, 0], &[0, 2]]);
        assert_eq!(lattice_intersect(&xeven, &yeven).unwrap(), lat(2, &[&[2, 0], &[0, 2]]));
    }

    #[test]
    fn index_examples() {
        let z2 = IntLattice::full(2);
        assert_eq!(sublattice_index(&lat(2, &[&[2, 0], &[0, 2]]), &z2).unwrap(), BigInt::from(4));
        assert_eq!(sublattice_index(&z2, &z2).unwrap(), BigInt::one());
        assert_eq!(sublattice_index(&lat(2, &[&[1, 2], &[3, 4]]), &z2).unwrap(), BigInt::from(2));
        assert!(matches!(
            sublattice_index(&lat(2, &[&[1, 0]]), &z2),
            Err(Error::InfiniteIndex { .. })
        ));
        assert!(matches!(
            sublattice_index(&z2, &lat(2, &[&[2, 0], &[0, 2]])),
            Err(Error::NotSublattice)
        ));
    }

    #[test]
    fn quotient_examples() {
        let z2 = IntLattice::full(2);
        let q = quotient_invariants(&z2, &lat(2, &[&[2, 0], &[0, 2]])).unwrap();
        assert_eq!(q.torsion, vec![BigInt::from(2), BigInt::from(2)]);
        assert!(quotient_invariants(&z2, &z2).unwrap().torsion.is_empty());
        let q = quotient_invariants(&z2, &lat(2, &[&[1, 2], &[3, 4]])).unwrap();
        assert_eq!(q.torsion, vec![BigInt::from(2)]);
        let q = quotient_invariants(&z2, &lat(2, &[&[2, 0]])).unwrap();
        assert_eq!(q.free_rank, 1);
        assert_eq!(q.torsion, vec![BigInt::from(2)]);
    }

    #[test]
    fn idempotent_examples() {
        let z2 = IntLattice::full(2);
        let zero = RatMatrix::zeros(2, 2);
        let one = RatMatrix::identity(2);
        assert_eq!(idempotent_kernel_sublattice(&z2, &zero).unwrap(), z2);
        assert_eq!(idempotent_kernel_sublattice(&z2, &one).unwrap(), IntLattice::zero(2));
        let e = RatMatrix::from_int(&IntMatrix::from_i64(2, 2, &[1, 0, 0, 0]));
        assert_eq!(idempotent_kernel_sublattice(&z2, &e).unwrap(), lat(2, &[&[0, 1]]));
        let bad = RatMatrix::from_int(&IntMatrix::from_i64(2, 2, &[2, 0, 0, 0]));
        assert!(matches!(idempotent_kernel_sublattice(&z2, &bad), Err(Error::NotIdempotent)));
    }

    #[test]
    fn saturation_and_span_intersection() {
        let l = lat(3, &[&[2, 4, 0], &[0, 0, 3]]);
        let s = l.saturation();
        assert_eq!(s, lat(3, &[&[1, 2, 0], &[0, 0, 1]]));
        assert!(s.is_saturated());
        let span = IntMatrix::from_i64(1, 3, &[1, 2, 0]);
        let i = intersect_with_span(&IntLattice::full(3), &span);
        assert_eq!(i, lat(3, &[&[1, 2, 0]]));
    }
}
