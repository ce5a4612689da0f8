//! Hecke, Atkin–Lehner, degeneracy and star operators on cuspidal lattices.

use std::fmt;

use crate::arith::{factor_u64, is_prime_u64, is_squarefree, xgcd_i128};
use crate::error::{Error, Result};
use crate::linalg::{left_kernel, IntLattice, IntMatrix};

use super::heilbronn::{heilbronn_cremona, Mat2};
use super::space::{build_space, lift_to_sl2, ModSymSpace};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum OperatorName {
    T(u64),
    U(u64),
    W(u64),
    DegForget(u64),
    DegQuotient(u64),
    Star,
}

impl fmt::Display for OperatorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorName::T(l) => write!(f, "T_{l}"),
            OperatorName::U(l) => write!(f, "U_{l}"),
            OperatorName::W(q) => write!(f, "w_{q}"),
            OperatorName::DegForget(l) => write!(f, "deg_forg_{l}"),
            OperatorName::DegQuotient(l) => write!(f, "deg_quot_{l}"),
            OperatorName::Star => write!(f, "star"),
        }
    }
}

/// An operator in S-coordinates, acting on row vectors from the right.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OperatorMatrix {
    pub name: OperatorName,
    pub matrix: IntMatrix,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DegeneracyKind {
    Forget,
    Quotient,
}

fn restrict(space: &ModSymSpace, on_m: &IntMatrix) -> Result<IntMatrix> {
    space.cuspidal_lattice().restrict_operator(on_m)
}

/// Map from S(source) to S(target) given by a matrix on M.
fn restrict_between(src: &ModSymSpace, dst: &ModSymSpace, on_m: &IntMatrix) -> Result<IntMatrix> {
    let img = src.cuspidal_lattice().basis().mul(on_m);
    let s = dst.cuspidal_lattice();
    let mut rows = Vec::with_capacity(img.rows());
    for i in 0..img.rows() {
        rows.push(
            s.coordinates(img.row(i))
                .ok_or_else(|| Error::NotStable("image leaves the target cuspidal lattice".into()))?,
        );
    }
    Ok(IntMatrix::from_rows(rows, s.rank()))
}

fn act(m: &Mat2, x: (i64, i64)) -> (i64, i64) {
    let (p, q) = x;
    (m[0] * p + m[1] * q, m[2] * p + m[3] * q)
}

/// `Σ_h (u : v)·h` over a list of matrices, on M.
pub fn heilbronn_on_m(space: &ModSymSpace, mats: &[Mat2]) -> IntMatrix {
    space.operator_on_m(space.rank(), |s, coeff, acc| {
        let pt = space.p1().point(s);
        let (u, v) = (pt.c as i64, pt.d as i64);
        for h in mats {
            space.add_symbol(u * h[0] + v * h[2], u * h[1] + v * h[3], coeff, acc);
        }
    })
}

/// Σ over matrices `γ` of `γ·{α, β}` acting by Möbius transformations, on M.
fn moebius_on_m(src: &ModSymSpace, dst: &ModSymSpace, mats: &[Mat2]) -> IntMatrix {
    src.operator_on_m(dst.rank(), |s, coeff, acc| {
        let (a, b) = src.symbol_endpoints(s);
        for g in mats {
            dst.add_modsym(act(g, a), act(g, b), coeff, acc);
        }
    })
}

/// T_ℓ or U_ℓ on M.
pub fn hecke_on_m(space: &ModSymSpace, l: u64) -> Result<IntMatrix> {
    if !is_prime_u64(l) {
        return Err(Error::NotApplicable(format!("{l} is not prime")));
    }
    if space.level() % l != 0 {
        Ok(heilbronn_on_m(space, &heilbronn_cremona(l)))
    } else {
        let li = l as i64;
        let mats: Vec<Mat2> = (0..li).map(|t| [1, t, 0, li]).collect();
        Ok(moebius_on_m(space, space, &mats))
    }
}

/// T_ℓ for ℓ ∤ n, U_ℓ for ℓ | n, on S.
pub fn hecke(space: &ModSymSpace, l: u64) -> Result<OperatorMatrix> {
    let on_m = hecke_on_m(space, l)?;
    let name = if space.level() % l == 0 {
        OperatorName::U(l)
    } else {
        OperatorName::T(l)
    };
    Ok(OperatorMatrix {
        name,
        matrix: restrict(space, &on_m)?,
    })
}

fn exact_prime_divisor(n: u64, q: u64) -> Result<()> {
    if !is_prime_u64(q) || n % q != 0 || (n / q) % q == 0 {
        return Err(Error::NotApplicable(format!("{q} does not divide {n} exactly once")));
    }
    Ok(())
}

/// The matrix `[[q, y], [n, q·w]]` of determinant q.
pub fn atkin_lehner_matrix(n: u64, q: u64) -> Mat2 {
    let (qi, m) = (q as i128, (n / q) as i128);
    // q·w − m·y = 1
    let (_, w, t) = xgcd_i128(qi, m);
    let y = -t;
    [q as i64, y as i64, n as i64, (qi * w) as i64]
}

pub fn atkin_lehner_on_m(space: &ModSymSpace, q: u64) -> Result<IntMatrix> {
    exact_prime_divisor(space.level(), q)?;
    let w = atkin_lehner_matrix(space.level(), q);
    Ok(moebius_on_m(space, space, &[w]))
}

pub fn atkin_lehner(space: &ModSymSpace, q: u64) -> Result<OperatorMatrix> {
    let on_m = atkin_lehner_on_m(space, q)?;
    Ok(OperatorMatrix {
        name: OperatorName::W(q),
        matrix: restrict(space, &on_m)?,
    })
}

fn degeneracy_guard(n: u64, l: u64) -> Result<()> {
    if !is_squarefree(n) {
        return Err(Error::NotSquarefree(n));
    }
    if !is_prime_u64(l) || n % l != 0 {
        return Err(Error::NotApplicable(format!("{l} does not divide {n}")));
    }
    Ok(())
}

/// Degeneracy map M(n) → M(n/ℓ).
pub fn degeneracy_on_m(src: &ModSymSpace, dst: &ModSymSpace, l: u64, kind: DegeneracyKind) -> IntMatrix {
    match kind {
        DegeneracyKind::Forget => src.operator_on_m(dst.rank(), |s, coeff, acc| {
            let pt = src.p1().point(s);
            dst.add_symbol(pt.c as i64, pt.d as i64, coeff, acc);
        }),
        DegeneracyKind::Quotient => moebius_on_m(src, dst, &[[l as i64, 0, 0, 1]]),
    }
}

/// `(π_forg)_*` or `(π_quot)_*` from S(n) to S(n/ℓ), in S-coordinates.
pub fn degeneracy(space: &ModSymSpace, l: u64, kind: DegeneracyKind) -> Result<OperatorMatrix> {
    degeneracy_guard(space.level(), l)?;
    if space.level() == l {
        return Err(Error::NotApplicable(format!("level {l} has no proper divisor level")));
    }
    let target = build_space(space.level() / l);
    degeneracy_to(space, &target, l, kind)
}

/// As [`degeneracy`], with the target space supplied.
pub fn degeneracy_to(
    space: &ModSymSpace,
    target: &ModSymSpace,
    l: u64,
    kind: DegeneracyKind,
) -> Result<OperatorMatrix> {
    degeneracy_guard(space.level(), l)?;
    if target.level() * l != space.level() {
        return Err(Error::NotApplicable("target level must be n/ℓ".into()));
    }
    let on_m = degeneracy_on_m(space, target, l, kind);
    let name = match kind {
        DegeneracyKind::Forget => OperatorName::DegForget(l),
        DegeneracyKind::Quotient => OperatorName::DegQuotient(l),
    };
    Ok(OperatorMatrix {
        name,
        matrix: restrict_between(space, target, &on_m)?,
    })
}

/// `(π_quot)^*`: S(n/ℓ) → S(n), summing over the ℓ + 1 translates of a path.
pub fn quotient_pullback(space: &ModSymSpace, target: &ModSymSpace, l: u64) -> Result<IntMatrix> {
    degeneracy_guard(space.level(), l)?;
    let (n, m, li) = (space.level() as i128, target.level() as i128, l as i128);
    // ℓ·d − b·m = 1
    let (_, d, t) = xgcd_i128(li, m);
    let b = -t;
    let mut mats: Vec<Mat2> = (0..l as i64).map(|j| [1, j, 0, l as i64]).collect();
    mats.push([li as i64, b as i64, n as i64, (li * d) as i64]);
    let on_m = moebius_on_m(target, space, &mats);
    restrict_between(target, space, &on_m)
}

/// Complex conjugation `(c : d) ↦ (−c : d)`.
pub fn star_involution(space: &ModSymSpace) -> Result<OperatorMatrix> {
    let on_m = space.operator_on_m(space.rank(), |s, coeff, acc| {
        let pt = space.p1().point(s);
        space.add_symbol(-(pt.c as i64), pt.d as i64, coeff, acc);
    });
    Ok(OperatorMatrix {
        name: OperatorName::Star,
        matrix: restrict(space, &on_m)?,
    })
}

/// The new sublattice of S: common kernel of both degeneracy maps for
/// every prime ℓ | n, in S-coordinates.
pub fn new_lattice(space: &ModSymSpace) -> Result<IntLattice> {
    let n = space.level();
    if !is_squarefree(n) {
        return Err(Error::NotSquarefree(n));
    }
    let r = space.cuspidal_rank();
    let mut stacked = IntMatrix::zeros(r, 0);
    for (l, _) in factor_u64(n) {
        let target = build_space(n / l);
        if target.cuspidal_rank() == 0 {
            continue;
        }
        for kind in [DegeneracyKind::Forget, DegeneracyKind::Quotient] {
            let d = degeneracy_to(space, &target, l, kind)?;
            stacked = stacked.hstack(&d.matrix);
        }
    }
    if stacked.cols() == 0 {
        return Ok(IntLattice::full(r));
    }
    Ok(left_kernel(&stacked))
}

/// Lifted matrix of a Manin symbol, exposed for diagnostics.
pub fn symbol_matrix(space: &ModSymSpace, i: usize) -> Mat2 {
    let pt = space.p1().point(i);
    let (a, b, c, d) = lift_to_sl2(pt.c, pt.d, space.level());
    [a, b, c, d]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modsym::heilbronn::heilbronn_merel;
    use crate::poly::{charpoly_int, IntPoly};

    fn cp(m: &IntMatrix) -> IntPoly {
        charpoly_int(m).unwrap()
    }

    #[test]
    fn level_11_charpolys() {
        let s = build_space(11);
        let t2 = hecke(&s, 2).unwrap();
        assert_eq!(cp(&t2.matrix), IntPoly::from_i64(&[4, 4, 1]));
        let t3 = hecke(&s, 3).unwrap();
        assert_eq!(cp(&t3.matrix), IntPoly::from_i64(&[1, 2, 1]));
    }

    #[test]
    fn cremona_and_merel_agree() {
        for n in [11u64, 23, 30, 37] {
            let s = build_space(n);
            for l in [2u64, 3, 5, 7] {
                if n % l == 0 {
                    continue;
                }
                let a = restrict(&s, &heilbronn_on_m(&s, &heilbronn_cremona(l))).unwrap();
                let b = restrict(&s, &heilbronn_on_m(&s, &heilbronn_merel(l))).unwrap();
                assert_eq!(a, b, "n={n} l={l}");
            }
        }
    }

    #[test]
    fn u2_at_14() {
        let s = build_space(14);
        assert_eq!(s.cuspidal_rank(), 2);
        let u2 = hecke(&s, 2).unwrap();
        assert_eq!(u2.name, OperatorName::U(2));
        assert_eq!(cp(&u2.matrix), IntPoly::from_i64(&[1, 2, 1]));
    }

    #[test]
    fn atkin_lehner_basics() {
        let s = build_space(11);
        let w = atkin_lehner(&s, 11).unwrap();
        assert!(w.matrix.mul(&w.matrix).is_identity());
        let u = hecke(&s, 11).unwrap();
        assert_eq!(w.matrix, u.matrix.neg());

        let s15 = build_space(15);
        let w3 = atkin_lehner(&s15, 3).unwrap();
        let t2 = hecke(&s15, 2).unwrap();
        assert!(w3.matrix.mul(&w3.matrix).is_identity());
        assert_eq!(w3.matrix.mul(&t2.matrix), t2.matrix.mul(&w3.matrix));
        assert!(atkin_lehner(&build_space(12), 2).is_err());
    }

    #[test]
    fn degeneracy_at_22() {
        let s = build_space(22);
        let f = degeneracy(&s, 2, DegeneracyKind::Forget).unwrap();
        let q = degeneracy(&s, 2, DegeneracyKind::Quotient).unwrap();
        let joint = f.matrix.hstack(&q.matrix);
        assert_eq!(crate::linalg::rank(&joint), 4);
        assert_eq!(new_lattice(&s).unwrap().rank(), 0);
        assert!(degeneracy(&build_space(11), 11, DegeneracyKind::Forget).is_err());
    }

    #[test]
    fn new_ranks() {
        assert_eq!(new_lattice(&build_space(33)).unwrap().rank(), 2);
        let s = build_space(37);
        assert_eq!(new_lattice(&s).unwrap(), IntLattice::full(4));
    }

    #[test]
    fn u_plus_w_identity_at_22() {
        let s = build_space(22);
        let s11 = build_space(11);
        let u = hecke(&s, 2).unwrap().matrix;
        let w = atkin_lehner(&s, 2).unwrap().matrix;
        let forg = degeneracy_to(&s, &s11, 2, DegeneracyKind::Forget).unwrap().matrix;
        let pull = quotient_pullback(&s, &s11, 2).unwrap();
        assert_eq!(u.add(&w), forg.mul(&pull));
    }

    #[test]
    fn star_properties() {
        let s = build_space(11);
        let st = star_involution(&s).unwrap().matrix;
        assert!(st.mul(&st).is_identity());
        let t2 = hecke(&s, 2).unwrap().matrix;
        assert_eq!(st.mul(&t2), t2.mul(&st));
    }
}
