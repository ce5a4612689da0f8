//! Local diagnostics at maximal ideals: fibers, socles, the Gorenstein
//! test, the orders 𝒪_f and their regularity, and lifted local idempotents.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use super::algebra::HeckeAlgebra;
use super::decompose::NewformClass;
use super::fp_algebra::{FpAlgebra, MaxIdeal, ModuleAction, RingKind};
use super::regular::{OrderOf, RegularRep};
use crate::arith::{big_mod_u64, factor_u64};
use crate::error::{Error, Result};
use crate::linalg::{IntLattice, IntMatrix, ModMatrix};
use crate::modsym::{hecke, ModSymSpace};

/// Outcome of the Gorenstein test at one maximal ideal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GorensteinVerdict {
    Gorenstein,
    NotGorenstein,
    /// No applicability guard holds; the raw fiber dimension is attached.
    NotCertified { fiber_dim: usize },
}

impl GorensteinVerdict {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            GorensteinVerdict::Gorenstein => Some(true),
            GorensteinVerdict::NotGorenstein => Some(false),
            GorensteinVerdict::NotCertified { .. } => None,
        }
    }
}

impl Serialize for GorensteinVerdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GorensteinVerdict::Gorenstein => s.serialize_str("true"),
            GorensteinVerdict::NotGorenstein => s.serialize_str("false"),
            GorensteinVerdict::NotCertified { .. } => s.serialize_str("not_certified"),
        }
    }
}

/// 𝕋/p𝕋 together with its action on S/pS and its maximal ideals.
#[derive(Clone, Debug)]
pub struct LocalData {
    pub p: u64,
    pub algebra: FpAlgebra,
    pub s_action: ModuleAction,
    pub ideals: Vec<MaxIdeal>,
}

impl LocalData {
    pub fn new(alg: &HeckeAlgebra, p: u64) -> Result<Self> {
        let algebra = alg.mod_p(p)?;
        let s_action = alg.s_action_mod_p(&algebra);
        let ideals = algebra.maximal_ideals(RingKind::Hecke);
        Ok(LocalData {
            p,
            algebra,
            s_action,
            ideals,
        })
    }

    /// `dim_{𝕋/𝔪}(S/𝔪S)`.
    pub fn fiber_dim(&self, m: &MaxIdeal) -> usize {
        self.s_action.fiber_dim(&self.algebra, m)
    }

    /// `dim_{𝕋/𝔪}((𝕋/p𝕋)[𝔪])`.
    pub fn socle_dim(&self, m: &MaxIdeal) -> usize {
        self.algebra.socle_dim(m)
    }

    /// `dim_{𝕋/𝔪}(𝕋/𝔪𝕋)`, which is 1 for the cyclic module 𝕋.
    pub fn hecke_fiber_dim(&self, m: &MaxIdeal) -> usize {
        let regular = self.algebra.module_action(self.algebra.gens());
        regular.fiber_dim(&self.algebra, m)
    }
}

fn order_module(order: &OrderOf, p: u64) -> Vec<ModMatrix> {
    order.rep.gens.iter().map(|g| ModMatrix::from_int(g, p)).collect()
}

/// Coordinates in the orbit lattice of an S-endomorphism known to lie in 𝕋.
pub fn element_vector(alg: &HeckeAlgebra, x: &IntMatrix) -> Result<Vec<BigInt>> {
    alg.lattice()
        .coordinates(&x.vec_mul(alg.seed()))
        .ok_or_else(|| Error::Internal("operator does not lie in the Hecke algebra".into()))
}

/// The order `𝒪_f = 𝕋·e_f`, presented on `rowspan(N)` where `e_f = N/D` on
/// the orbit lattice; the generators of 𝕋 act through their restriction.
pub fn order_of(alg: &HeckeAlgebra, class: &NewformClass) -> Result<OrderOf> {
    let n_l = &class.e_t.num;
    let lambda = IntLattice::from_generators(n_l);
    if lambda.rank() != class.dim {
        return Err(Error::InvariantViolation(format!(
            "image of e_f has rank {} instead of {}",
            lambda.rank(),
            class.dim
        )));
    }
    let gens = alg
        .regular_generators()?
        .iter()
        .map(|g| lambda.restrict_operator(g))
        .collect::<Result<Vec<_>>>()?;
    let unit = lambda
        .coordinates(&n_l.vec_mul(alg.unit()))
        .ok_or_else(|| Error::Internal("image of the unit left the order".into()))?;
    OrderOf::from_rep(RegularRep { gens, unit })
}

/// Maximal ideals of 𝕋 at `p` lying under maximal ideals of `𝒪_f`, paired
/// with those ideals.
pub fn ideals_of_class(
    local: &LocalData,
    order: &OrderOf,
) -> Result<Vec<(MaxIdeal, MaxIdeal)>> {
    let p = local.p;
    let order_alg = order.rep.mod_p(p)?;
    let order_ideals = order_alg.maximal_ideals(RingKind::Order);
    let action = local.algebra.module_action(&order_module(order, p));
    let unit: Vec<u64> = order.unit.iter().map(|x| big_mod_u64(x, p)).collect();
    let mut out = Vec::new();
    for m in &local.ideals {
        let x = action.matrix_of(&local.algebra, &m.idempotent);
        let image = x.vec_mul(&unit);
        if image.iter().all(|&c| c == 0) {
            continue;
        }
        let partner = order_ideals
            .iter()
            .find(|o| o.idempotent == image)
            .ok_or_else(|| Error::Internal("local idempotent has no partner in the order".into()))?;
        out.push((m.clone(), partner.clone()));
    }
    Ok(out)
}

/// Gorenstein test through `dim S/𝔪S = 2`, certified only under the
/// applicability guards: `p ∤ n`; odd `p ‖ n`; `p ‖ n` with `U_p` a unit
/// modulo 𝔪 in 𝔽_p.
pub fn is_gorenstein(alg: &HeckeAlgebra, space: &ModSymSpace, local: &LocalData, m: &MaxIdeal) -> Result<GorensteinVerdict> {
    let n = alg.level();
    let p = local.p;
    let fiber = local.fiber_dim(m);
    let ord = factor_u64(n).into_iter().find(|(q, _)| *q == p).map_or(0, |(_, e)| e);
    let guard = match ord {
        0 => true,
        1 if p % 2 == 1 => true,
        1 => {
            let u = hecke(space, p)?.matrix;
            let v = element_vector(alg, &u)?;
            let vm: Vec<u64> = v.iter().map(|x| big_mod_u64(x, p)).collect();
            matches!(local.algebra.residue_value(&vm, m), Some(r) if r != 0)
        }
        _ => false,
    };
    if !guard {
        return Ok(GorensteinVerdict::NotCertified { fiber_dim: fiber });
    }
    Ok(if fiber == 2 {
        GorensteinVerdict::Gorenstein
    } else {
        GorensteinVerdict::NotGorenstein
    })
}

/// Sign `ε` with `U_p = ε` on the isotypic part of `class`, for `p ‖ n`.
pub fn u_p_unit_check(space: &ModSymSpace, class: &NewformClass, p: u64) -> Result<i32> {
    let n = space.level();
    let ord = factor_u64(n).into_iter().find(|(q, _)| *q == p).map_or(0, |(_, e)| e);
    if ord != 1 {
        return Err(Error::NotApplicable(format!("{p} does not divide {n} exactly once")));
    }
    let u = hecke(space, p)?.matrix;
    let image = class.e_s.num.mul(&u);
    if image == class.e_s.num {
        Ok(1)
    } else if image == class.e_s.num.neg() {
        Ok(-1)
    } else {
        Err(Error::InvariantViolation(format!("U_{p} is not ±1 on class {}", class.label)))
    }
}

/// `ε_𝔪` acting on a module with generator matrices `module_gens`, as an
/// integer matrix reduced modulo `p^a`, idempotent modulo `p^a`.
pub fn lift_local_idempotent(alg: &FpAlgebra, m: &MaxIdeal, module_gens: &[IntMatrix], a: u32) -> IntMatrix {
    let p = alg.p();
    let q = num_traits::pow(BigInt::from(p), a as usize);
    let dim = module_gens.first().map_or(0, |g| g.rows());
    let reduce = |x: &IntMatrix| {
        IntMatrix::from_vec(x.rows(), x.cols(), x.entries().iter().map(|v| v.mod_floor(&q)).collect())
    };
    let coords = alg.monomial_coords(&m.idempotent);
    let mut mono: Vec<IntMatrix> = Vec::with_capacity(coords.len());
    let mut x = IntMatrix::zeros(dim, dim);
    for (w, c) in alg.words().iter().zip(&coords) {
        let mat = match w {
            None => IntMatrix::identity(dim),
            Some((parent, g)) => reduce(&mono[*parent].mul(&module_gens[*g])),
        };
        if *c != 0 {
            x = x.add(&mat.scale(&BigInt::from(*c)));
        }
        mono.push(mat);
    }
    let mut x = reduce(&x);
    // x ← 3x² − 2x³ doubles the precision of x² ≡ x
    let three = BigInt::from(3);
    let two = BigInt::from(2);
    loop {
        let x2 = reduce(&x.mul(&x));
        if x2 == x {
            return x;
        }
        let x3 = reduce(&x2.mul(&x));
        x = reduce(&x2.scale(&three).sub(&x3.scale(&two)));
    }
}

/// Diagnostic record for one maximal ideal of 𝕋 supporting a class.
#[derive(Clone, Debug, Serialize)]
pub struct IdealDiagnostics {
    pub p: u64,
    /// Position among the maximal ideals of 𝕋 over `p`.
    pub index: usize,
    pub residue_degree: usize,
    pub fiber_dim: usize,
    pub socle_dim: usize,
    pub gorenstein: GorensteinVerdict,
    pub cotangent_dim: usize,
    pub dvr: bool,
    pub u_p_sign: Option<i32>,
}

/// Diagnostics at every maximal ideal of 𝕋 over `p` supporting `class`.
pub fn class_diagnostics(
    alg: &HeckeAlgebra,
    space: &ModSymSpace,
    class: &NewformClass,
    order: &OrderOf,
    local: &LocalData,
) -> Result<Vec<IdealDiagnostics>> {
    let p = local.p;
    let n = alg.level();
    let u_p_sign = if n % p == 0 && (n / p) % p != 0 {
        Some(u_p_unit_check(space, class, p)?)
    } else {
        None
    };
    let mut out = Vec::new();
    for (m, mo) in ideals_of_class(local, order)? {
        let cot = order.cotangent_dim(&mo)?;
        out.push(IdealDiagnostics {
            p,
            index: m.index,
            residue_degree: m.residue_degree,
            fiber_dim: local.fiber_dim(&m),
            socle_dim: local.socle_dim(&m),
            gorenstein: is_gorenstein(alg, space, local, &m)?,
            cotangent_dim: cot,
            dvr: cot == 1,
            u_p_sign,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};
    use crate::hecke::{build_hecke_algebra, decompose_new};
    use crate::modsym::build_space;

    fn setup(n: u64) -> (ModSymSpace, HeckeAlgebra, Vec<NewformClass>) {
        let s = build_space(n);
        let t = build_hecke_algebra(&s).unwrap();
        let d = decompose_new(&s, &t).unwrap();
        (s, t, d.classes)
    }

    #[test]
    fn orders_at_11_and_23() {
        let (_, t, c) = setup(11);
        let o = order_of(&t, &c[0]).unwrap();
        assert_eq!(o.rank, 1);
        assert_eq!(o.discriminant(), BigInt::one());
        let (_, t, c) = setup(23);
        let o = order_of(&t, &c[0]).unwrap();
        assert_eq!(o.rank, 2);
        assert_eq!(o.discriminant(), BigInt::from(5));
        let ms = o.maximal_ideals(2).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].residue_degree, 2);
    }

    #[test]
    fn u_p_signs() {
        let (s, _, c) = setup(11);
        assert_eq!(u_p_unit_check(&s, &c[0], 11).unwrap(), 1);
        assert!(matches!(u_p_unit_check(&s, &c[0], 2), Err(Error::NotApplicable(_))));
        let (s, _, c) = setup(14);
        assert_eq!(u_p_unit_check(&s, &c[0], 2).unwrap(), -1);
    }

    #[test]
    fn fibers_at_prime_levels() {
        for n in [11u64, 23, 37, 43] {
            let (s, t, _) = setup(n);
            for p in [2u64, 3, 5] {
                let local = LocalData::new(&t, p).unwrap();
                for m in &local.ideals {
                    assert_eq!(local.hecke_fiber_dim(m), 1);
                    assert_eq!(local.fiber_dim(m), 2, "level {n}, p {p}");
                    assert!(local.socle_dim(m) >= 1);
                    assert_eq!(is_gorenstein(&t, &s, &local, m).unwrap(), GorensteinVerdict::Gorenstein);
                }
                let total: usize = local.ideals.iter().map(|m| m.local_dim).sum();
                assert_eq!(total, t.rank());
            }
        }
    }

    #[test]
    fn lifted_idempotents_are_idempotent() {
        let (_, t, _) = setup(37);
        let local = LocalData::new(&t, 2).unwrap();
        let gens: Vec<IntMatrix> = t.generators().iter().map(|g| g.matrix.clone()).collect();
        let q = BigInt::from(2).pow(6);
        let mut sum = IntMatrix::zeros(4, 4);
        for m in &local.ideals {
            let x = lift_local_idempotent(&local.algebra, m, &gens, 6);
            let x2 = x.mul(&x);
            let diff = x2.sub(&x);
            assert!(diff.entries().iter().all(|v| (v % &q).is_zero()));
            sum = sum.add(&x);
        }
        let id = IntMatrix::identity(4);
        assert!(sum.sub(&id).entries().iter().all(|v| (v % &q).is_zero()));
    }
}
