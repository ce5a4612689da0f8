//! Congruence modules `M/(M[e] + M[1 − e])` of 𝕋-lattices.
//!
//! For an idempotent `e = N/D` acting on `M = ℤ^m` the map `x ↦ x·e`
//! identifies `M/(M[e] + M[1 − e])` with `(eM + M)/M`, which after scaling
//! by `D` is `(rowspan N + Dℤ^m)/Dℤ^m`. Its total order comes from a modular
//! HNF and its `p`-part from the elementary divisors of `N` over `ℤ/p^a`,
//! `p^a ‖ D`. The `𝔪`-parts are the images under lifted local idempotents.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{factor_big, ord_p};
use crate::error::{Error, Result};
use crate::hecke::local::lift_local_idempotent;
use crate::hecke::{Idempotent, LocalData};
use crate::linalg::hnf_modular::hnf_mod_d;
use crate::linalg::{
    idempotent_kernel_sublattice, kernel_of_map, lattice_sum, local_valuations, quotient_invariants, IntLattice,
    IntMatrix, RatMatrix,
};
use crate::serde_big::{ser_big, ser_vec};

/// Which lattice a congruence module was computed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Carrier {
    #[serde(rename = "T")]
    Hecke,
    #[serde(rename = "S")]
    Cuspidal,
    #[serde(rename = "other")]
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimePart {
    #[serde(serialize_with = "ser_big")]
    pub p: BigInt,
    /// `log_p` of the order of the `p`-part.
    pub exponent: u64,
    /// Exponents of the cyclic factors, largest first.
    pub cyclic_exponents: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdealPart {
    pub p: u64,
    /// Position of 𝔪 among the maximal ideals of 𝕋 over `p`.
    pub index: usize,
    pub exponent: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CongModuleReport {
    pub carrier: Carrier,
    pub label: Option<String>,
    /// Invariant factors `d_1 | d_2 | …`, all greater than one.
    #[serde(serialize_with = "ser_vec")]
    pub invariant_factors: Vec<BigInt>,
    #[serde(serialize_with = "ser_big")]
    pub order: BigInt,
    pub primes: Vec<PrimePart>,
    pub ideals: Vec<IdealPart>,
}

impl CongModuleReport {
    fn from_prime_parts(carrier: Carrier, label: Option<String>, order: BigInt, primes: Vec<PrimePart>) -> Self {
        let len = primes.iter().map(|pp| pp.cyclic_exponents.len()).max().unwrap_or(0);
        let mut factors = vec![BigInt::one(); len];
        for pp in &primes {
            for (slot, &e) in factors.iter_mut().zip(&pp.cyclic_exponents) {
                *slot *= num_traits::pow(pp.p.clone(), e as usize);
            }
        }
        factors.reverse();
        CongModuleReport {
            carrier,
            label,
            invariant_factors: factors,
            order,
            primes,
            ideals: Vec::new(),
        }
    }

    /// `log_p` of the `p`-part.
    pub fn exponent_at(&self, p: u64) -> u64 {
        let pb = BigInt::from(p);
        self.primes.iter().find(|pp| pp.p == pb).map_or(0, |pp| pp.exponent)
    }

    /// `log_p` of the 𝔪-part, for 𝔪 the `index`-th maximal ideal over `p`.
    pub fn ideal_exponent(&self, p: u64, index: usize) -> Option<u64> {
        self.ideals.iter().find(|i| i.p == p && i.index == index).map(|i| i.exponent)
    }

    /// Product of the invariant factors, of the prime parts, and the stated
    /// order all agree; 𝔪-parts over each prime multiply to the `p`-part.
    pub fn is_consistent(&self) -> bool {
        let by_factors = self.invariant_factors.iter().fold(BigInt::one(), |a, d| a * d);
        let by_primes = self
            .primes
            .iter()
            .fold(BigInt::one(), |a, pp| a * num_traits::pow(pp.p.clone(), pp.exponent as usize));
        let ideals_ok = self
            .ideals
            .iter()
            .map(|i| i.p)
            .all(|p| self.ideals.iter().filter(|i| i.p == p).map(|i| i.exponent).sum::<u64>() == self.exponent_at(p));
        by_factors == self.order && by_primes == self.order && ideals_ok
    }
}

fn prime_part(p: &BigInt, exps: Vec<u32>) -> PrimePart {
    let mut cyclic: Vec<u32> = exps.into_iter().filter(|&e| e > 0).collect();
    cyclic.sort_unstable_by(|a, b| b.cmp(a));
    PrimePart {
        p: p.clone(),
        exponent: cyclic.iter().map(|&e| e as u64).sum(),
        cyclic_exponents: cyclic,
    }
}

fn small_prime(p: &BigInt) -> Result<u64> {
    p.to_u64()
        .filter(|&x| x < 1 << 62)
        .ok_or_else(|| Error::Internal(format!("prime {p} exceeds the word-size field range")))
}

fn reduce(m: &IntMatrix, q: &BigInt) -> IntMatrix {
    IntMatrix::from_vec(m.rows(), m.cols(), m.entries().iter().map(|x| x.mod_floor(q)).collect())
}

/// Order of `(rowspan N + Dℤ^m)/Dℤ^m`.
pub fn congruence_order(e: &Idempotent) -> BigInt {
    let m = e.num.rows();
    if e.den.is_one() || m == 0 {
        return BigInt::one();
    }
    let gens: Vec<Vec<BigInt>> = (0..m).map(|i| e.num.row_vec(i)).collect();
    let h = hnf_mod_d(&gens, m, &e.den);
    let covolume = h.iter().enumerate().fold(BigInt::one(), |a, (i, r)| a * &r[i]);
    let full = num_traits::pow(e.den.clone(), m);
    let (q, r) = full.div_rem(&covolume);
    debug_assert!(r.is_zero());
    q
}

/// Congruence module of the lattice `ℤ^m` on which `e = N/D` acts.
pub fn congruence_module_fast(e: &Idempotent, carrier: Carrier, label: Option<String>) -> Result<CongModuleReport> {
    let order = congruence_order(e);
    let mut primes = Vec::new();
    for (p, _) in factor_big(&order) {
        let a = ord_p(&e.den, small_prime(&p)?);
        let q = num_traits::pow(p.clone(), a as usize);
        let vals = local_valuations(&reduce(&e.num, &q), small_prime(&p)?, a);
        primes.push(prime_part(&p, vals.into_iter().map(|v| a - v).collect()));
    }
    let report = CongModuleReport::from_prime_parts(carrier, label, order, primes);
    if !report.is_consistent() {
        return Err(Error::Internal("local and global congruence orders disagree".into()));
    }
    Ok(report)
}

/// `M/(M[e] + M[1 − e])` computed literally: both kernels, their sum, and
/// the Smith form of the quotient. `e` acts on the ambient space of `m`.
pub fn congruence_module(
    m: &IntLattice,
    e: &RatMatrix,
    carrier: Carrier,
    label: Option<String>,
) -> Result<CongModuleReport> {
    let ker_e = idempotent_kernel_sublattice(m, e)?;
    let perp = RatMatrix::identity(e.rows()).sub(e);
    let ker_perp = kernel_of_map(m, &perp);
    let sum = lattice_sum(&ker_e, &ker_perp)?;
    let q = quotient_invariants(m, &sum)?;
    if q.free_rank != 0 {
        return Err(Error::NotStable(format!(
            "kernels of e and 1 − e leave a free quotient of rank {}",
            q.free_rank
        )));
    }
    let order = q.torsion.iter().fold(BigInt::one(), |a, d| a * d);
    let mut primes = Vec::new();
    for (p, _) in factor_big(&order) {
        let pu = small_prime(&p)?;
        let exps = q.torsion.iter().map(|d| ord_p(d, pu)).collect();
        primes.push(prime_part(&p, exps));
    }
    let mut report = CongModuleReport::from_prime_parts(carrier, label, order, primes);
    report.invariant_factors = q.torsion;
    Ok(report)
}

/// Splits the `p`-part of the fast congruence module of `e` along the
/// maximal ideals of `local`; `module_gens` are the generators of 𝕋 acting
/// on the lattice `e` lives on.
pub fn attach_ideal_parts(
    report: &mut CongModuleReport,
    e: &Idempotent,
    local: &LocalData,
    module_gens: &[IntMatrix],
) -> Result<()> {
    let p = local.p;
    report.ideals.retain(|i| i.p != p);
    let a = ord_p(&e.den, p);
    let total = report.exponent_at(p);
    if a == 0 || total == 0 {
        report
            .ideals
            .extend(local.ideals.iter().map(|m| IdealPart { p, index: m.index, exponent: 0 }));
        return Ok(());
    }
    let q = num_traits::pow(BigInt::from(p), a as usize);
    let n_mod = reduce(&e.num, &q);
    let mut sum = 0;
    for m in &local.ideals {
        let x = lift_local_idempotent(&local.algebra, m, module_gens, a);
        let image = reduce(&n_mod.mul(&x), &q);
        let exponent = local_valuations(&image, p, a).iter().map(|&v| (a - v) as u64).sum();
        sum += exponent;
        report.ideals.push(IdealPart { p, index: m.index, exponent });
    }
    if sum != total {
        return Err(Error::Internal(format!(
            "𝔪-parts over {p} have total exponent {sum}, expected {total}"
        )));
    }
    Ok(())
}
