//! Modular degrees, congruence numbers and the checks built on them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::congruence::{attach_ideal_parts, congruence_module_fast, Carrier, CongModuleReport};
use crate::arith::{exact_sqrt, is_squarefree};
use crate::error::{Error, Result};
use crate::hecke::algebra::REGULAR_CACHE_RANK;
use crate::hecke::local::{class_diagnostics, order_of, GorensteinVerdict};
use crate::hecke::{build_hecke_algebra, decompose_new, Decomposition, HeckeAlgebra, LocalData, NewformClass};
use crate::linalg::IntMatrix;
use crate::modsym::{build_space, ModSymSpace};
use crate::serde_big::ser_big;

/// Space, Hecke algebra and newform decomposition at one squarefree level.
pub struct LevelData {
    pub space: ModSymSpace,
    pub algebra: HeckeAlgebra,
    pub decomposition: Decomposition,
}

impl LevelData {
    pub fn build(n: u64) -> Result<Self> {
        if n == 0 || !is_squarefree(n) {
            return Err(Error::NotSquarefree(n));
        }
        let space = build_space(n);
        let algebra = build_hecke_algebra(&space)?;
        let decomposition = decompose_new(&space, &algebra)?;
        Ok(LevelData {
            space,
            algebra,
            decomposition,
        })
    }

    pub fn level(&self) -> u64 {
        self.space.level()
    }

    pub fn classes(&self) -> &[NewformClass] {
        &self.decomposition.classes
    }

    /// Whether 𝕋 is small enough for the local (𝔪-level) diagnostics.
    pub fn local_available(&self) -> bool {
        self.algebra.rank() <= REGULAR_CACHE_RANK
    }
}

/// `cong_f`: order of the congruence module of 𝕋.
pub fn cong_number(class: &NewformClass) -> Result<BigInt> {
    Ok(congruence_module_fast(&class.e_t, Carrier::Hecke, Some(class.label.to_string()))?.order)
}

/// `deg_f`: square root of the order of the congruence module of S.
pub fn modular_degree(class: &NewformClass) -> Result<BigInt> {
    let report = congruence_module_fast(&class.e_s, Carrier::Cuspidal, Some(class.label.to_string()))?;
    square_root_of(&report, &class.label.to_string())
}

fn square_root_of(report: &CongModuleReport, label: &str) -> Result<BigInt> {
    exact_sqrt(&report.order).ok_or_else(|| Error::NonSquareIndex {
        order: report.order.to_string(),
        context: format!(
            "class {label}: S-congruence module with invariant factors [{}]",
            report.invariant_factors.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")
        ),
    })
}

fn half(exponent: u64, order: &BigInt, context: impl FnOnce() -> String) -> Result<u64> {
    if exponent % 2 != 0 {
        return Err(Error::NonSquareIndex {
            order: order.to_string(),
            context: context(),
        });
    }
    Ok(exponent / 2)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeOrds {
    #[serde(serialize_with = "ser_big")]
    pub p: BigInt,
    pub ord_deg: u64,
    pub ord_cong: u64,
    /// `ord_p(deg_f) − ord_p(cong_f)`, the exponent attributed to the
    /// cokernel on Lie algebras. Inferred, never computed directly.
    pub inferred_coker: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealReport {
    pub p: u64,
    pub index: usize,
    pub residue_degree: usize,
    pub gorenstein: GorensteinVerdict,
    pub dvr: bool,
    pub u_p_sign: Option<i32>,
    pub fiber_dim: usize,
    pub socle_dim: usize,
    pub cotangent_dim: usize,
    /// `log_p` of `deg_{f,𝔪}`.
    pub ord_deg: u64,
    /// `log_p` of `cong_{f,𝔪}`.
    pub ord_cong: u64,
    pub inferred_coker: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegCongReport {
    pub label: String,
    pub dim: usize,
    #[serde(serialize_with = "ser_big")]
    pub deg: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub cong: BigInt,
    pub primes: Vec<PrimeOrds>,
    pub ideals: Vec<IdealReport>,
    /// False when 𝕋 was too large for the 𝔪-level diagnostics.
    pub local_diagnostics: bool,
    #[serde(skip)]
    pub s_module: CongModuleReport,
    #[serde(skip)]
    pub t_module: CongModuleReport,
}

impl DegCongReport {
    pub fn prime(&self, p: u64) -> Option<&PrimeOrds> {
        let pb = BigInt::from(p);
        self.primes.iter().find(|x| x.p == pb)
    }

    pub fn ideals_over(&self, p: u64) -> impl Iterator<Item = &IdealReport> {
        self.ideals.iter().filter(move |i| i.p == p)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub level: u64,
    pub classes: Vec<DegCongReport>,
}

#[derive(Clone, Debug)]
pub struct ReportOptions {
    /// 1-based class indices; all classes when `None`.
    pub classes: Option<Vec<usize>>,
    /// Primes always diagnosed, besides those dividing `deg_f·cong_f`.
    pub extra_primes: Vec<u64>,
    /// Run 𝔪-level diagnostics when 𝕋 is small enough.
    pub local: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            classes: None,
            extra_primes: Vec::new(),
            local: true,
        }
    }
}

/// `deg_f`, `cong_f` and their local refinements for every selected class.
/// A mismatch `ord_p(deg_f) ≠ ord_p(cong_f)` at an odd prime is an error.
pub fn deg_cong_report(data: &LevelData, opts: &ReportOptions) -> Result<LevelReport> {
    let n = data.level();
    let alg = &data.algebra;
    let local_on = opts.local && data.local_available();
    let mut locals: BTreeMap<u64, LocalData> = BTreeMap::new();
    let mut s_gens: Option<Vec<IntMatrix>> = None;
    let mut t_gens: Option<Vec<IntMatrix>> = None;
    let mut out = Vec::new();
    for class in data.classes() {
        if let Some(sel) = &opts.classes {
            if !sel.contains(&class.label.index) {
                continue;
            }
        }
        let label = class.label.to_string();
        let mut s_mod = congruence_module_fast(&class.e_s, Carrier::Cuspidal, Some(label.clone()))?;
        let mut t_mod = congruence_module_fast(&class.e_t, Carrier::Hecke, Some(label.clone()))?;
        let deg = square_root_of(&s_mod, &label)?;
        let cong = t_mod.order.clone();

        let mut prime_set: Vec<BigInt> = s_mod.primes.iter().chain(&t_mod.primes).map(|pp| pp.p.clone()).collect();
        prime_set.extend(opts.extra_primes.iter().map(|&p| BigInt::from(p)));
        prime_set.sort();
        prime_set.dedup();
        let mut primes = Vec::with_capacity(prime_set.len());
        for p in &prime_set {
            let find = |m: &CongModuleReport| m.primes.iter().find(|pp| &pp.p == p).map_or(0, |pp| pp.exponent);
            let ord_deg = half(find(&s_mod), &s_mod.order, || format!("class {label}, {p}-part"))?;
            let ord_cong = find(&t_mod);
            if p != &BigInt::from(2) && ord_deg != ord_cong {
                return Err(Error::InvariantViolation(format!(
                    "class {label}: ord_{p}(deg) = {ord_deg} but ord_{p}(cong) = {ord_cong} at an odd prime"
                )));
            }
            primes.push(PrimeOrds {
                p: p.clone(),
                ord_deg,
                ord_cong,
                inferred_coker: ord_deg as i64 - ord_cong as i64,
            });
        }

        let mut ideals = Vec::new();
        if local_on {
            let order = order_of(alg, class)?;
            let s_gens = s_gens.get_or_insert_with(|| alg.generators().iter().map(|g| g.matrix.clone()).collect());
            let t_gens = match &t_gens {
                Some(g) => g,
                None => t_gens.insert(alg.regular_generators()?),
            };
            for p in prime_set.iter().filter_map(|p| p.to_u64()) {
                if !locals.contains_key(&p) {
                    locals.insert(p, LocalData::new(alg, p)?);
                }
                let local = &locals[&p];
                attach_ideal_parts(&mut s_mod, &class.e_s, local, s_gens)?;
                attach_ideal_parts(&mut t_mod, &class.e_t, local, t_gens)?;
                let diags = class_diagnostics(alg, &data.space, class, &order, local)?;
                for m in &local.ideals {
                    let nonzero = s_mod.ideal_exponent(p, m.index).unwrap_or(0) + t_mod.ideal_exponent(p, m.index).unwrap_or(0) > 0;
                    if nonzero && !diags.iter().any(|d| d.index == m.index) {
                        return Err(Error::Internal(format!(
                            "class {label}: congruences at a maximal ideal over {p} outside its support"
                        )));
                    }
                }
                for d in diags {
                    let ord_deg = half(s_mod.ideal_exponent(p, d.index).unwrap_or(0), &s_mod.order, || {
                        format!("class {label}, maximal ideal {} over {p}", d.index)
                    })?;
                    let ord_cong = t_mod.ideal_exponent(p, d.index).unwrap_or(0);
                    ideals.push(IdealReport {
                        p,
                        index: d.index,
                        residue_degree: d.residue_degree,
                        gorenstein: d.gorenstein,
                        dvr: d.dvr,
                        u_p_sign: d.u_p_sign,
                        fiber_dim: d.fiber_dim,
                        socle_dim: d.socle_dim,
                        cotangent_dim: d.cotangent_dim,
                        ord_deg,
                        ord_cong,
                        inferred_coker: ord_deg as i64 - ord_cong as i64,
                    });
                }
            }
        }
        out.push(DegCongReport {
            label,
            dim: class.dim,
            deg,
            cong,
            primes,
            ideals,
            local_diagnostics: local_on,
            s_module: s_mod,
            t_module: t_mod,
        });
    }
    Ok(LevelReport { level: n, classes: out })
}

/// Outcome of the divisibility `deg_{f,𝔪} | cong_{f,𝔪}` at a DVR ideal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Divisibility {
    Holds,
    Fails,
    NotApplicable,
}

pub fn divisibility_check(ideal: &IdealReport) -> Divisibility {
    if !ideal.dvr {
        Divisibility::NotApplicable
    } else if ideal.ord_deg <= ideal.ord_cong {
        Divisibility::Holds
    } else {
        Divisibility::Fails
    }
}

/// Theorem-level local statements that fail in `report`: `cong_{f,𝔪} |
/// deg_{f,𝔪}` when `p² ∤ n`, and equality at DVR or Gorenstein ideals.
pub fn local_violations(level: u64, report: &DegCongReport) -> Vec<String> {
    let mut out = Vec::new();
    for m in &report.ideals {
        let semistable = level % (m.p * m.p) != 0;
        let tag = format!("class {}, maximal ideal {} over {}", report.label, m.index, m.p);
        if semistable && m.ord_cong > m.ord_deg {
            out.push(format!("{tag}: cong_m = {}^{} does not divide deg_m = {}^{}", m.p, m.ord_cong, m.p, m.ord_deg));
        }
        if divisibility_check(m) == Divisibility::Fails {
            out.push(format!("{tag}: DVR but deg_m does not divide cong_m"));
        }
        if m.gorenstein == GorensteinVerdict::Gorenstein && m.ord_deg != m.ord_cong {
            out.push(format!("{tag}: Gorenstein but deg_m ≠ cong_m"));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ManinCheck {
    #[serde(serialize_with = "ser_big")]
    pub p: BigInt,
    pub ord_deg: u64,
    pub ord_cong: u64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ManinCertificate {
    pub label: String,
    pub checked: Vec<ManinCheck>,
    pub verdict: bool,
    /// The equality actually verified.
    pub statement: &'static str,
}

const MANIN_STATEMENT: &str = "ord_p(deg_f) = ord_p(cong_f) for every prime p dividing deg_f*cong_f with p^2 not dividing n; \
this equality is forced by ord_p of the Manin constant vanishing and is checked in its place";

/// Certificates for the dimension-1 classes of `report`.
pub fn manin_certify(report: &LevelReport) -> Vec<ManinCertificate> {
    let n = BigInt::from(report.level);
    report
        .classes
        .iter()
        .filter(|c| c.dim == 1)
        .map(|c| {
            let checked: Vec<ManinCheck> = c
                .primes
                .iter()
                .filter(|pp| (&n % (&pp.p * &pp.p)) != BigInt::from(0))
                .map(|pp| ManinCheck {
                    p: pp.p.clone(),
                    ord_deg: pp.ord_deg,
                    ord_cong: pp.ord_cong,
                    pass: pp.ord_deg == pp.ord_cong,
                })
                .collect();
            ManinCertificate {
                label: c.label.clone(),
                verdict: checked.iter().all(|x| x.pass),
                checked,
                statement: MANIN_STATEMENT,
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Anomaly {
    pub label: String,
    pub dim: usize,
    pub ord_deg_2: u64,
    pub ord_cong_2: u64,
    pub inferred_coker: i64,
    /// Maximal ideals over 2 that are neither DVR nor Gorenstein.
    pub bad_ideals: Vec<IdealReport>,
    /// Maximal ideals over 2 where `deg_{f,𝔪} ≠ cong_{f,𝔪}`.
    pub mismatched: Vec<IdealReport>,
    pub diagnosed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnomalyReport {
    pub level: u64,
    pub anomalies: Vec<Anomaly>,
}

/// Classes with `ord_2(deg_f) ≠ ord_2(cong_f)`, with their bad ideals over 2.
/// A mismatch at 𝔪 without 𝔪 being both non-DVR and not Gorenstein is an
/// error.
pub fn anomaly_scan(data: &LevelData) -> Result<AnomalyReport> {
    let opts = ReportOptions {
        extra_primes: vec![2],
        ..ReportOptions::default()
    };
    let report = deg_cong_report(data, &opts)?;
    anomalies_of(&report)
}

pub fn anomalies_of(report: &LevelReport) -> Result<AnomalyReport> {
    let mut anomalies = Vec::new();
    for c in &report.classes {
        for m in c.ideals.iter().filter(|m| m.ord_deg != m.ord_cong) {
            if m.dvr || m.gorenstein == GorensteinVerdict::Gorenstein {
                return Err(Error::InvariantViolation(format!(
                    "class {}: deg_m ≠ cong_m at maximal ideal {} over {} although it is {}",
                    c.label,
                    m.index,
                    m.p,
                    if m.dvr { "a DVR" } else { "Gorenstein" }
                )));
            }
        }
        let Some(two) = c.prime(2) else { continue };
        if two.ord_deg == two.ord_cong {
            continue;
        }
        let mismatched: Vec<IdealReport> = c.ideals_over(2).filter(|m| m.ord_deg != m.ord_cong).cloned().collect();
        if c.local_diagnostics && mismatched.is_empty() {
            return Err(Error::Internal(format!("class {}: 2-parts differ but no ideal carries it", c.label)));
        }
        anomalies.push(Anomaly {
            label: c.label.clone(),
            dim: c.dim,
            ord_deg_2: two.ord_deg,
            ord_cong_2: two.ord_cong,
            inferred_coker: two.inferred_coker,
            bad_ideals: c
                .ideals_over(2)
                .filter(|m| !m.dvr && m.gorenstein == GorensteinVerdict::NotGorenstein)
                .cloned()
                .collect(),
            mismatched,
            diagnosed: c.local_diagnostics,
        });
    }
    Ok(AnomalyReport {
        level: report.level,
        anomalies,
    })
}

/// `deg_f` divides the order of the 𝕋-congruence module; meaningful when
/// `𝒪_f ≅ ℤ`.
pub fn deg_divides_cong(report: &DegCongReport) -> bool {
    report.deg.is_one() || (&report.cong % &report.deg) == BigInt::from(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_eleven_is_trivial() {
        let data = LevelData::build(11).unwrap();
        let r = deg_cong_report(&data, &ReportOptions::default()).unwrap();
        assert_eq!(r.classes.len(), 1);
        assert_eq!(r.classes[0].deg, BigInt::one());
        assert_eq!(r.classes[0].cong, BigInt::one());
        assert!(r.classes[0].primes.is_empty());
        let certs = manin_certify(&r);
        assert!(certs[0].verdict && certs[0].checked.is_empty());
        assert!(anomaly_scan(&data).unwrap().anomalies.is_empty());
    }

    #[test]
    fn level_37_degrees_equal_congruence_numbers() {
        let data = LevelData::build(37).unwrap();
        let r = deg_cong_report(&data, &ReportOptions::default()).unwrap();
        assert_eq!(r.classes.len(), 2);
        for c in &r.classes {
            assert_eq!(c.deg, c.cong);
            assert_eq!(c.dim, 1);
            assert!(local_violations(37, c).is_empty());
        }
        // 37a and 37b are congruent modulo 2
        assert!(r.classes.iter().all(|c| c.deg == BigInt::from(2)));
        assert!(manin_certify(&r).iter().all(|c| c.verdict));
    }

    #[test]
    fn non_squarefree_levels_are_refused() {
        assert!(matches!(LevelData::build(12), Err(Error::NotSquarefree(12))));
    }

    #[test]
    fn ideal_reports_cover_prime_parts() {
        for n in [35u64, 65, 79] {
            let data = LevelData::build(n).unwrap();
            let r = deg_cong_report(&data, &ReportOptions::default()).unwrap();
            for c in &r.classes {
                for pp in &c.primes {
                    let p = pp.p.to_u64().unwrap();
                    let sum_deg: u64 = c.ideals_over(p).map(|m| m.ord_deg).sum();
                    let sum_cong: u64 = c.ideals_over(p).map(|m| m.ord_cong).sum();
                    assert_eq!((sum_deg, sum_cong), (pp.ord_deg, pp.ord_cong), "{} at {p}", c.label);
                }
                assert!(c.s_module.is_consistent() && c.t_module.is_consistent());
            }
        }
    }
}
