use std::fmt::Write as _;

use maninforge::arith::is_squarefree;
use maninforge::invariants::{
    anomalies_of, deg_cong_report, deg_divides_cong, local_violations, manin_certify, LevelData, ReportOptions,
};
use maninforge::modsym::build_space;
use maninforge::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cache::Cache;

/// Cuspidal rank above which a level needs `--long-running`.
pub const LONG_RUNNING_RANK: usize = 160;
/// Number of Hecke eigenvalue previews per class.
const PREVIEW: usize = 6;

pub struct Options {
    pub json: bool,
    pub long_running: bool,
    pub cache: Cache,
}

pub struct Output {
    pub text: String,
    pub violated: bool,
}

impl Output {
    pub fn code(&self) -> u8 {
        if self.violated {
            2
        } else {
            0
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    /// Applicability guard refused the input (exit 3).
    Refused(String),
    /// A theorem-level invariant failed (exit 2).
    Violation(String),
    Other(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Refused(_) => 3,
            Failure::Violation(_) => 2,
            Failure::Other(_) => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotSquarefree(_) | Error::NotApplicable(_) => Failure::Refused(e.to_string()),
            Error::InvariantViolation(_) | Error::NonSquareIndex { .. } => Failure::Violation(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

type CmdResult = Result<Output, Failure>;

fn parse(payload: &str) -> Result<Value, Failure> {
    serde_json::from_str(payload).map_err(|e| Failure::Other(format!("malformed artifact: {e}")))
}

fn to_text(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable report")
}

fn emit(opts: &Options, v: &Value, violated: bool, render: impl FnOnce(&Value) -> String) -> CmdResult {
    let text = if opts.json { to_text(v) + "\n" } else { render(v) };
    Ok(Output { text, violated })
}

fn space_value(opts: &Options, n: u64) -> Result<Value, Failure> {
    if n == 0 {
        return Err(Failure::Refused("level must be at least 1".into()));
    }
    let payload = opts.cache.get_or_compute(n, "space", || -> Result<String, Failure> {
        let s = build_space(n);
        Ok(to_text(&json!({
            "level": n,
            "p1_size": s.p1().len(),
            "full_rank": s.rank(),
            "cuspidal_rank": s.cuspidal_rank(),
            "cusps": s.cusp_count(),
        })))
    })?;
    parse(&payload)
}

fn guard(opts: &Options, n: u64) -> Result<(), Failure> {
    if n == 0 || !is_squarefree(n) {
        return Err(Failure::Refused(format!(
            "level {n} is not squarefree; only squarefree levels are supported"
        )));
    }
    let rank = space_value(opts, n)?["cuspidal_rank"].as_u64().unwrap_or(0) as usize;
    if rank > LONG_RUNNING_RANK && !opts.long_running {
        return Err(Failure::Refused(format!(
            "level {n} has cuspidal rank {rank} > {LONG_RUNNING_RANK}; pass --long-running to proceed"
        )));
    }
    Ok(())
}

pub fn space(opts: &Options, n: u64) -> CmdResult {
    let v = space_value(opts, n)?;
    emit(opts, &v, false, |v| {
        format!(
            "level {}\nP1 size         {}\nfull rank       {}\ncuspidal rank   {}\ncusps           {}\n",
            v["level"], v["p1_size"], v["full_rank"], v["cuspidal_rank"], v["cusps"]
        )
    })
}

fn decompose_value(data: &LevelData) -> Value {
    let classes: Vec<Value> = data
        .classes()
        .iter()
        .map(|c| {
            let traces: Vec<Value> = c
                .traces
                .iter()
                .take(PREVIEW)
                .map(|(l, t)| json!({"l": l, "trace": t.to_string()}))
                .collect();
            let eigenvalues: Vec<Value> = c
                .eigenvalues
                .iter()
                .take(PREVIEW)
                .map(|(l, coords)| json!({"l": l, "coords": coords.iter().map(|x| x.to_string()).collect::<Vec<_>>()}))
                .collect();
            json!({
                "label": c.label.to_string(),
                "dim": c.dim,
                "field_poly": c.field_poly.to_string(),
                "traces": traces,
                "eigenvalues": eigenvalues,
            })
        })
        .collect();
    json!({
        "level": data.level(),
        "new_rank": data.decomposition.new_rank,
        "classes": classes,
    })
}

pub fn decompose(opts: &Options, n: u64) -> CmdResult {
    guard(opts, n)?;
    let payload = opts.cache.get_or_compute(n, "decompose", || -> Result<String, Failure> {
        Ok(to_text(&decompose_value(&LevelData::build(n)?)))
    })?;
    let v = parse(&payload)?;
    emit(opts, &v, false, |v| {
        let classes = v["classes"].as_array().cloned().unwrap_or_default();
        let mut out = format!("level {}: {} newform classes, new rank {}\n", v["level"], classes.len(), v["new_rank"]);
        for c in &classes {
            let _ = write!(out, "{:<8} dim {:<3}", str_of(&c["label"]), c["dim"]);
            let eig = c["eigenvalues"].as_array().cloned().unwrap_or_default();
            if c["dim"] == 1 && !eig.is_empty() {
                for e in &eig {
                    let _ = write!(out, "  a{}={}", e["l"], str_of(&e["coords"][0]));
                }
            } else {
                for t in c["traces"].as_array().into_iter().flatten() {
                    let _ = write!(out, "  Tr a{}={}", t["l"], str_of(&t["trace"]));
                }
            }
            out.push('\n');
        }
        out
    })
}

fn str_of(v: &Value) -> String {
    v.as_str().map_or_else(|| v.to_string(), str::to_string)
}

fn invariants_value(data: &LevelData, primes: &[u64]) -> Result<Value, Failure> {
    let opts = ReportOptions {
        extra_primes: primes.to_vec(),
        ..ReportOptions::default()
    };
    let report = deg_cong_report(data, &opts)?;
    let mut violations: Vec<String> = Vec::new();
    for c in &report.classes {
        violations.extend(local_violations(report.level, c));
        if c.dim == 1 && !deg_divides_cong(c) {
            violations.push(format!("class {}: deg_f does not divide cong_f for a rank-one order", c.label));
        }
    }
    if let Err(e) = anomalies_of(&report) {
        violations.push(e.to_string());
    }
    let mut v = serde_json::to_value(&report).map_err(|e| Failure::Other(e.to_string()))?;
    v["violations"] = json!(violations);
    Ok(v)
}

pub fn invariants(opts: &Options, n: u64, class: Option<usize>, primes: &[u64]) -> CmdResult {
    guard(opts, n)?;
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    if let Some(&p) = primes.iter().find(|&&p| !maninforge::arith::is_prime_u64(p)) {
        return Err(Failure::Refused(format!("{p} is not prime")));
    }
    let artifact = if primes.is_empty() {
        "invariants".to_string()
    } else {
        format!(
            "invariants-p{}",
            primes.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("-")
        )
    };
    let payload = opts.cache.get_or_compute(n, &artifact, || -> Result<String, Failure> {
        Ok(to_text(&invariants_value(&LevelData::build(n)?, &primes)?))
    })?;
    let mut v = parse(&payload)?;
    if let Some(k) = class {
        let label = format!("{n}.{k}");
        let classes = v["classes"].as_array().cloned().unwrap_or_default();
        let kept: Vec<Value> = classes.into_iter().filter(|c| c["label"] == label.as_str()).collect();
        if kept.is_empty() {
            return Err(Failure::Refused(format!("level {n} has no class {label}")));
        }
        v["classes"] = Value::Array(kept);
    }
    let violated = v["violations"].as_array().is_some_and(|a| !a.is_empty());
    emit(opts, &v, violated, render_invariants)
}

fn render_invariants(v: &Value) -> String {
    let mut out = format!("level {}\n", v["level"]);
    for c in v["classes"].as_array().into_iter().flatten() {
        let _ = writeln!(
            out,
            "{:<8} dim {:<3} deg {}  cong {}",
            str_of(&c["label"]),
            c["dim"],
            str_of(&c["deg"]),
            str_of(&c["cong"])
        );
        for p in c["primes"].as_array().into_iter().flatten() {
            let _ = writeln!(
                out,
                "    p={:<6} ord_deg {:<4} ord_cong {:<4} inferred coker exponent {}",
                str_of(&p["p"]),
                p["ord_deg"],
                p["ord_cong"],
                p["inferred_coker"]
            );
        }
        for m in c["ideals"].as_array().into_iter().flatten() {
            let _ = writeln!(
                out,
                "    m over {} #{} (f={}): gorenstein {}, dvr {}, fiber {}, socle {}, cotangent {}, ord_deg {}, ord_cong {}",
                m["p"],
                m["index"],
                m["residue_degree"],
                str_of(&m["gorenstein"]),
                m["dvr"],
                m["fiber_dim"],
                m["socle_dim"],
                m["cotangent_dim"],
                m["ord_deg"],
                m["ord_cong"]
            );
        }
        if c["local_diagnostics"] == false {
            out.push_str("    (maximal ideal diagnostics skipped at this rank)\n");
        }
    }
    for w in v["violations"].as_array().into_iter().flatten() {
        let _ = writeln!(out, "VIOLATION: {}", str_of(w));
    }
    out
}

pub fn certify(opts: &Options, n: u64) -> CmdResult {
    guard(opts, n)?;
    let payload = opts.cache.get_or_compute(n, "certify", || -> Result<String, Failure> {
        let data = LevelData::build(n)?;
        let opts = ReportOptions {
            local: false,
            ..ReportOptions::default()
        };
        let certs = manin_certify(&deg_cong_report(&data, &opts)?);
        let pass = certs.iter().all(|c| c.verdict);
        Ok(to_text(&json!({"level": n, "certificates": certs, "pass": pass})))
    })?;
    let v = parse(&payload)?;
    let violated = v["pass"] == false;
    emit(opts, &v, violated, |v| {
        let mut out = format!("level {}\n", v["level"]);
        let certs = v["certificates"].as_array().cloned().unwrap_or_default();
        if certs.is_empty() {
            out.push_str("no dimension-1 classes\n");
        }
        for c in &certs {
            let checked: Vec<String> = c["checked"]
                .as_array()
                .into_iter()
                .flatten()
                .map(|x| format!("p={}: {} vs {}", str_of(&x["p"]), x["ord_deg"], x["ord_cong"]))
                .collect();
            let _ = writeln!(
                out,
                "{:<8} {}  [{}]",
                str_of(&c["label"]),
                if c["verdict"] == true { "pass" } else { "FAIL" },
                checked.join(", ")
            );
        }
        out
    })
}

enum LevelScan {
    Done(Value),
    Skipped(String),
    Violated(String),
}

fn scan_level(opts: &Options, n: u64) -> Result<LevelScan, Failure> {
    match guard(opts, n) {
        Ok(()) => {}
        Err(Failure::Refused(m)) => return Ok(LevelScan::Skipped(m)),
        Err(e) => return Err(e),
    }
    let computed = opts.cache.get_or_compute(n, "anomalies", || -> Result<String, Failure> {
        let data = LevelData::build(n)?;
        let opts = ReportOptions {
            extra_primes: vec![2],
            ..ReportOptions::default()
        };
        let report = deg_cong_report(&data, &opts)?;
        Ok(to_text(&anomalies_of(&report)?))
    });
    match computed {
        Ok(payload) => Ok(LevelScan::Done(parse(&payload)?)),
        Err(Failure::Violation(m)) => Ok(LevelScan::Violated(format!("level {n}: {m}"))),
        Err(e) => Err(e),
    }
}

pub fn scan(opts: &Options, n_min: u64, n_max: u64) -> CmdResult {
    if n_min == 0 || n_min > n_max {
        return Err(Failure::Refused(format!("invalid level range {n_min}..{n_max}")));
    }
    let levels: Vec<u64> = (n_min..=n_max).filter(|&n| is_squarefree(n)).collect();
    let results: Vec<Result<LevelScan, Failure>> = levels.par_iter().map(|&n| scan_level(opts, n)).collect();
    let mut anomalies = Vec::new();
    let mut skipped = Vec::new();
    let mut violations = Vec::new();
    let mut scanned = 0;
    for r in results {
        match r? {
            LevelScan::Done(v) => {
                scanned += 1;
                for a in v["anomalies"].as_array().into_iter().flatten() {
                    let mut a = a.clone();
                    a["level"] = v["level"].clone();
                    anomalies.push(a);
                }
            }
            LevelScan::Skipped(m) => skipped.push(m),
            LevelScan::Violated(m) => violations.push(m),
        }
    }
    let v = json!({
        "range": [n_min, n_max],
        "levels_scanned": scanned,
        "skipped": skipped,
        "anomalies": anomalies,
        "violations": violations,
    });
    let violated = !violations.is_empty();
    emit(opts, &v, violated, |v| {
        let mut out = format!(
            "scanned {} squarefree levels in {}..{}\n",
            v["levels_scanned"], n_min, n_max
        );
        for s in v["skipped"].as_array().into_iter().flatten() {
            let _ = writeln!(out, "skipped: {}", str_of(s));
        }
        let list = v["anomalies"].as_array().cloned().unwrap_or_default();
        let _ = writeln!(out, "{} anomalies", list.len());
        for a in &list {
            let bad: Vec<String> = a["bad_ideals"]
                .as_array()
                .into_iter()
                .flatten()
                .map(|m| format!("#{} (f={})", m["index"], m["residue_degree"]))
                .collect();
            let _ = writeln!(
                out,
                "{:<8} dim {:<3} ord2 deg {} vs cong {}; non-DVR non-Gorenstein ideals over 2: {}",
                str_of(&a["label"]),
                a["dim"],
                a["ord_deg_2"],
                a["ord_cong_2"],
                if bad.is_empty() { "none found".to_string() } else { bad.join(", ") }
            );
        }
        for w in v["violations"].as_array().into_iter().flatten() {
            let _ = writeln!(out, "VIOLATION: {}", str_of(w));
        }
        out
    })
}
