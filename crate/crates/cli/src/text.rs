use std::fmt::Write;

use arbor_core::certificates::{AnalysisReport, LevelStatus, Verdict};
use arbor_core::dynamics::{DiscComparison, OrbitRecord, OrbitStatus, PcfReport, PcfStatus, StabilityReport};
use arbor_core::dynamics::{LevelFactorization, StabilityVerdict};
use arbor_core::exact::{Poly, RatMap};
use arbor_core::family::FamilyClass;
use num_rational::BigRational;

/// Longest value printed in full.
const SHOW: usize = 40;

fn short(s: String) -> String {
    if s.len() <= SHOW {
        s
    } else {
        format!("<{} chars>", s.len())
    }
}

fn status(s: &OrbitStatus) -> String {
    match s {
        OrbitStatus::Preperiodic { tail, cycle } => format!("preperiodic, tail {tail} cycle {cycle}"),
        OrbitStatus::Escaping { at_step } => format!("escaping, detected at step {at_step}"),
        OrbitStatus::Truncated => "undecided within the step bound".into(),
    }
}

pub fn orbit(f: &RatMap, r: &OrbitRecord) -> String {
    let values: Vec<String> = r.values.iter().map(|v| short(v.to_string())).collect();
    format!(
        "map: {f}\nstart: {}\nstatus: {}\norbit: {}\n",
        r.start,
        status(&r.status),
        values.join(" -> ")
    )
}

fn verdict(v: &Verdict) -> String {
    let list = |l: &[usize]| l.iter().map(usize::to_string).collect::<Vec<_>>().join(", ");
    match v {
        Verdict::InfiniteIndex { reason } => format!("infinite index ({reason})"),
        Verdict::FiniteIndexEvidence { levels } => format!("finite-index evidence at levels {}", list(levels)),
        Verdict::IndexOne { levels } => format!("index one at levels {}", list(levels)),
        Verdict::Inconclusive => "inconclusive".into(),
    }
}

pub fn analysis(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "map: {} (degree {})", r.map, r.degree);
    if r.obstructions.is_empty() {
        let _ = writeln!(s, "obstructions: none");
    }
    for ob in &r.obstructions {
        let _ = writeln!(s, "obstruction: {}", ob.kind);
    }
    for u in &r.unknowns {
        let _ = writeln!(s, "undecided: {u}");
    }
    for l in &r.levels {
        let state = match l.status {
            LevelStatus::Certified => "certified",
            LevelStatus::Gap => "gap",
            LevelStatus::Conditional => "conditional",
        };
        let _ = write!(s, "level {}: {state}", l.n);
        if let Some(c) = l.certificates.first() {
            match &c.prime {
                Some(p) => {
                    let _ = write!(s, ", prime {}", short(p.to_string()));
                }
                None => {
                    let mode = serde_json::to_value(c.mode).expect("mode serializes");
                    let _ = write!(s, ", {}", mode.as_str().unwrap_or_default());
                }
            }
        }
        if let Some(note) = &l.note {
            let _ = write!(s, " ({note})");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "verdict: {}", verdict(&r.verdict));
    let _ = writeln!(s, "note: {}", r.conditionality.note);
    s
}

pub fn family(rows: &[(i64, FamilyClass, String)], lemma_failures: usize) -> String {
    let mut s = String::new();
    for (b, class, finding) in rows {
        let _ = writeln!(s, "b = {b}: {finding} ({class:?})");
    }
    let _ = writeln!(s, "lemma check failures: {lemma_failures}");
    s
}

pub fn stability(p: &Poly, r: &StabilityReport) -> String {
    let counts: Vec<String> = r
        .levels
        .iter()
        .map(|l| match &l.result {
            LevelFactorization::Complete { factor_count, .. } => factor_count.to_string(),
            LevelFactorization::Inconclusive { .. } => "?".into(),
        })
        .collect();
    let v = match r.verdict {
        StabilityVerdict::StableBy(n) => format!("stable by level {n}"),
        StabilityVerdict::GrowingCounts => "growing counts".into(),
        StabilityVerdict::Inconclusive => "inconclusive".into(),
    };
    format!("map: {p}\nfactor counts: {}\nverdict: {v}\n", counts.join(", "))
}

pub fn disc(p: &Poly, n: usize, t: &BigRational, c: &DiscComparison) -> String {
    let show = |x: &Option<BigRational>| x.as_ref().map_or("not computed".into(), |v| short(v.to_string()));
    let agree = c.agree.map_or("unchecked".into(), |a| a.to_string());
    format!(
        "Disc(f^{n} - {t}) for f = {p}\nformula: {}\noracle: {}\nagree: {agree}\n",
        show(&c.formula),
        show(&c.oracle)
    )
}

pub fn pcf(f: &RatMap, r: &PcfReport) -> String {
    let mut s = String::new();
    let word = match r.status {
        PcfStatus::Pcf => "PCF",
        PcfStatus::NotPcf => "not PCF",
        PcfStatus::Unknown => "unknown",
    };
    let _ = writeln!(s, "map: {f}\nstatus: {word}");
    for o in &r.orbits {
        let _ = writeln!(s, "critical point {}: {}", o.start, status(&o.status));
    }
    s
}
