use arbor_core::certificates::{analyze, AnalysisReport, CertConfig, MapKind};
use arbor_core::dynamics::{disc_iterate, is_pcf, orbit, stability_report, OrbitStatus, PcfStatus, StabilityVerdict};
use arbor_core::exact::{parse_map, parse_rational, Poly, ProjPoint, RatMap};
use arbor_core::family::{fb_certify, fb_sequences, fb_verify_lemmas, FamilyClass, LemmaReport, SEQUENCE_LEVEL_CAP};
use arbor_core::number_theory::FactorEffort;
use arbor_core::polyfactor::FactorConfig;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::{text, Command, KindArg, RunConfig};

pub const THREADS_ENV: &str = "ARBOR_CERT_THREADS";

/// One report: the JSON document, its text rendering, and the labels
/// `--expect` is compared against.
pub struct Output {
    pub json: Value,
    pub text: String,
    pub findings: Vec<String>,
}

pub fn run(config: &RunConfig) -> Result<Output, CliError> {
    match &config.command {
        Command::Orbit { map, point, max_steps } => cmd_orbit(map, point, *max_steps),
        Command::Certify {
            kind,
            map,
            levels,
            prime_bound,
        } => cmd_certify(*kind, map, &cert_config(config, *levels, *prime_bound)?),
        Command::Family {
            b,
            b_range,
            levels,
            prime_bound,
        } => {
            let bs = match (b, b_range) {
                (Some(b), _) => {
                    if *b == 1 {
                        return Err(CliError::Input("b = 1 is excluded: the map collapses to a constant".into()));
                    }
                    vec![*b]
                }
                (None, Some(r)) => parse_range(r)?,
                (None, None) => return Err(CliError::Input("one of --b or --b-range is required".into())),
            };
            cmd_family(&bs, &cert_config(config, *levels, *prime_bound)?)
        }
        Command::Stability { map, levels } => cmd_stability(map, *levels, &factor_config(config)),
        Command::Disc { map, iterate, t, oracle } => cmd_disc(map, *iterate, t, *oracle),
        Command::Pcf { map, max_steps } => cmd_pcf(map, *max_steps),
    }
}

fn positive(name: &str, v: u64) -> Result<(), CliError> {
    if v == 0 {
        return Err(CliError::Input(format!("--{name} must be positive")));
    }
    Ok(())
}

fn factor_config(config: &RunConfig) -> FactorConfig {
    let mut f = FactorConfig {
        seed: config.seed,
        ..FactorConfig::default()
    };
    if let Some(cap) = config.degree_cap {
        f.degree_cap = cap;
    }
    f
}

fn cert_config(config: &RunConfig, levels: usize, prime_bound: u64) -> Result<CertConfig, CliError> {
    positive("levels", levels as u64)?;
    if prime_bound < 2 {
        return Err(CliError::Input("--prime-bound must be at least 2".into()));
    }
    let mut effort = FactorEffort::default();
    if let Some(r) = config.rho_iterations {
        positive("rho-iterations", r)?;
        effort.rho_iterations = r;
    }
    if let Some(cap) = config.degree_cap {
        positive("degree-cap", cap as u64)?;
    }
    Ok(CertConfig {
        n_max: levels,
        prime_bound,
        factor: factor_config(config),
        effort,
        ..CertConfig::default()
    })
}

/// A map of degree at least 2.
fn read_map(text: &str) -> Result<RatMap, CliError> {
    let f = parse_map(text)?;
    if f.degree() < 2 {
        return Err(CliError::Input(format!("{f} has degree {}, need at least 2", f.degree())));
    }
    Ok(f)
}

fn read_polynomial(text: &str) -> Result<Poly, CliError> {
    let f = read_map(text)?;
    f.as_polynomial()
        .ok_or_else(|| CliError::Input(format!("{f} is not a polynomial")))
}

fn read_point(text: &str) -> Result<ProjPoint, CliError> {
    if text.trim() == "inf" {
        return Ok(ProjPoint::Infinity);
    }
    Ok(ProjPoint::Finite(parse_rational(text)?))
}

/// `A..B`, both ends included.
fn parse_range(text: &str) -> Result<Vec<i64>, CliError> {
    let bad = || CliError::Input(format!("cannot parse range {text:?}, expected A..B"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(CliError::Input(format!("empty range {text:?}")));
    }
    Ok((a..=b).collect())
}

fn cmd_orbit(map: &str, point: &str, max_steps: usize) -> Result<Output, CliError> {
    positive("max-steps", max_steps as u64)?;
    let f = read_map(map)?;
    let x = read_point(point)?;
    let record = orbit(&f, &x, max_steps);
    let finding = match record.status {
        OrbitStatus::Preperiodic { .. } => "preperiodic",
        OrbitStatus::Escaping { .. } => "escaping",
        OrbitStatus::Truncated => "truncated",
    };
    Ok(Output {
        text: text::orbit(&f, &record),
        json: json!({ "schema": "1", "command": "orbit", "map": f.to_string(), "orbit": record }),
        findings: vec![finding.into()],
    })
}

fn kind_of(k: KindArg) -> MapKind {
    match k {
        KindArg::QuadPoly => MapKind::QuadPoly,
        KindArg::CubicPoly => MapKind::CubicPoly,
        KindArg::QuadRatmap => MapKind::QuadRatMap,
    }
}

fn verdict_label(r: &AnalysisReport) -> String {
    let v = serde_json::to_value(&r.verdict).expect("verdict serializes");
    v["kind"].as_str().unwrap_or_default().to_string()
}

fn cmd_certify(kind: KindArg, map: &str, cfg: &CertConfig) -> Result<Output, CliError> {
    let f = read_map(map)?;
    let kind = kind_of(kind);
    if MapKind::classify(&f) != Some(kind) {
        return Err(CliError::Input(format!("{f} is not of the requested kind")));
    }
    let report = analyze(&f, Some(kind), cfg)?;
    Ok(Output {
        text: text::analysis(&report),
        findings: vec![verdict_label(&report)],
        json: serde_json::to_value(&report).expect("report serializes"),
    })
}

#[derive(Serialize)]
struct FamilyRecord {
    b: i64,
    class: FamilyClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<AnalysisReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lemmas: Option<LemmaReport>,
    /// Levels where `u_n` is `+-` a square.
    pm_square_levels: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    errors: Vec<String>,
}

impl FamilyRecord {
    fn finding(&self) -> String {
        match &self.report {
            Some(r) => verdict_label(r),
            None => "error".into(),
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Input(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Io(e.to_string()))
}

fn family_record(b: i64, cfg: &CertConfig) -> Result<FamilyRecord, CliError> {
    let mut errors = Vec::new();
    let report = match fb_certify(b, cfg) {
        Ok(r) => Some(r),
        Err(e) => {
            let e = CliError::from(e);
            if matches!(e, CliError::Cap(_)) {
                return Err(e);
            }
            errors.push(e.to_string());
            None
        }
    };
    let lemmas = match fb_verify_lemmas(b, cfg.n_max) {
        Ok(l) => Some(l),
        Err(e) => {
            errors.push(format!("lemma checks: {e}"));
            None
        }
    };
    let pm_square_levels = match fb_sequences(b, cfg.n_max) {
        Ok(seq) => seq.levels.iter().filter(|l| l.u_is_pm_square).map(|l| l.n).collect(),
        Err(_) => vec![],
    };
    Ok(FamilyRecord {
        b,
        class: FamilyClass::of(b),
        report,
        lemmas,
        pm_square_levels,
        errors,
    })
}

fn cmd_family(bs: &[i64], cfg: &CertConfig) -> Result<Output, CliError> {
    if cfg.n_max > SEQUENCE_LEVEL_CAP {
        return Err(CliError::Cap(format!(
            "--levels {} exceeds the sequence cap {SEQUENCE_LEVEL_CAP}",
            cfg.n_max
        )));
    }
    let members: Vec<i64> = bs.iter().copied().filter(|&b| b != 1).collect();
    let records: Vec<FamilyRecord> = thread_pool()?.install(|| {
        members
            .par_iter()
            .map(|&b| family_record(b, cfg))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let proven_all_index_one = records
        .iter()
        .filter(|r| r.class.is_proven())
        .all(|r| r.finding() == "index-one");
    let lemma_failures: usize = records.iter().flat_map(|r| &r.lemmas).map(|l| l.failures().count()).sum();
    let skipped: Vec<i64> = bs.iter().copied().filter(|&b| b == 1).collect();
    Ok(Output {
        text: text::family(&records.iter().map(|r| (r.b, r.class, r.finding())).collect::<Vec<_>>(), lemma_failures),
        findings: records.iter().map(FamilyRecord::finding).collect(),
        json: json!({
            "schema": "1",
            "command": "family",
            "levels": cfg.n_max,
            "skipped": skipped,
            "proven_classes_all_index_one": proven_all_index_one,
            "lemma_failures": lemma_failures,
            "records": records,
        }),
    })
}

fn cmd_stability(map: &str, levels: usize, cfg: &FactorConfig) -> Result<Output, CliError> {
    positive("levels", levels as u64)?;
    positive("degree-cap", cfg.degree_cap as u64)?;
    let p = read_polynomial(map)?;
    let report = stability_report(&p, levels, cfg)?;
    let finding = match report.verdict {
        StabilityVerdict::StableBy(_) => "stable-by",
        StabilityVerdict::GrowingCounts => "growing-counts",
        StabilityVerdict::Inconclusive => "inconclusive",
    };
    Ok(Output {
        text: text::stability(&p, &report),
        json: json!({ "schema": "1", "command": "stability", "map": p.to_string(), "stability": report }),
        findings: vec![finding.into()],
    })
}

fn cmd_disc(map: &str, n: usize, t: &str, oracle: bool) -> Result<Output, CliError> {
    positive("iterate", n as u64)?;
    let p = read_polynomial(map)?;
    let t = parse_rational(t)?;
    let cmp = disc_iterate(&p, n, &t, oracle)?;
    let finding = match cmp.agree {
        Some(true) => "agree",
        Some(false) => "disagree",
        None => "unchecked",
    };
    Ok(Output {
        text: text::disc(&p, n, &t, &cmp),
        json: json!({
            "schema": "1",
            "command": "disc",
            "map": p.to_string(),
            "iterate": n,
            "t": t.to_string(),
            "discriminant": cmp,
        }),
        findings: vec![finding.into()],
    })
}

fn cmd_pcf(map: &str, max_steps: usize) -> Result<Output, CliError> {
    positive("max-steps", max_steps as u64)?;
    let f = read_map(map)?;
    let report = is_pcf(&f, max_steps)?;
    let finding = match report.status {
        PcfStatus::Pcf => "pcf",
        PcfStatus::NotPcf => "not-pcf",
        PcfStatus::Unknown => "unknown",
    };
    Ok(Output {
        text: text::pcf(&f, &report),
        json: json!({ "schema": "1", "command": "pcf", "map": f.to_string(), "pcf": report }),
        findings: vec![finding.into()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_range("-2..-1").unwrap(), vec![-2, -1]);
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("2-5").is_err());
    }

    #[test]
    fn points() {
        assert_eq!(read_point("inf").unwrap(), ProjPoint::Infinity);
        assert!(read_point("1/0").is_err());
        assert!(read_point("z").is_err());
    }
}
