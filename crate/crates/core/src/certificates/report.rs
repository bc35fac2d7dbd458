use serde::Serialize;

use super::obstruction::{detect_obstructions, Obstruction, ObstructionKind, ObstructionScan};
use super::ratmap::RatmapHypotheses;
use super::{cubic, quad_poly, ratmap, CertConfig, CertError, Certificate, LevelReport, LevelStatus};
use crate::dynamics::{CollisionReport, CriticalData, OrbitRecord, PcfReport, StabilityReport};
use crate::exact::RatMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    QuadPoly,
    CubicPoly,
    QuadRatMap,
}

impl MapKind {
    /// The shape of `f`, if it is one the certificate engines handle.
    pub fn classify(f: &RatMap) -> Option<MapKind> {
        match (f.as_polynomial(), f.degree()) {
            (Some(p), 2) if p.is_monic() => Some(MapKind::QuadPoly),
            (Some(p), 3) if p.is_monic() => Some(MapKind::CubicPoly),
            (None, 2) => Some(MapKind::QuadRatMap),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    InfiniteIndex { reason: ObstructionKind },
    /// Levels certified maximal; not all of `1..=n_max`.
    FiniteIndexEvidence { levels: Vec<usize> },
    /// Every level `1..=n_max` certified maximal.
    IndexOne { levels: Vec<usize> },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conditionality {
    pub conditional: bool,
    /// Conjectures the corresponding finite-index theorem assumes.
    pub assumes: Vec<String>,
    pub note: String,
}

impl Conditionality {
    pub fn unconditional(note: impl Into<String>) -> Conditionality {
        Conditionality {
            conditional: false,
            assumes: vec![],
            note: note.into(),
        }
    }

    pub fn for_verdict(kind: MapKind, v: &Verdict) -> Conditionality {
        let per_level = "each certified level is maximal unconditionally";
        match (v, kind) {
            (Verdict::InfiniteIndex { .. }, _) => {
                Conditionality::unconditional("the obstruction forces infinite index over Q")
            }
            (Verdict::Inconclusive, _) => Conditionality::unconditional("no conclusion is drawn"),
            (_, MapKind::QuadPoly) => Conditionality {
                conditional: true,
                assumes: vec!["abc".into()],
                note: format!("{per_level}; finite index for all levels assumes the abc-Conjecture"),
            },
            (_, MapKind::CubicPoly) => Conditionality {
                conditional: true,
                assumes: vec!["abc".into(), "Vojta".into()],
                note: format!(
                    "{per_level}; finite index for all levels assumes the abc-Conjecture and Vojta's Conjecture"
                ),
            },
            (_, MapKind::QuadRatMap) => Conditionality::unconditional(format!(
                "{per_level}; no statement is made beyond the checked levels"
            )),
        }
    }
}

/// Full analysis of one map. All computations are over Q.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub schema: &'static str,
    pub map: String,
    pub degree: usize,
    pub kind: MapKind,
    pub n_max: usize,
    pub critical: Option<CriticalData>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypotheses: Option<RatmapHypotheses>,
    pub obstructions: Vec<Obstruction>,
    pub pcf: Option<PcfReport>,
    pub stability: Option<StabilityReport>,
    pub collision: Option<CollisionReport>,
    pub root_orbit: OrbitRecord,
    pub unknowns: Vec<String>,
    pub levels: Vec<LevelReport>,
    pub gaps: Vec<usize>,
    pub verdict: Verdict,
    pub conditionality: Conditionality,
    pub notes: Vec<String>,
}

/// The verdict implied by the obstructions and per-level results.
pub fn verdict(obstructions: &[Obstruction], levels: &[LevelReport], n_max: usize) -> Verdict {
    if let Some(ob) = obstructions.first() {
        return Verdict::InfiniteIndex { reason: ob.kind };
    }
    let certified: Vec<usize> = levels
        .iter()
        .filter(|l| l.status == LevelStatus::Certified)
        .map(|l| l.n)
        .collect();
    if levels.is_empty() || certified.is_empty() {
        Verdict::Inconclusive
    } else if n_max >= 1 && certified == (1..=n_max).collect::<Vec<_>>() {
        Verdict::IndexOne { levels: certified }
    } else {
        Verdict::FiniteIndexEvidence { levels: certified }
    }
}

/// Detect obstructions, search for per-level certificates when there are
/// none, re-check every certificate by exact evaluation, and assemble the
/// verdict.
pub fn analyze(f: &RatMap, kind: Option<MapKind>, cfg: &CertConfig) -> Result<AnalysisReport, CertError> {
    let kind = match kind.or_else(|| MapKind::classify(f)) {
        Some(k) => k,
        None => {
            return Err(CertError::Hypothesis(format!(
                "{f} is not a monic quadratic or cubic polynomial or a quadratic rational map"
            )))
        }
    };
    let scan = detect_obstructions(f, kind, cfg)?;
    let mut notes = vec!["the Mobius-commutant condition is not checked".to_string()];
    for ob in &scan.obstructions {
        if !ob.recheck(f) {
            return Err(CertError::Hypothesis(format!("obstruction {} failed its re-check", ob.kind)));
        }
    }
    let mut hypotheses = None;
    let mut levels = if scan.obstructions.is_empty() {
        certify(f, kind, &scan, cfg, &mut hypotheses)?
    } else {
        notes.push("certificate search skipped: an obstruction is present".into());
        vec![]
    };
    reverify_levels(f, kind, &scan, cfg, &mut levels, &mut notes);
    let v = verdict(&scan.obstructions, &levels, cfg.n_max);
    let conditionality = Conditionality::for_verdict(kind, &v);
    let ObstructionScan {
        obstructions,
        critical,
        pcf,
        stability,
        collision,
        root_orbit,
        unknowns,
    } = scan;
    Ok(AnalysisReport {
        schema: "1",
        map: f.to_string(),
        degree: f.degree(),
        kind,
        n_max: cfg.n_max,
        critical,
        hypotheses,
        obstructions,
        pcf,
        stability,
        collision,
        root_orbit,
        unknowns,
        gaps: levels.iter().filter(|l| l.status == LevelStatus::Gap).map(|l| l.n).collect(),
        levels,
        verdict: v,
        conditionality,
        notes,
    })
}

fn certify(
    f: &RatMap,
    kind: MapKind,
    scan: &ObstructionScan,
    cfg: &CertConfig,
    hypotheses: &mut Option<RatmapHypotheses>,
) -> Result<Vec<LevelReport>, CertError> {
    match kind {
        MapKind::QuadPoly => {
            let p = f.as_polynomial().ok_or(CertError::WrongShape {
                expected: 2,
                found: f.to_string(),
            })?;
            match &scan.stability {
                Some(stab) => quad_poly::certify_with(&p, stab, cfg),
                None => quad_poly::certify_quadratic_poly(&p, cfg),
            }
        }
        MapKind::CubicPoly => {
            let p = f.as_polynomial().ok_or(CertError::WrongShape {
                expected: 3,
                found: f.to_string(),
            })?;
            cubic::certify_cubic_poly(&p, cfg)
        }
        MapKind::QuadRatMap => {
            let (h, levels) = ratmap::certify_quadratic_ratmap(f, cfg)?;
            *hypotheses = Some(h);
            Ok(levels)
        }
    }
}

/// Re-check one certificate of `f` through exact evaluation. `None` when
/// the exact values exceed the configured bit cap.
pub fn reverify(f: &RatMap, kind: MapKind, cert: &Certificate, cfg: &CertConfig) -> Option<bool> {
    match (kind, f.as_polynomial()) {
        (MapKind::QuadPoly, Some(p)) => {
            let stab = quad_poly::stability_for(&p, cfg).ok()?;
            quad_poly::reverify(&p, &stab, cert, cfg)
        }
        (MapKind::CubicPoly, Some(p)) => cubic::reverify(&p, cert, cfg),
        (MapKind::QuadRatMap, _) => ratmap::reverify(f, cert, cfg),
        _ => None,
    }
}

/// Run the exact re-check on every certificate. A level whose certificate
/// fails or cannot be rebuilt within the bit cap becomes a gap.
fn reverify_levels(
    f: &RatMap,
    kind: MapKind,
    scan: &ObstructionScan,
    cfg: &CertConfig,
    levels: &mut [LevelReport],
    notes: &mut Vec<String>,
) {
    for level in levels.iter_mut() {
        let mut failed = false;
        for cert in level.certificates.iter_mut() {
            let r = match (kind, f.as_polynomial()) {
                (MapKind::QuadPoly, Some(p)) => match &scan.stability {
                    Some(stab) => quad_poly::reverify(&p, stab, cert, cfg),
                    None => None,
                },
                (MapKind::CubicPoly, Some(p)) => cubic::reverify(&p, cert, cfg),
                (MapKind::QuadRatMap, _) => ratmap::reverify(f, cert, cfg),
                _ => None,
            };
            cert.reverified = r;
            if r == Some(false) {
                failed = true;
            }
        }
        if failed {
            notes.push(format!("level {}: certificate failed exact re-verification", level.n));
            *level = LevelReport::gap(level.n, "certificate failed exact re-verification");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_map;

    fn run(s: &str, n: usize) -> AnalysisReport {
        let cfg = CertConfig {
            n_max: n,
            ..CertConfig::default()
        };
        analyze(&parse_map(s).unwrap(), None, &cfg).unwrap()
    }

    #[test]
    fn infinite_index_examples() {
        assert_eq!(run("z^2-2", 4).verdict, Verdict::InfiniteIndex { reason: ObstructionKind::Pcf });
        assert_eq!(
            run("z^3+5", 3).verdict,
            Verdict::InfiniteIndex {
                reason: ObstructionKind::UnicriticalHighDegree
            }
        );
        let r = run("z^2-z", 4);
        assert_eq!(r.verdict, Verdict::InfiniteIndex { reason: ObstructionKind::RootPeriodic });
        assert!(!r.conditionality.conditional);
    }

    #[test]
    fn z2_plus_1_evidence() {
        let r = run("z^2+1", 5);
        assert_eq!(r.verdict, Verdict::FiniteIndexEvidence { levels: vec![1, 3, 4, 5] });
        assert_eq!(r.gaps, vec![2]);
        assert_eq!(r.conditionality.assumes, vec!["abc".to_string()]);
        assert!(r.levels.iter().flat_map(|l| &l.certificates).all(|c| c.reverified == Some(true)));
    }

    #[test]
    fn family_member_index_one() {
        let r = run("(z^2-4z+1)/(2z)", 5);
        assert_eq!(r.kind, MapKind::QuadRatMap);
        assert_eq!(r.verdict, Verdict::IndexOne { levels: vec![1, 2, 3, 4, 5] });
    }

    #[test]
    fn verdict_rules() {
        assert_eq!(verdict(&[], &[], 3), Verdict::Inconclusive);
        let gap = LevelReport::gap(1, "none");
        assert_eq!(verdict(&[], &[gap], 1), Verdict::Inconclusive);
    }

    #[test]
    fn serializes() {
        let json = serde_json::to_value(run("z^3-3z+1", 2)).unwrap();
        assert_eq!(json["schema"], "1");
        assert_eq!(json["levels"][1]["certificates"][0]["prime"], "19");
        assert_eq!(json["verdict"]["kind"], "finite-index-evidence");
    }
}
