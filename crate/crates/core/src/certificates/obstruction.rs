use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::report::MapKind;
use super::{CertConfig, CertError};
use crate::dynamics::{
    collision, critical_points, cubic_disc_identity, is_pcf, orbit, stability_report, CollisionReport, CriticalData,
    CubicIdentityCheck, DynamicsError, OrbitRecord, OrbitStatus, PcfReport, PcfStatus, StabilityReport,
};
use crate::exact::{Poly, ProjPoint, RatMap};
use crate::number_theory::is_rational_square;

/// Largest `3^n` for which the cubic discriminant identity is evaluated.
const DISC_CHECK_DEGREE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ObstructionKind {
    Pcf,
    UnicriticalHighDegree,
    Collision { r: usize },
    RootPeriodic,
    DiscSquareCubic,
}

impl std::fmt::Display for ObstructionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ObstructionKind::Pcf => write!(f, "post-critically finite"),
            ObstructionKind::UnicriticalHighDegree => write!(f, "unicritical of degree at least 3"),
            ObstructionKind::Collision { r } => write!(f, "critical orbits collide at step {r}"),
            ObstructionKind::RootPeriodic => write!(f, "0 is periodic"),
            ObstructionKind::DiscSquareCubic => write!(f, "Disc(f^n) is a square in K_(n-1)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Evidence {
    CriticalOrbits { orbits: Vec<OrbitRecord> },
    Critical { data: CriticalData },
    Collision {
        #[serde(serialize_with = "crate::serde_util::rationals")]
        critical_points: Vec<BigRational>,
        r: usize,
    },
    RootOrbit { orbit: OrbitRecord, period: usize },
    /// Identity checks at levels `n > r`, where `f^n(g1) f^n(g2)` is a square.
    DiscChecks { r: usize, checks: Vec<CubicIdentityCheck> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub kind: ObstructionKind,
    pub evidence: Evidence,
}

impl Obstruction {
    /// Re-derive the obstruction from its evidence alone.
    pub fn recheck(&self, f: &RatMap) -> bool {
        let w = f.wronskian();
        match (&self.kind, &self.evidence) {
            (ObstructionKind::Pcf, Evidence::CriticalOrbits { orbits }) => {
                let Ok(crit) = critical_points(f) else { return false };
                let starts: Vec<ProjPoint> = orbits.iter().map(|o| o.start.clone()).collect();
                starts == crit.all_points() && orbits.iter().all(|o| periodic_record_holds(f, o))
            }
            (ObstructionKind::UnicriticalHighDegree, Evidence::Critical { data }) => {
                let Some(p) = f.as_polynomial() else { return false };
                let d = p.deg0();
                if d < 3 || data.points.len() != 1 {
                    return false;
                }
                let g = &data.points[0];
                let lin = Poly::new(vec![-g.clone(), BigRational::from_integer(BigInt::from(1))]);
                let lead = p.derivative().leading().cloned().unwrap_or_default();
                p.derivative() == lin.pow(d as u32 - 1).scale(&lead)
            }
            (ObstructionKind::Collision { r }, Evidence::Collision { critical_points, r: er }) => {
                if r != er || critical_points.len() != 2 || critical_points[0] == critical_points[1] {
                    return false;
                }
                if critical_points.iter().any(|g| !w.eval(g).is_zero()) {
                    return false;
                }
                let a = f.eval_iter(&ProjPoint::Finite(critical_points[0].clone()), *r);
                let b = f.eval_iter(&ProjPoint::Finite(critical_points[1].clone()), *r);
                a == b
            }
            (ObstructionKind::RootPeriodic, Evidence::RootOrbit { period, .. }) => {
                let zero = ProjPoint::Finite(BigRational::zero());
                *period >= 1 && f.eval_iter(&zero, *period) == zero
            }
            (ObstructionKind::DiscSquareCubic, Evidence::DiscChecks { r, checks }) => {
                let Some(p) = f.as_polynomial() else { return false };
                let Ok(crit) = critical_points(f) else { return false };
                !checks.is_empty()
                    && checks.iter().all(|c| {
                        c.n > *r
                            && cubic_disc_identity(&p, c.n).is_ok_and(|again| again == *c && again.holds)
                            && critical_product_square(f, &crit.points, c.n)
                    })
            }
            _ => false,
        }
    }
}

fn periodic_record_holds(f: &RatMap, o: &OrbitRecord) -> bool {
    let OrbitStatus::Preperiodic { tail, cycle } = o.status else {
        return false;
    };
    let a = f.eval_iter(&o.start, tail);
    let b = f.eval_iter(&a, cycle);
    cycle >= 1 && a == b
}

fn critical_product_square(f: &RatMap, g: &[BigRational], n: usize) -> bool {
    let vals: Vec<ProjPoint> = g.iter().map(|x| f.eval_iter(&ProjPoint::Finite(x.clone()), n)).collect();
    match vals.as_slice() {
        [ProjPoint::Finite(a), ProjPoint::Finite(b)] => is_rational_square(&(a * b)),
        _ => false,
    }
}

/// Everything the obstruction search looked at, including inconclusive parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionScan {
    pub obstructions: Vec<Obstruction>,
    pub critical: Option<CriticalData>,
    pub pcf: Option<PcfReport>,
    pub stability: Option<StabilityReport>,
    pub collision: Option<CollisionReport>,
    pub root_orbit: OrbitRecord,
    /// Sub-results that could not be decided within the bounds.
    pub unknowns: Vec<String>,
}

/// Search for every detectable obstruction to finite index.
pub fn detect_obstructions(f: &RatMap, kind: MapKind, cfg: &CertConfig) -> Result<ObstructionScan, CertError> {
    let d = f.degree();
    if !(2..=3).contains(&d) {
        return Err(CertError::Hypothesis(format!("degree {d} is not 2 or 3")));
    }
    let mut obstructions = Vec::new();
    let mut unknowns = Vec::new();

    let critical = match critical_points(f) {
        Ok(c) => Some(c),
        Err(DynamicsError::IrrationalCriticalPoints { factor }) => {
            unknowns.push(format!("critical points not rational: {factor} is irreducible"));
            None
        }
        Err(e) => return Err(e.into()),
    };

    if let Some(c) = &critical {
        if kind == MapKind::CubicPoly && c.is_unicritical() {
            obstructions.push(Obstruction {
                kind: ObstructionKind::UnicriticalHighDegree,
                evidence: Evidence::Critical { data: c.clone() },
            });
        }
    }

    let mut pcf = None;
    if critical.is_some() {
        let report = is_pcf(f, cfg.orbit_steps)?;
        match report.status {
            PcfStatus::Pcf => obstructions.push(Obstruction {
                kind: ObstructionKind::Pcf,
                evidence: Evidence::CriticalOrbits {
                    orbits: report.orbits.clone(),
                },
            }),
            PcfStatus::Unknown => unknowns.push(format!(
                "critical orbits neither periodic nor escaping within {} steps",
                cfg.orbit_steps
            )),
            PcfStatus::NotPcf => {}
        }
        pcf = Some(report);
    }

    let mut coll = None;
    if let Some(c) = &critical {
        if c.points.len() == 2 && kind != MapKind::QuadPoly {
            let report = collision(f, cfg.orbit_steps.min(cfg.n_max.max(8)))?;
            if let Some(r) = report.aligned {
                let pts = c.points.clone();
                obstructions.push(Obstruction {
                    kind: ObstructionKind::Collision { r },
                    evidence: Evidence::Collision { critical_points: pts, r },
                });
                if kind == MapKind::CubicPoly {
                    if let Some(ob) = disc_square(f, r)? {
                        obstructions.push(ob);
                    }
                }
            }
            coll = Some(report);
        }
    }

    let root_orbit = orbit(f, &ProjPoint::Finite(BigRational::zero()), cfg.orbit_steps);
    match root_orbit.status {
        OrbitStatus::Preperiodic { tail: 0, cycle } => obstructions.push(Obstruction {
            kind: ObstructionKind::RootPeriodic,
            evidence: Evidence::RootOrbit {
                orbit: root_orbit.clone(),
                period: cycle,
            },
        }),
        OrbitStatus::Truncated => unknowns.push(format!(
            "orbit of 0 neither periodic nor escaping within {} steps",
            cfg.orbit_steps
        )),
        _ => {}
    }

    let stability = match f.as_polynomial() {
        Some(p) => {
            let report = stability_report(&p, cfg.n_max.max(4), &cfg.factor)?;
            if report.complete_through() < report.levels.len() {
                unknowns.push(format!(
                    "factorization of f^n incomplete beyond level {}",
                    report.complete_through()
                ));
            }
            Some(report)
        }
        None => None,
    };

    Ok(ObstructionScan {
        obstructions,
        critical,
        pcf,
        stability,
        collision: coll,
        root_orbit,
        unknowns,
    })
}

fn disc_square(f: &RatMap, r: usize) -> Result<Option<Obstruction>, CertError> {
    let Some(p) = f.as_polynomial() else { return Ok(None) };
    let crit = critical_points(f)?;
    let mut checks = Vec::new();
    let mut n = (r + 1).max(2);
    while 3usize.pow(n as u32) <= DISC_CHECK_DEGREE {
        let c = cubic_disc_identity(&p, n)?;
        if !c.holds || !critical_product_square(f, &crit.points, n) {
            return Ok(None);
        }
        checks.push(c);
        n += 1;
    }
    if checks.is_empty() {
        return Ok(None);
    }
    Ok(Some(Obstruction {
        kind: ObstructionKind::DiscSquareCubic,
        evidence: Evidence::DiscChecks { r, checks },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_map;

    fn kinds(s: &str, kind: MapKind) -> Vec<ObstructionKind> {
        let f = parse_map(s).unwrap();
        let scan = detect_obstructions(&f, kind, &CertConfig::default()).unwrap();
        for ob in &scan.obstructions {
            assert!(ob.recheck(&f), "{s}: {:?}", ob.kind);
        }
        scan.obstructions.iter().map(|o| o.kind).collect()
    }

    #[test]
    fn examples() {
        assert_eq!(kinds("z^2-2", MapKind::QuadPoly), vec![ObstructionKind::Pcf]);
        assert_eq!(kinds("z^3+2", MapKind::CubicPoly), vec![ObstructionKind::UnicriticalHighDegree]);
        assert_eq!(kinds("z^2-z", MapKind::QuadPoly), vec![ObstructionKind::RootPeriodic]);
        assert!(kinds("z^2+1", MapKind::QuadPoly).is_empty());
        assert!(kinds("z^3-3z+1", MapKind::CubicPoly).is_empty());
    }

    #[test]
    fn offset_collision_is_not_an_obstruction() {
        // f(1) = -1 for every member of the family, an offset relation only.
        let k = kinds("(z^2-4z+1)/(2z)", MapKind::QuadRatMap);
        assert!(k.is_empty());
    }

    #[test]
    fn recheck_rejects_wrong_evidence() {
        let f = parse_map("z^2+1").unwrap();
        let fake = Obstruction {
            kind: ObstructionKind::RootPeriodic,
            evidence: Evidence::RootOrbit {
                orbit: orbit(&f, &ProjPoint::Finite(BigRational::zero()), 3),
                period: 1,
            },
        };
        assert!(!fake.recheck(&f));
    }
}
