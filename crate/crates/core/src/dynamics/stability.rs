use serde::Serialize;

use super::DynamicsError;
use crate::exact::{Poly, RatMap};
use crate::polyfactor::{factor_over_q, FactorConfig, FactorError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum LevelFactorization {
    Complete {
        factor_count: usize,
        factor_degrees: Vec<usize>,
        /// Irreducible factors of `f^n`, primitive over Z, with multiplicity.
        #[serde(skip)]
        factors: Vec<Poly>,
    },
    Inconclusive {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityLevel {
    pub n: usize,
    #[serde(flatten)]
    pub result: LevelFactorization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "level", rename_all = "kebab-case")]
pub enum StabilityVerdict {
    /// Counts agree at `N`, `N + 1`, `N + 2` (with `f^0 = z` counted as 1).
    StableBy(usize),
    /// Counts strictly increase over the last three computed levels.
    GrowingCounts,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub levels: Vec<StabilityLevel>,
    pub verdict: StabilityVerdict,
}

impl StabilityReport {
    pub fn count(&self, n: usize) -> Option<usize> {
        if n == 0 {
            return Some(1);
        }
        match &self.levels.get(n - 1)?.result {
            LevelFactorization::Complete { factor_count, .. } => Some(*factor_count),
            LevelFactorization::Inconclusive { .. } => None,
        }
    }

    pub fn factors(&self, n: usize) -> Option<Vec<Poly>> {
        if n == 0 {
            return Some(vec![Poly::z()]);
        }
        match &self.levels.get(n - 1)?.result {
            LevelFactorization::Complete { factors, .. } => Some(factors.clone()),
            LevelFactorization::Inconclusive { .. } => None,
        }
    }

    /// Highest level up to which every level was factored completely.
    pub fn complete_through(&self) -> usize {
        self.levels
            .iter()
            .take_while(|l| matches!(l.result, LevelFactorization::Complete { .. }))
            .count()
    }
}

/// Factor `f^n` over Q for `n = 1..=n_max`. Levels whose degree exceeds the
/// factorization cap are reported as inconclusive.
pub fn stability_report(
    f: &Poly,
    n_max: usize,
    cfg: &FactorConfig,
) -> Result<StabilityReport, DynamicsError> {
    let map = RatMap::polynomial(f.clone());
    let d = map.degree();
    if d < 2 {
        return Err(DynamicsError::DegreeTooSmall(d));
    }
    let mut levels = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let result = match map.iterate(n, cfg.degree_cap) {
            Err(e) => LevelFactorization::Inconclusive {
                reason: e.to_string(),
            },
            Ok(it) => match factor_over_q(&it.p, cfg) {
                Ok(fac) => {
                    let mut factors = Vec::new();
                    for g in &fac.factors {
                        factors.extend(std::iter::repeat_n(g.poly.clone(), g.multiplicity));
                    }
                    LevelFactorization::Complete {
                        factor_count: fac.count(),
                        factor_degrees: fac.degrees(),
                        factors,
                    }
                }
                Err(e @ (FactorError::DegreeCap { .. } | FactorError::Budget)) => {
                    LevelFactorization::Inconclusive {
                        reason: e.to_string(),
                    }
                }
                Err(e) => return Err(e.into()),
            },
        };
        levels.push(StabilityLevel { n, result });
    }
    let mut report = StabilityReport {
        levels,
        verdict: StabilityVerdict::Inconclusive,
    };
    report.verdict = classify(&report);
    Ok(report)
}

fn classify(r: &StabilityReport) -> StabilityVerdict {
    let top = r.complete_through();
    if top >= 3 {
        let c: Vec<usize> = (top - 2..=top).map(|n| r.count(n).unwrap()).collect();
        if c[0] < c[1] && c[1] < c[2] {
            return StabilityVerdict::GrowingCounts;
        }
    }
    for n in (0..=top).take_while(|n| n + 2 <= top) {
        let (a, b, c) = (r.count(n), r.count(n + 1), r.count(n + 2));
        if a == b && b == c {
            return StabilityVerdict::StableBy(n);
        }
    }
    StabilityVerdict::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_map;

    fn report(s: &str, n: usize) -> StabilityReport {
        let f = parse_map(s).unwrap().as_polynomial().unwrap();
        stability_report(&f, n, &FactorConfig::default()).unwrap()
    }

    fn counts(r: &StabilityReport) -> Vec<usize> {
        (1..=r.complete_through()).map(|n| r.count(n).unwrap()).collect()
    }

    #[test]
    fn examples() {
        let r = report("z^2-z", 4);
        assert_eq!(counts(&r), vec![2, 3, 4, 5]);
        assert_eq!(r.verdict, StabilityVerdict::GrowingCounts);
        let r = report("z^2+1", 4);
        assert_eq!(counts(&r), vec![1, 1, 1, 1]);
        assert_eq!(r.verdict, StabilityVerdict::StableBy(0));
        let r = report("z^2", 3);
        assert_eq!(counts(&r), vec![2, 4, 8]);
        assert_eq!(r.verdict, StabilityVerdict::GrowingCounts);
    }

    #[test]
    fn degrees_sum_to_d_n() {
        for s in ["z^2-z", "z^2-2", "z^3-3z+1", "z^2+3z"] {
            let r = report(s, 3);
            let d = parse_map(s).unwrap().degree();
            for l in &r.levels {
                if let LevelFactorization::Complete { factor_degrees, .. } = &l.result {
                    assert_eq!(factor_degrees.iter().sum::<usize>(), d.pow(l.n as u32));
                }
            }
        }
    }

    #[test]
    fn beyond_cap_is_inconclusive() {
        let r = report("z^2+1", 8);
        assert_eq!(r.complete_through(), 7);
        assert!(matches!(r.levels[7].result, LevelFactorization::Inconclusive { .. }));
        assert_eq!(r.verdict, StabilityVerdict::StableBy(0));
    }
}
