use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::cubic::irreducible_iterate;
use super::exact_route::{poly_orbit, val};
use super::modp::{parts, rat_mod, strip, PolyModP};
use super::{CertConfig, CertError, CertMode, Certificate, Conclusion, Condition, LevelReport, LevelStatus, Requirement};
use crate::dynamics::{critical_points, stability_report, StabilityReport, StabilityVerdict};
use crate::exact::{discriminant, Poly, RatMap};
use crate::number_theory::primes::primes_up_to;
use crate::number_theory::{factor, is_prime_u64, is_rational_square, valuation_of_iterate_with, IterValuation};
use crate::polyfactor::is_irreducible;

/// The factorization `f^N = prod F_j` that level `N + n` is certified against.
struct Split {
    n0: usize,
    factors: Vec<Poly>,
}

fn check_shape(f: &Poly) -> Result<BigRational, CertError> {
    if f.deg0() != 2 || !f.is_monic() {
        return Err(CertError::WrongShape {
            expected: 2,
            found: f.to_string(),
        });
    }
    let crit = critical_points(&RatMap::polynomial(f.clone()))?;
    Ok(crit.points[0].clone())
}

fn value_name(split: &Split, j: usize, level: usize, g: &BigRational) -> String {
    if split.n0 == 0 {
        format!("v_p(f^{level}({g}))")
    } else {
        format!("v_p(F_{j}(f^{}({g})))", level - split.n0)
    }
}

fn conditions(split: &Split, j: usize, level: usize, g: &BigRational, v2: i64, v: impl Fn(usize) -> i64, top: i64) -> Vec<Condition> {
    let mut out = vec![
        Condition::valuation(value_name(split, j, level, g), Requirement::One, top),
        Condition::valuation("v_p(2)", Requirement::Zero, v2),
    ];
    for m in 1..level {
        out.push(Condition::valuation(format!("v_p(f^{m}({g}))"), Requirement::Zero, v(m)));
    }
    out
}

fn cert(level: usize, j: usize, p: BigInt, conds: Vec<Condition>) -> Certificate {
    Certificate {
        level,
        mode: CertMode::ExplicitPrime,
        prime: Some(p),
        cofactor: None,
        critical_point: Some(0),
        factor: Some(j),
        conditions: conds,
        conclusion: Conclusion::QuadPolyMax,
        statement: Conclusion::QuadPolyMax.statement(level),
        reverified: None,
    }
}

fn irreducibility_cert(irreducible: bool) -> Certificate {
    Certificate {
        level: 1,
        mode: CertMode::Irreducibility,
        prime: None,
        cofactor: None,
        critical_point: None,
        factor: None,
        conditions: vec![Condition::flag("f irreducible over Q", irreducible)],
        conclusion: Conclusion::QuadPolyMax,
        statement: Conclusion::QuadPolyMax.statement(1),
        reverified: None,
    }
}

/// Stability levels computed for a quadratic polynomial certificate run.
pub(crate) fn stability_for(f: &Poly, cfg: &CertConfig) -> Result<StabilityReport, CertError> {
    Ok(stability_report(f, cfg.n_max.max(3), &cfg.factor)?)
}

/// Per-level certificates for a monic quadratic polynomial.
pub fn certify_quadratic_poly(f: &Poly, cfg: &CertConfig) -> Result<Vec<LevelReport>, CertError> {
    let stab = stability_for(f, cfg)?;
    certify_with(f, &stab, cfg)
}

pub(crate) fn certify_with(f: &Poly, stab: &StabilityReport, cfg: &CertConfig) -> Result<Vec<LevelReport>, CertError> {
    let g = check_shape(f)?;
    let map = RatMap::polynomial(f.clone());
    let n_max = cfg.n_max;
    let mut levels: Vec<Option<LevelReport>> = vec![None; n_max + 1];

    if n_max >= 1 {
        let irreducible = is_irreducible(f, &cfg.factor).map_err(crate::dynamics::DynamicsError::from)?;
        levels[1] = Some(if irreducible {
            LevelReport {
                n: 1,
                status: LevelStatus::Certified,
                certificates: vec![irreducibility_cert(true)],
                note: None,
            }
        } else {
            LevelReport::gap(1, "f is reducible over Q")
        });
    }

    let split = match stab.verdict {
        StabilityVerdict::StableBy(n0) => {
            let mut factors: Vec<Poly> = stab.factors(n0).unwrap_or_default().iter().map(Poly::monic).collect();
            let before = factors.len();
            factors.dedup();
            if factors.len() != before {
                None
            } else {
                Some(Split { n0, factors })
            }
        }
        _ => None,
    };
    let Some(split) = split else {
        for (l, slot) in levels.iter_mut().enumerate().skip(2) {
            *slot = Some(LevelReport::gap(l, "no stabilization level with a squarefree factorization"));
        }
        return Ok(levels.into_iter().flatten().collect());
    };
    let r = split.factors.len();
    // (level, factor) pairs still waiting for a prime.
    let mut found: Vec<Vec<Option<Certificate>>> = vec![vec![None; r]; n_max + 1];
    for (l, slot) in levels.iter_mut().enumerate().skip(2) {
        if l <= split.n0 {
            *slot = Some(LevelReport::gap(
                l,
                format!("level not above the stabilization level {}", split.n0),
            ));
        }
    }
    let pending = |found: &Vec<Vec<Option<Certificate>>>, l: usize, j: usize| l > split.n0.max(1) && found[l][j].is_none();

    for p in primes_up_to(cfg.prime_bound) {
        if p == 2 {
            continue;
        }
        if (2..=n_max).all(|l| (0..r).all(|j| !pending(&found, l, j))) {
            break;
        }
        let Some(fp) = PolyModP::new(f, p) else { continue };
        let Some(g0) = rat_mod(&g, p) else { continue };
        let Some(fac) = split.factors.iter().map(|h| PolyModP::new(h, p)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let mut orbit = vec![g0];
        for m in 1..=n_max {
            let next = fp.eval(orbit[m - 1]);
            orbit.push(next);
        }
        for l in 2..=n_max {
            if (1..l).any(|m| orbit[m] == 0) {
                break;
            }
            let n = l.saturating_sub(split.n0);
            for j in 0..r {
                if !pending(&found, l, j) {
                    continue;
                }
                let hits: Vec<bool> = fac.iter().map(|h| h.eval(orbit[n]) == 0).collect();
                if !hits[j] || hits.iter().filter(|&&h| h).count() != 1 {
                    continue;
                }
                if let Ok(IterValuation::Exact(1)) = valuation_of_iterate_with(&map, &g, l, p, cfg.padic) {
                    let conds = conditions(&split, j, l, &g, 0, |_| 0, 1);
                    found[l][j] = Some(cert(l, j, BigInt::from(p), conds));
                }
            }
        }
    }

    if let Some(orbit) = poly_orbit(&map, &g, n_max, cfg.value_bit_cap) {
        for l in 2..=n_max {
            for j in 0..r {
                if !pending(&found, l, j) {
                    continue;
                }
                if let Some(c) = large_prime(f, &g, &split, &orbit, l, j, cfg) {
                    found[l][j] = Some(c);
                }
            }
        }
    }

    for l in 2..=n_max {
        if levels[l].is_some() {
            continue;
        }
        if found[l].iter().any(Option::is_none) {
            levels[l] = Some(LevelReport::gap(l, "no prime satisfies the conditions within the search bounds"));
            continue;
        }
        let certs: Vec<Certificate> = found[l].iter().flatten().cloned().collect();
        let below = l - 1;
        let structure = if split.n0 == 0 {
            irreducible_iterate(&map, below, cfg)
        } else {
            stab.count(below).map(|c| c == r)
        };
        levels[l] = Some(match structure {
            Some(true) => LevelReport {
                n: l,
                status: LevelStatus::Certified,
                certificates: certs,
                note: None,
            },
            Some(false) => LevelReport::gap(l, format!("f^{below} does not split into {r} irreducible factors")),
            None => LevelReport {
                n: l,
                status: LevelStatus::Conditional,
                certificates: certs,
                note: Some(format!("factorization of f^{below} not established")),
            },
        });
    }
    Ok(levels.into_iter().flatten().collect())
}

/// A prime above the scan bound dividing the target to the first power,
/// found by factoring the part of the exact value coprime to everything the
/// prime must avoid.
fn large_prime(
    f: &Poly,
    g: &BigRational,
    split: &Split,
    orbit: &[BigRational],
    l: usize,
    j: usize,
    cfg: &CertConfig,
) -> Option<Certificate> {
    const MAX_BITS: u64 = 4096;
    let n = l - split.n0;
    let target = split.factors[j].eval(&orbit[n]);
    if target.is_zero() {
        return None;
    }
    let mut avoid: Vec<BigRational> = orbit[1..l].to_vec();
    avoid.push(g.clone());
    for (k, h) in split.factors.iter().enumerate() {
        if k != j {
            avoid.push(h.eval(&orbit[n]));
        }
        avoid.extend(h.coeffs().iter().cloned());
    }
    avoid.extend(f.coeffs().iter().cloned());
    let mut forbidden = parts(&avoid);
    forbidden.push(BigInt::from(2));
    let rest = strip(target.numer(), &forbidden);
    if rest.is_one() || rest.bits() > MAX_BITS {
        return None;
    }
    let profile = factor(&rest, &cfg.effort);
    let q = profile
        .known_factors
        .iter()
        .filter(|(q, &e)| e == 1 && q.to_u64().is_some_and(is_prime_u64))
        .map(|(q, _)| q.clone())
        .next()?;
    let conds = conditions(split, j, l, g, val(&BigRational::from_integer(2.into()), &q), |m| val(&orbit[m], &q), val(&target, &q));
    conds.iter().all(|c| c.holds).then(|| cert(l, j, q, conds))
}

/// Rebuild the conditions of `cert` from exact values.
pub(crate) fn reverify(f: &Poly, stab: &StabilityReport, cert: &Certificate, cfg: &CertConfig) -> Option<bool> {
    let g = check_shape(f).ok()?;
    if cert.mode == CertMode::Irreducibility {
        let disc = discriminant(f).ok()?;
        return Some(!is_rational_square(&disc));
    }
    let StabilityVerdict::StableBy(n0) = stab.verdict else {
        return None;
    };
    let factors: Vec<Poly> = stab.factors(n0)?.iter().map(Poly::monic).collect();
    let split = Split { n0, factors };
    let l = cert.level;
    let j = cert.factor?;
    let q = cert.prime.as_ref()?;
    let map = RatMap::polynomial(f.clone());
    let orbit = poly_orbit(&map, &g, l, cfg.value_bit_cap)?;
    let target = split.factors.get(j)?.eval(&orbit[l - n0]);
    let conds = conditions(&split, j, l, &g, val(&BigRational::from_integer(2.into()), q), |m| val(&orbit[m], q), val(&target, q));
    // The product over all factors must recover f^L(g), the value the
    // p-adic route measured.
    let product = split
        .factors
        .iter()
        .fold(BigRational::one(), |acc, h| acc * h.eval(&orbit[l - n0]));
    Some(product == orbit[l] && conds == cert.conditions && conds.iter().all(|c| c.holds))
}
