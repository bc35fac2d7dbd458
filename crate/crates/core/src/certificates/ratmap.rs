use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::exact_route::{pairs, val};
use super::modp::{odd_cofactor, parts, rat_mod, strip, PolyModP};
use super::{CertConfig, CertError, CertMode, Certificate, Conclusion, Condition, LevelReport, LevelStatus, Requirement};
use crate::dynamics::{critical_points, orbit, OrbitStatus};
use crate::exact::{discriminant, resultant, ProjPoint, RatMap};
use crate::number_theory::primes::primes_up_to;
use crate::number_theory::{is_square, pair_valuations, IterValuation};
use crate::polyfactor::is_irreducible;

/// The standing hypotheses of the rational-map criterion, as checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatmapHypotheses {
    #[serde(serialize_with = "crate::serde_util::rationals")]
    pub critical_points: Vec<BigRational>,
    /// `f^n(inf) != 0` for every `n >= 1`, or only through the stated step.
    pub infinity_avoids_zero: bool,
    pub infinity_checked_through: Option<usize>,
    pub critical_images_finite: bool,
}

/// `l(P_1)`, `l(c)`, `Res(Q_1, P_1)` and `Disc(P_1)` with their names.
pub fn ratmap_forbidden_constants(f: &RatMap) -> Result<Vec<(&'static str, BigRational)>, CertError> {
    let p1 = f.num();
    let q1 = f.den();
    let c = f.wronskian();
    let res = resultant(q1, p1).map_err(crate::dynamics::DynamicsError::from)?;
    let disc = discriminant(p1).map_err(crate::dynamics::DynamicsError::from)?;
    Ok(vec![
        ("l(P_1)", p1.leading().cloned().unwrap_or_default()),
        ("l(c)", c.leading().cloned().unwrap_or_default()),
        ("Res(Q_1,P_1)", res),
        ("Disc(P_1)", disc),
    ])
}

pub(crate) fn hypotheses(f: &RatMap, cfg: &CertConfig) -> Result<RatmapHypotheses, CertError> {
    if f.degree() != 2 || f.num().deg0() != 2 {
        return Err(CertError::WrongShape {
            expected: 2,
            found: f.to_string(),
        });
    }
    let crit = critical_points(f)?;
    if crit.points.len() != 2 || crit.infinity != 0 {
        return Err(CertError::Hypothesis(format!(
            "need two finite critical points, found {}",
            crit.points.len()
        )));
    }
    let images_finite = crit.points.iter().all(|g| !f.den().eval(g).is_zero());
    if !images_finite {
        return Err(CertError::Hypothesis("a critical point maps to infinity".into()));
    }
    let steps = cfg.orbit_steps.max(cfg.n_max);
    let inf = orbit(f, &ProjPoint::Infinity, steps);
    let zero = ProjPoint::Finite(BigRational::zero());
    if let Some(k) = inf.values.iter().skip(1).position(|v| *v == zero) {
        return Err(CertError::Hypothesis(format!("f^{}(inf) = 0", k + 1)));
    }
    let through = match inf.status {
        OrbitStatus::Truncated => Some(inf.values.len() - 1),
        _ => None,
    };
    Ok(RatmapHypotheses {
        critical_points: crit.points,
        infinity_avoids_zero: true,
        infinity_checked_through: through,
        critical_images_finite: true,
    })
}

fn conditions(
    n: usize,
    consts: &[(&'static str, BigRational)],
    const_vals: &[i64],
    v2: i64,
    top: i64,
    v: impl Fn(usize, usize) -> i64,
) -> Vec<Condition> {
    let mut out = vec![
        Condition::valuation(format!("v_p(P_{n}(g_1) P_{n}(g_2))"), Requirement::Odd, top),
        Condition::valuation("v_p(2)", Requirement::Zero, v2),
    ];
    for ((name, _), &cv) in consts.iter().zip(const_vals) {
        out.push(Condition::valuation(format!("v_p({name})"), Requirement::Zero, cv));
    }
    for j in 2..n {
        for i in 0..2 {
            out.push(Condition::valuation(format!("v_p(P_{j}(g_{}))", i + 1), Requirement::Zero, v(i, j)));
        }
    }
    for i in 0..2 {
        out.push(Condition::valuation(format!("v_p(P_1(g_{}))", i + 1), Requirement::Report, v(i, 1)));
    }
    out
}

fn explicit(n: usize, p: BigInt, conds: Vec<Condition>) -> Certificate {
    Certificate {
        level: n,
        mode: CertMode::ExplicitPrime,
        prime: Some(p),
        cofactor: None,
        critical_point: None,
        factor: None,
        conditions: conds,
        conclusion: Conclusion::QuadRatMax,
        statement: Conclusion::QuadRatMax.statement(n),
        reverified: None,
    }
}

fn forbidden(f: &RatMap, consts: &[(&'static str, BigRational)], g: &[BigRational], ps: &[Vec<(BigRational, BigRational)>], n: usize) -> Vec<BigInt> {
    let mut vals: Vec<BigRational> = consts.iter().map(|(_, c)| c.clone()).collect();
    vals.extend(g.iter().cloned());
    vals.extend(f.num().coeffs().iter().cloned());
    vals.extend(f.den().coeffs().iter().cloned());
    for j in 2..n {
        for pi in ps {
            vals.push(pi[j].0.clone());
        }
    }
    let mut out = parts(&vals);
    out.push(BigInt::from(2));
    out
}

pub(crate) fn cofactor_cert(n: usize, cofactor: BigInt) -> Certificate {
    Certificate {
        level: n,
        mode: CertMode::NonSquareCofactor,
        prime: None,
        cofactor: Some(cofactor),
        critical_point: None,
        factor: None,
        conditions: vec![
            Condition::flag(
                "cofactor avoids 2, l(P_1), l(c), Res(Q_1,P_1), Disc(P_1) and P_j(g_i) for 2 <= j < n",
                true,
            ),
            Condition::flag("cofactor is not +-square", true),
        ],
        conclusion: Conclusion::QuadRatMax,
        statement: Conclusion::QuadRatMax.statement(n),
        reverified: None,
    }
}

fn irreducibility_level(f: &RatMap, cfg: &CertConfig) -> Result<LevelReport, CertError> {
    let irreducible = is_irreducible(f.num(), &cfg.factor).map_err(crate::dynamics::DynamicsError::from)?;
    Ok(if irreducible {
        LevelReport {
            n: 1,
            status: LevelStatus::Certified,
            certificates: vec![Certificate {
                level: 1,
                mode: CertMode::Irreducibility,
                prime: None,
                cofactor: None,
                critical_point: None,
                factor: None,
                conditions: vec![Condition::flag("P_1 irreducible over Q", true)],
                conclusion: Conclusion::QuadRatMax,
                statement: Conclusion::QuadRatMax.statement(1),
                reverified: None,
            }],
            note: None,
        }
    } else {
        LevelReport::gap(1, "P_1 is reducible over Q")
    })
}

/// Per-level certificates for a quadratic rational map with two rational
/// finite critical points.
pub fn certify_quadratic_ratmap(f: &RatMap, cfg: &CertConfig) -> Result<(RatmapHypotheses, Vec<LevelReport>), CertError> {
    let hyp = hypotheses(f, cfg)?;
    let consts = ratmap_forbidden_constants(f)?;
    let g = hyp.critical_points.clone();
    let n_max = cfg.n_max;
    let mut found: Vec<Option<Certificate>> = vec![None; n_max + 1];
    let mut levels = Vec::with_capacity(n_max);
    if n_max >= 1 {
        levels.push(irreducibility_level(f, cfg)?);
    }
    let p1g: Vec<BigRational> = g.iter().map(|x| f.num().eval(x)).collect();

    for p in primes_up_to(cfg.prime_bound) {
        if (2..=n_max).all(|n| found[n].is_some()) {
            break;
        }
        if p == 2 {
            continue;
        }
        let (Some(num), Some(den)) = (PolyModP::new(f.num(), p), PolyModP::new(f.den(), p)) else {
            continue;
        };
        if consts.iter().any(|(_, c)| rat_mod(c, p).is_none_or(|r| r == 0)) {
            continue;
        }
        let Some(starts) = g.iter().map(|x| rat_mod(x, p)).collect::<Option<Vec<u64>>>() else {
            continue;
        };
        let res: Vec<Vec<u64>> = starts
            .iter()
            .map(|&x0| {
                let mut out = vec![x0];
                let (mut x, mut y) = (x0, 1u64);
                for _ in 1..=n_max {
                    let nx = num.hom_eval(2, x, y);
                    let ny = den.hom_eval(2, x, y);
                    (x, y) = (nx, ny);
                    out.push(x);
                }
                out
            })
            .collect();
        for n in 2..=n_max {
            if (2..n).any(|j| res[0][j] == 0 || res[1][j] == 0) {
                break;
            }
            if found[n].is_some() || (res[0][n] != 0 && res[1][n] != 0) {
                continue;
            }
            let mut v = [0i64; 2];
            let mut ok = true;
            for i in 0..2 {
                match pair_valuations(f, &g[i], n, p, cfg.padic) {
                    Ok(levels) => match levels[n].p {
                        IterValuation::Exact(e) => v[i] = e,
                        _ => ok = false,
                    },
                    Err(_) => ok = false,
                }
            }
            if !ok || (v[0] + v[1]) % 2 == 0 {
                continue;
            }
            let pb = BigInt::from(p);
            let conds = conditions(n, &consts, &[0; 4], 0, v[0] + v[1], |i, j| {
                if j == 1 {
                    val(&p1g[i], &pb)
                } else {
                    0
                }
            });
            found[n] = Some(explicit(n, pb, conds));
        }
    }

    let ps: Option<Vec<Vec<(BigRational, BigRational)>>> =
        g.iter().map(|x| f.scalar_pairs_capped(x, n_max, cfg.value_bit_cap)).collect();
    if let Some(ps) = ps {
        for n in 2..=n_max {
            if found[n].is_some() {
                continue;
            }
            let target = &ps[0][n].0 * &ps[1][n].0;
            if target.is_zero() {
                continue;
            }
            let c = odd_cofactor(&target, &forbidden(f, &consts, &g, &ps, n));
            if !is_square(&c) {
                found[n] = Some(cofactor_cert(n, c));
            }
        }
    }

    for (n, cert) in found.into_iter().enumerate().skip(2) {
        levels.push(match cert {
            Some(c) => LevelReport {
                n,
                status: LevelStatus::Certified,
                certificates: vec![c],
                note: None,
            },
            None => LevelReport::gap(n, "no prime satisfies the conditions within the search bounds"),
        });
    }
    Ok((hyp, levels))
}

/// Rebuild the conditions of `cert` from exact values.
pub(crate) fn reverify(f: &RatMap, cert: &Certificate, cfg: &CertConfig) -> Option<bool> {
    if cert.mode == CertMode::Irreducibility {
        let disc = discriminant(f.num()).ok()?;
        return Some(f.num().deg0() == 2 && !crate::number_theory::is_rational_square(&disc));
    }
    let consts = ratmap_forbidden_constants(f).ok()?;
    let crit = critical_points(f).ok()?;
    let g = crit.points;
    let n = cert.level;
    let ps: Vec<Vec<(BigRational, BigRational)>> = g
        .iter()
        .map(|x| pairs(f, x, n, cfg.value_bit_cap))
        .collect::<Option<_>>()?;
    let target = &ps[0][n].0 * &ps[1][n].0;
    match cert.mode {
        CertMode::ExplicitPrime => {
            let p = cert.prime.as_ref()?;
            let cv: Vec<i64> = consts.iter().map(|(_, c)| val(c, p)).collect();
            let two = BigRational::from_integer(BigInt::from(2));
            let conds = conditions(n, &consts, &cv, val(&two, p), val(&target, p), |i, j| val(&ps[i][j].0, p));
            let integral = f
                .num()
                .coeffs()
                .iter()
                .chain(f.den().coeffs())
                .chain(&g)
                .all(|c| val(c, p) >= 0);
            Some(integral && conds == cert.conditions && conds.iter().all(|c| c.holds))
        }
        CertMode::NonSquareCofactor => {
            let mut product = BigInt::from(2);
            let mut vals: Vec<BigRational> = consts.iter().map(|(_, c)| c.clone()).collect();
            vals.extend(g.iter().cloned());
            vals.extend(f.num().coeffs().iter().cloned());
            vals.extend(f.den().coeffs().iter().cloned());
            for j in 2..n {
                vals.push(ps[0][j].0.clone());
                vals.push(ps[1][j].0.clone());
            }
            for v in &vals {
                if !v.is_zero() {
                    product *= v.numer() * v.denom();
                }
            }
            let c = strip(target.numer(), &[product.clone()]) * strip(target.denom(), &[product]);
            Some(Some(&c) == cert.cofactor.as_ref() && !is_square(&c))
        }
        CertMode::Irreducibility => None,
    }
}
