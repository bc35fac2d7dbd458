use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::exact_route::{poly_orbit, val};
use super::modp::{odd_cofactor, parts, rat_mod, strip, PolyModP};
use super::{CertConfig, CertError, CertMode, Certificate, Conclusion, Condition, LevelReport, LevelStatus, Requirement};
use crate::dynamics::{critical_points, CriticalData};
use crate::exact::{Poly, RatMap};
use crate::number_theory::primes::primes_up_to;
use crate::number_theory::{is_square, valuation_of_iterate_with, IterValuation};
use crate::polyfactor::is_irreducible;

pub(crate) struct CubicSetup {
    pub map: RatMap,
    pub crit: CriticalData,
}

pub(crate) fn setup(f: &Poly) -> Result<CubicSetup, CertError> {
    if f.deg0() != 3 || !f.is_monic() {
        return Err(CertError::WrongShape {
            expected: 3,
            found: f.to_string(),
        });
    }
    let map = RatMap::polynomial(f.clone());
    let crit = critical_points(&map)?;
    if crit.points.len() != 2 {
        return Err(crate::dynamics::DynamicsError::NotTwoCriticalPoints(crit.points.len()).into());
    }
    Ok(CubicSetup { map, crit })
}

fn name(n: usize, g: &BigRational) -> String {
    format!("v_p(f^{n}({g}))")
}

/// The condition list for `(n, a)` from any source of valuations
/// `v(which, m)` where `which` indexes the critical point.
fn conditions(
    n: usize,
    a: usize,
    g: &[BigRational; 2],
    v3: i64,
    v: impl Fn(usize, usize) -> i64,
) -> Vec<Condition> {
    let b = 1 - a;
    let mut out = vec![
        Condition::valuation(name(n, &g[a]), Requirement::Odd, v(a, n)),
        Condition::valuation(name(n, &g[b]), Requirement::Zero, v(b, n)),
        Condition::valuation("v_p(3)", Requirement::Zero, v3),
    ];
    for i in 1..n {
        out.push(Condition::valuation(name(i, &g[a]), Requirement::Zero, v(a, i)));
        out.push(Condition::valuation(name(i, &g[b]), Requirement::Zero, v(b, i)));
    }
    out
}

fn explicit(n: usize, a: usize, p: u64, g: &[BigRational; 2], v_top: i64) -> Certificate {
    let conds = conditions(n, a, g, 0, |which, m| if which == a && m == n { v_top } else { 0 });
    Certificate {
        level: n,
        mode: CertMode::ExplicitPrime,
        prime: Some(BigInt::from(p)),
        cofactor: None,
        critical_point: Some(a),
        factor: None,
        conditions: conds,
        conclusion: Conclusion::CubicMax,
        statement: Conclusion::CubicMax.statement(n),
        reverified: None,
    }
}

fn coefficient_denominators(f: &Poly) -> Vec<BigInt> {
    f.coeffs().iter().map(|c| c.denom().clone()).collect()
}

/// Everything a witnessing prime for `(n, a)` must avoid.
fn forbidden(f: &Poly, g: &[BigRational; 2], orbits: &[Vec<BigRational>; 2], n: usize, a: usize) -> Vec<BigInt> {
    let b = 1 - a;
    let mut vals = vec![orbits[b][n].clone(), g[0].clone(), g[1].clone()];
    for i in 1..n {
        vals.push(orbits[a][i].clone());
        vals.push(orbits[b][i].clone());
    }
    let mut out = parts(&vals);
    out.push(BigInt::from(3));
    out.extend(coefficient_denominators(f));
    out
}

fn cofactor_cert(n: usize, a: usize, cofactor: BigInt) -> Certificate {
    Certificate {
        level: n,
        mode: CertMode::NonSquareCofactor,
        prime: None,
        cofactor: Some(cofactor),
        critical_point: Some(a),
        factor: None,
        conditions: vec![
            Condition::flag("cofactor avoids 3, f^n(g_b) and f^i(g_1), f^i(g_2) for i < n", true),
            Condition::flag("cofactor is not +-square", true),
        ],
        conclusion: Conclusion::CubicMax,
        statement: Conclusion::CubicMax.statement(n),
        reverified: None,
    }
}

/// Per-level certificates for a monic cubic with two rational critical
/// points. Levels whose iterate is not proven irreducible are conditional.
pub fn certify_cubic_poly(f: &Poly, cfg: &CertConfig) -> Result<Vec<LevelReport>, CertError> {
    let CubicSetup { map, crit } = setup(f)?;
    let g = [crit.points[0].clone(), crit.points[1].clone()];
    let n_max = cfg.n_max;
    let mut found: Vec<Option<Certificate>> = vec![None; n_max + 1];

    for p in primes_up_to(cfg.prime_bound) {
        if found[1..].iter().all(Option::is_some) {
            break;
        }
        if p == 3 {
            continue;
        }
        let Some(fp) = PolyModP::new(f, p) else { continue };
        let (Some(r0), Some(r1)) = (rat_mod(&g[0], p), rat_mod(&g[1], p)) else {
            continue;
        };
        let mut r = [vec![r0], vec![r1]];
        for orbit in r.iter_mut() {
            for m in 1..=n_max {
                let next = fp.eval(orbit[m - 1]);
                orbit.push(next);
            }
        }
        for n in 1..=n_max {
            if found[n].is_some() {
                continue;
            }
            for a in 0..2 {
                let b = 1 - a;
                if r[a][n] != 0 || r[b][n] == 0 || (1..n).any(|i| r[a][i] == 0 || r[b][i] == 0) {
                    continue;
                }
                if let Ok(IterValuation::Exact(v)) = valuation_of_iterate_with(&map, &g[a], n, p, cfg.padic) {
                    if v % 2 != 0 {
                        found[n] = Some(explicit(n, a, p, &g, v));
                        break;
                    }
                }
            }
        }
    }

    let orbits = [
        poly_orbit(&map, &g[0], n_max, cfg.value_bit_cap),
        poly_orbit(&map, &g[1], n_max, cfg.value_bit_cap),
    ];
    if let [Some(o0), Some(o1)] = &orbits {
        let orbits = [o0.clone(), o1.clone()];
        for n in 1..=n_max {
            if found[n].is_some() {
                continue;
            }
            for a in 0..2 {
                let target = &orbits[a][n];
                if target.is_zero() {
                    continue;
                }
                let c = odd_cofactor(target, &forbidden(f, &g, &orbits, n, a));
                if !is_square(&c) {
                    found[n] = Some(cofactor_cert(n, a, c));
                    break;
                }
            }
        }
    }

    let mut levels = Vec::with_capacity(n_max);
    for (n, cert) in found.into_iter().enumerate().skip(1) {
        let Some(cert) = cert else {
            levels.push(LevelReport::gap(n, "no prime satisfies the conditions within the search bounds"));
            continue;
        };
        let (status, note) = match irreducible_iterate(&map, n, cfg) {
            Some(true) => (LevelStatus::Certified, None),
            Some(false) => {
                levels.push(LevelReport::gap(n, format!("f^{n} is reducible over Q")));
                continue;
            }
            None => (
                LevelStatus::Conditional,
                Some(format!("irreducibility of f^{n} not established")),
            ),
        };
        levels.push(LevelReport {
            n,
            status,
            certificates: vec![cert],
            note,
        });
    }
    Ok(levels)
}

pub(crate) fn irreducible_iterate(map: &RatMap, n: usize, cfg: &CertConfig) -> Option<bool> {
    let it = map.iterate(n, cfg.irreducibility_degree_cap).ok()?;
    is_irreducible(&it.p, &cfg.factor).ok()
}

/// Rebuild the conditions of `cert` from exact orbit values.
pub(crate) fn reverify(f: &Poly, cert: &Certificate, cfg: &CertConfig) -> Option<bool> {
    let CubicSetup { map, crit } = setup(f).ok()?;
    let g = [crit.points[0].clone(), crit.points[1].clone()];
    let n = cert.level;
    let a = cert.critical_point?;
    let o = [
        poly_orbit(&map, &g[0], n, cfg.value_bit_cap)?,
        poly_orbit(&map, &g[1], n, cfg.value_bit_cap)?,
    ];
    match cert.mode {
        CertMode::ExplicitPrime => {
            let p = cert.prime.as_ref()?;
            let v3 = val(&BigRational::from_integer(BigInt::from(3)), p);
            let conds = conditions(n, a, &g, v3, |which, m| val(&o[which][m], p));
            let integral = f.coeffs().iter().chain(&g).all(|c| val(c, p) >= 0);
            Some(integral && conds == cert.conditions && conds.iter().all(|c| c.holds))
        }
        CertMode::NonSquareCofactor => {
            let b = 1 - a;
            let mut product = BigInt::from(3);
            for c in f.coeffs().iter().chain(&g) {
                product *= c.denom();
            }
            let mut vals = vec![o[b][n].clone()];
            for i in 1..n {
                vals.push(o[a][i].clone());
                vals.push(o[b][i].clone());
            }
            for v in &vals {
                if !v.is_zero() {
                    product *= v.numer() * v.denom();
                }
            }
            if vals.iter().any(Zero::is_zero) {
                return Some(false);
            }
            let target = &o[a][n];
            let c = strip(target.numer(), &[product.clone()]) * strip(target.denom(), &[product]);
            Some(Some(&c) == cert.cofactor.as_ref() && !is_square(&c))
        }
        CertMode::Irreducibility => None,
    }
}
