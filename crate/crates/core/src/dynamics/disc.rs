//! Discriminants of `f^n - t` for polynomial `f`, by a closed product over
//! the critical orbits and by a direct resultant.
//!
//! With `D = d^n`, leading coefficient `a` and finite critical points `b` of
//! multiplicity `e(b)`:
//!
//! `Disc(f^n - t) = (-1)^((D-1)(D-2)/2) d^(nD) a^((D-1)^2/(d-1))
//!                  * prod_b prod_{i=1..n} (t - f^i(b))^(e(b) d^(n-i))`.
//!
//! The exponent `d^(n-i)` counts how often each preimage layer repeats; for
//! `n = 1` the product is the classical formula for `Disc(f - t)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use super::critical::critical_points;
use super::DynamicsError;
use crate::exact::{discriminant, Poly, RatMap};

/// Largest `d^n` for which the resultant route is attempted.
pub const ORACLE_DEGREE_CAP: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscComparison {
    #[serde(serialize_with = "crate::serde_util::opt_rational")]
    pub formula: Option<BigRational>,
    #[serde(serialize_with = "crate::serde_util::opt_rational")]
    pub oracle: Option<BigRational>,
    /// Both routes ran and gave the same value.
    pub agree: Option<bool>,
}

fn rpow(x: &BigRational, e: usize) -> BigRational {
    num_traits::pow(x.clone(), e)
}

/// The closed product. Needs every finite critical point to be rational.
pub fn disc_iterate_formula(f: &Poly, n: usize, t: &BigRational) -> Result<BigRational, DynamicsError> {
    let d = f.deg0();
    if d < 2 {
        return Err(DynamicsError::DegreeTooSmall(d));
    }
    if n == 0 {
        return Ok(BigRational::one());
    }
    let map = RatMap::polynomial(f.clone());
    let crit = critical_points(&map)?;
    let big_d = d.checked_pow(n as u32).ok_or(DynamicsError::TooLarge)?;
    let alpha = f.leading().unwrap().clone();
    let sign_exp = (big_d - 1) * (big_d.saturating_sub(2)) / 2;
    let mut acc = rpow(&BigRational::from_integer(BigInt::from(d)), n * big_d);
    acc *= rpow(&alpha, (big_d - 1) * (big_d - 1) / (d - 1));
    if sign_exp % 2 == 1 {
        acc = -acc;
    }
    for (b, &e) in crit.points.iter().zip(&crit.multiplicities) {
        let mut v = b.clone();
        for i in 1..=n {
            v = f.eval(&v);
            let mult = e * d.pow((n - i) as u32);
            acc *= rpow(&(t - &v), mult);
        }
    }
    Ok(acc)
}

/// `Disc(f^n - t)` from the resultant of the expanded iterate.
pub fn disc_iterate_oracle(f: &Poly, n: usize, t: &BigRational) -> Result<BigRational, DynamicsError> {
    let map = RatMap::polynomial(f.clone());
    let it = map.iterate(n, ORACLE_DEGREE_CAP)?;
    let g = &it.p - &Poly::constant(t.clone());
    Ok(discriminant(&g)?)
}

/// Both routes, each reported independently.
pub fn disc_iterate(f: &Poly, n: usize, t: &BigRational, oracle: bool) -> Result<DiscComparison, DynamicsError> {
    let formula = match disc_iterate_formula(f, n, t) {
        Ok(v) => Some(v),
        Err(DynamicsError::IrrationalCriticalPoints { .. }) if oracle => None,
        Err(e) => return Err(e),
    };
    let oracle = if oracle {
        Some(disc_iterate_oracle(f, n, t)?)
    } else {
        None
    };
    let agree = match (&formula, &oracle) {
        (Some(a), Some(b)) => Some(a == b),
        _ => None,
    };
    Ok(DiscComparison {
        formula,
        oracle,
        agree,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CubicIdentityCheck {
    pub n: usize,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub lhs: BigRational,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub rhs: BigRational,
    pub holds: bool,
}

/// `|Disc(f^n)| = |3^(3^n) Disc(f^(n-1))^3 f^n(g1) f^n(g2)|` for a monic
/// cubic with two distinct rational critical points, `n >= 2`. Both
/// discriminants come from resultants, not from the product formula.
pub fn cubic_disc_identity(f: &Poly, n: usize) -> Result<CubicIdentityCheck, DynamicsError> {
    if f.deg0() != 3 || !f.is_monic() {
        return Err(DynamicsError::NotMonicCubic);
    }
    if n < 2 {
        return Err(DynamicsError::LevelTooSmall(n));
    }
    let map = RatMap::polynomial(f.clone());
    let crit = critical_points(&map)?;
    if crit.points.len() != 2 {
        return Err(DynamicsError::NotTwoCriticalPoints(crit.points.len()));
    }
    let zero = BigRational::from_integer(BigInt::from(0));
    let lhs = disc_iterate_oracle(f, n, &zero)?;
    let prev = disc_iterate_oracle(f, n - 1, &zero)?;
    let three = BigRational::from_integer(BigInt::from(3));
    let mut rhs = rpow(&three, 3usize.pow(n as u32)) * rpow(&prev, 3);
    for g in &crit.points {
        let mut v = g.clone();
        for _ in 0..n {
            v = f.eval(&v);
        }
        rhs *= v;
    }
    let holds = lhs.abs() == rhs.abs();
    Ok(CubicIdentityCheck { n, lhs, rhs, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_map;
    use proptest::prelude::*;

    fn poly(s: &str) -> Poly {
        parse_map(s).unwrap().as_polynomial().unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn examples() {
        let f = poly("z^2-2");
        let c = disc_iterate(&f, 1, &q(0), true).unwrap();
        assert_eq!(c.formula, Some(q(8)));
        assert_eq!(c.oracle, Some(q(8)));
        assert_eq!(c.agree, Some(true));
        let c = disc_iterate(&f, 2, &q(0), true).unwrap();
        assert_eq!(c.oracle, Some(q(2048)));
        assert_eq!(c.agree, Some(true));
        let g = poly("z^3+7z^2-7");
        assert_eq!(disc_iterate(&g, 1, &q(0), true).unwrap().agree, Some(true));
        assert_eq!(disc_iterate(&g, 2, &q(5), true).unwrap().agree, Some(true));
    }

    #[test]
    fn quadratic_t_dependence() {
        // Disc(z^2 - t) = 4t.
        let f = poly("z^2");
        for t in -3..=3 {
            assert_eq!(disc_iterate_formula(&f, 1, &q(t)).unwrap(), q(4 * t));
        }
    }

    #[test]
    fn non_monic_leading_coefficient() {
        let f = poly("3z^2 - 2z + 5");
        for n in 1..=3 {
            let c = disc_iterate(&f, n, &q(2), true).unwrap();
            assert_eq!(c.agree, Some(true), "n = {n}");
        }
        let g = poly("-2z^3 + 3z^2 + 1/2");
        for n in 1..=2 {
            let c = disc_iterate(&g, n, &BigRational::new(1.into(), 3.into()), true).unwrap();
            assert_eq!(c.agree, Some(true), "n = {n}");
        }
    }

    #[test]
    fn cubic_identity_examples() {
        let r = cubic_disc_identity(&poly("z^3-3z+1"), 2).unwrap();
        assert!(r.holds);
        assert!(cubic_disc_identity(&poly("z^3-3z+1"), 1).is_err());
        assert!(cubic_disc_identity(&poly("z^3+2"), 2).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn routes_agree_for_quadratics(b in -9i64..=9, c in -9i64..=9, t in -5i64..=5, n in 1usize..=3) {
            let f = Poly::from_ints([c, b, 1]);
            let r = disc_iterate(&f, n, &q(t), true).unwrap();
            prop_assert_eq!(r.agree, Some(true));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(25))]
        #[test]
        fn cubic_identity_random(a in -6i64..=6, b in -6i64..=6, c in -20i64..=20, den in 1i64..=3) {
            prop_assume!(a != b);
            // f' = 3 (z - a/den)(z - b/den)
            let (ga, gb) = (BigRational::new(a.into(), den.into()), BigRational::new(b.into(), den.into()));
            let three = q(3);
            let half = BigRational::new(1.into(), 2.into());
            let f = Poly::new(vec![
                q(c),
                &three * &ga * &gb,
                -(&three * &half) * (&ga + &gb),
                q(1),
            ]);
            let r = cubic_disc_identity(&f, 2).unwrap();
            prop_assert!(r.holds);
        }
    }
}
