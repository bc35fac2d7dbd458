//! Heights, `rad` and `h_gcd` over Q.
//!
//! Values are natural logarithms in `f64`. Where the answer is the log of an
//! exact integer, that integer is kept in `argument` so callers can compare
//! exactly instead of through rounded logs. `ln` of a big integer is taken
//! from its top 64 bits plus a binary exponent, so the relative error is on
//! the order of `f64::EPSILON`.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use super::factor::{factor_rational, FactorEffort};
use super::valuation::valuation_big;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ExactLogOfInteger,
    SumOfLogs,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeightValue {
    pub value: f64,
    pub provenance: Provenance,
    /// `exp(value)` exactly, when that is an integer.
    #[serde(serialize_with = "ser_opt_int")]
    pub argument: Option<BigInt>,
}

fn ser_opt_int<S: serde::Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(n) => s.serialize_some(&n.to_string()),
        None => s.serialize_none(),
    }
}

impl HeightValue {
    fn log_of(n: BigInt) -> HeightValue {
        HeightValue {
            value: ln_biguint(n.magnitude()),
            provenance: Provenance::ExactLogOfInteger,
            argument: Some(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeightError {
    #[error("all values are zero")]
    AllZero,
    #[error("zero value where a nonzero one is required")]
    ZeroValue,
    #[error("rad needs at least two values")]
    TooFewValues,
    #[error("{0} could not be factored completely")]
    Unfactored(String),
}

pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().unwrap() as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Height of a tuple as a projective point; a single value `x` is read as
/// the point `(x, 1)`, giving `log max(|p|, q)` for `x = p/q`.
pub fn height(values: &[BigRational]) -> Result<HeightValue, HeightError> {
    if values.is_empty() || values.iter().all(|v| v.is_zero()) {
        return Err(HeightError::AllZero);
    }
    let owned;
    let vals: &[BigRational] = if values.len() == 1 {
        owned = [values[0].clone(), BigRational::one()];
        &owned
    } else {
        values
    };
    let l = vals.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
    let ints: Vec<BigInt> = vals.iter().map(|v| v.numer() * (&l / v.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, n| g.gcd(n));
    let m = ints.iter().map(|n| (n / &g).magnitude().clone()).max().unwrap();
    Ok(HeightValue::log_of(BigInt::from(m)))
}

/// Sum of `log p` over primes at which the values' valuations are not all
/// equal. Needs complete factorizations of every numerator and denominator.
pub fn rad(values: &[BigRational], effort: &FactorEffort) -> Result<HeightValue, HeightError> {
    if values.len() < 2 {
        return Err(HeightError::TooFewValues);
    }
    if values.iter().any(|v| v.is_zero()) {
        return Err(HeightError::ZeroValue);
    }
    let mut support = BTreeSet::new();
    for v in values {
        let prof = factor_rational(v, effort);
        if !prof.is_complete() {
            return Err(HeightError::Unfactored(v.to_string()));
        }
        support.extend(prof.known_factors.into_keys());
    }
    let mut product = BigInt::one();
    for p in support {
        let pu = p.magnitude();
        let first = valuation_big(&values[0], pu);
        if values[1..].iter().any(|v| valuation_big(v, pu) != first) {
            product *= p;
        }
    }
    let mut h = HeightValue::log_of(product);
    h.provenance = Provenance::SumOfLogs;
    Ok(h)
}

/// `sum_p min(v_p(a)^+, v_p(b)^+) log p`, which over Q is
/// `log gcd(num a, num b)`.
pub fn hgcd(a: &BigRational, b: &BigRational) -> Result<HeightValue, HeightError> {
    if a.is_zero() || b.is_zero() {
        return Err(HeightError::ZeroValue);
    }
    Ok(HeightValue::log_of(a.numer().gcd(b.numer())))
}
