//! Integer and rational factorization: trial division, Miller-Rabin and
//! Pollard-Brent rho under an explicit effort budget.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::primes::{is_probable_prime, primes_up_to};

pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;
pub const DEFAULT_RHO_ITERATIONS: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorEffort {
    pub trial_bound: u64,
    /// Total rho iterations shared by all splitting attempts in one call.
    pub rho_iterations: u64,
    pub mr_rounds: usize,
}

impl Default for FactorEffort {
    fn default() -> Self {
        FactorEffort {
            trial_bound: DEFAULT_TRIAL_BOUND,
            rho_iterations: DEFAULT_RHO_ITERATIONS,
            mr_rounds: 16,
        }
    }
}

impl FactorEffort {
    pub fn trial_only(bound: u64) -> Self {
        FactorEffort {
            trial_bound: bound,
            rho_iterations: 0,
            mr_rounds: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CofactorStatus {
    Unit,
    Composite,
}

/// `value = prod p^e * cofactor_num / cofactor_den`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationProfile {
    pub value: BigRational,
    pub known_factors: BTreeMap<BigInt, i64>,
    /// Primes in `known_factors` above the trial bound, certified only by
    /// Miller-Rabin.
    pub probable_primes: BTreeSet<BigInt>,
    /// Carries the sign of `value`.
    pub cofactor_num: BigInt,
    pub cofactor_den: BigInt,
}

impl ValuationProfile {
    pub fn status(&self) -> CofactorStatus {
        if self.cofactor_num.abs().is_one() && self.cofactor_den.is_one() {
            CofactorStatus::Unit
        } else {
            CofactorStatus::Composite
        }
    }

    pub fn is_complete(&self) -> bool {
        self.status() == CofactorStatus::Unit
    }

    pub fn exponent(&self, p: &BigInt) -> i64 {
        self.known_factors.get(p).copied().unwrap_or(0)
    }

    /// Multiply the profile back out.
    pub fn reconstruct(&self) -> BigRational {
        let mut num = self.cofactor_num.clone();
        let mut den = self.cofactor_den.clone();
        for (p, &e) in &self.known_factors {
            let pe = num_traits::pow(p.clone(), e.unsigned_abs() as usize);
            if e > 0 {
                num *= pe;
            } else {
                den *= pe;
            }
        }
        BigRational::new(num, den)
    }
}

impl Serialize for ValuationProfile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Factors<'a>(&'a BTreeMap<BigInt, i64>);
        impl Serialize for Factors<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for (p, e) in self.0 {
                    m.serialize_entry(&p.to_string(), e)?;
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(Some(5))?;
        m.serialize_entry("value", &self.value.to_string())?;
        m.serialize_entry("factors", &Factors(&self.known_factors))?;
        m.serialize_entry("cofactor_num", &self.cofactor_num.to_string())?;
        m.serialize_entry("cofactor_den", &self.cofactor_den.to_string())?;
        m.serialize_entry("cofactor", &self.status())?;
        m.end()
    }
}

fn trial_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(DEFAULT_TRIAL_BOUND))
}

fn primes_to(bound: u64) -> std::borrow::Cow<'static, [u64]> {
    if bound <= DEFAULT_TRIAL_BOUND {
        let all = trial_primes();
        let end = all.partition_point(|&p| p <= bound);
        std::borrow::Cow::Borrowed(&all[..end])
    } else {
        std::borrow::Cow::Owned(primes_up_to(bound))
    }
}

struct Split {
    primes: BTreeMap<BigUint, u64>,
    probable: BTreeSet<BigUint>,
    rest: BigUint,
}

fn factor_uint(n: &BigUint, effort: &FactorEffort, budget: &mut u64) -> Split {
    let mut primes = BTreeMap::new();
    let mut probable = BTreeSet::new();
    let mut n = n.clone();
    let mut last_trial = 1u64;
    for &p in primes_to(effort.trial_bound).iter() {
        if n.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > n {
            // Everything left is a single prime below bound^2.
            *primes.entry(n.clone()).or_insert(0) += 1;
            n = BigUint::one();
            break;
        }
        if (&n % p).is_zero() {
            let mut e = 0;
            while (&n % p).is_zero() {
                n /= p;
                e += 1;
            }
            primes.insert(pb, e);
        }
        last_trial = p;
    }
    let mut rest = BigUint::one();
    let mut stack = if n.is_one() { vec![] } else { vec![n] };
    while let Some(m) = stack.pop() {
        if m.to_u64().is_some_and(|s| s <= last_trial.saturating_mul(last_trial)) {
            *primes.entry(m).or_insert(0) += 1;
            continue;
        }
        if is_probable_prime(&m, effort.mr_rounds) {
            probable.insert(m.clone());
            *primes.entry(m).or_insert(0) += 1;
            continue;
        }
        match pollard_brent(&m, budget) {
            Some(f) => {
                let g = &m / &f;
                stack.push(f);
                stack.push(g);
            }
            None => rest *= m,
        }
    }
    Split { primes, probable, rest }
}

/// Brent's variant of Pollard rho; consumes iterations from `budget`.
fn pollard_brent(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let one = BigUint::one();
    for c in 1u32.. {
        if *budget == 0 {
            return None;
        }
        let c = BigUint::from(c);
        let step = |x: &BigUint| (x * x + &c) % n;
        let (mut y, mut r, mut q) = (BigUint::from(2u32), 1u64, BigUint::one());
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        const M: u64 = 128;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let lim = M.min(r - k);
                for _ in 0..lim {
                    y = step(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += lim;
                *budget = budget.saturating_sub(lim);
                if *budget == 0 && g.is_one() {
                    return None;
                }
            }
            r *= 2;
        }
        if g == *n {
            loop {
                ys = step(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n && g != one {
            return Some(g);
        }
    }
    None
}

/// Factor a nonzero integer. Zero yields an empty profile with value 0.
pub fn factor(n: &BigInt, effort: &FactorEffort) -> ValuationProfile {
    factor_rational(&BigRational::from_integer(n.clone()), effort)
}

pub fn factor_rational(x: &BigRational, effort: &FactorEffort) -> ValuationProfile {
    let mut budget = effort.rho_iterations;
    let mut known_factors = BTreeMap::new();
    let mut probable_primes = BTreeSet::new();
    if x.is_zero() {
        return ValuationProfile {
            value: x.clone(),
            known_factors,
            probable_primes,
            cofactor_num: BigInt::zero(),
            cofactor_den: BigInt::one(),
        };
    }
    let num = factor_uint(x.numer().magnitude(), effort, &mut budget);
    let den = factor_uint(x.denom().magnitude(), effort, &mut budget);
    for (p, e) in num.primes {
        known_factors.insert(BigInt::from(p), e as i64);
    }
    for (p, e) in den.primes {
        known_factors.insert(BigInt::from(p), -(e as i64));
    }
    for p in num.probable.into_iter().chain(den.probable) {
        probable_primes.insert(BigInt::from(p));
    }
    let sign = if x.is_negative() { Sign::Minus } else { Sign::Plus };
    ValuationProfile {
        value: x.clone(),
        known_factors,
        probable_primes,
        cofactor_num: BigInt::from_biguint(sign, num.rest),
        cofactor_den: BigInt::from(den.rest),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn examples() {
        let e = FactorEffort::default();
        let p = factor(&b(88), &e);
        assert_eq!(p.known_factors, BTreeMap::from([(b(2), 3), (b(11), 1)]));
        assert!(p.is_complete());
        let m = factor(&b(-1), &e);
        assert!(m.known_factors.is_empty());
        assert_eq!(m.cofactor_num, b(-1));
        let q = factor(&b(677), &e);
        assert_eq!(q.known_factors, BTreeMap::from([(b(677), 1)]));
    }

    #[test]
    fn rho_splits_beyond_trial_bound() {
        // Product of two primes above 10^6.
        let n = b(1_000_003) * b(1_000_033);
        let p = factor(&n, &FactorEffort::default());
        assert_eq!(p.known_factors, BTreeMap::from([(b(1_000_003), 1), (b(1_000_033), 1)]));
        assert!(p.is_complete());
        let big = (BigInt::one() << 89u32) - 1; // Mersenne prime
        let p = factor(&(&big * 3), &FactorEffort::default());
        assert!(p.probable_primes.contains(&big));
    }

    #[test]
    fn budget_exhaustion_leaves_cofactor() {
        let n = b(1_000_003) * b(1_000_033);
        let p = factor(&n, &FactorEffort::trial_only(1000));
        assert_eq!(p.status(), CofactorStatus::Composite);
        assert_eq!(p.reconstruct(), BigRational::from_integer(n));
    }

    #[test]
    fn rationals_and_json() {
        let x = BigRational::new(b(-1183), b(27));
        let p = factor_rational(&x, &FactorEffort::default());
        assert_eq!(p.exponent(&b(3)), -3);
        assert_eq!(p.exponent(&b(7)), 1);
        assert_eq!(p.exponent(&b(13)), 2);
        assert_eq!(p.cofactor_num, b(-1));
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(
            json,
            r#"{"value":"-1183/27","factors":{"3":-3,"7":1,"13":2},"cofactor_num":"-1","cofactor_den":"1","cofactor":"unit"}"#
        );
    }

    proptest! {
        #[test]
        fn reconstruction(n in -10_000_000_000i64..10_000_000_000i64, d in 1i64..100_000) {
            prop_assume!(n != 0);
            let x = BigRational::new(b(n), b(d));
            let p = factor_rational(&x, &FactorEffort::trial_only(100));
            prop_assert_eq!(p.reconstruct(), x.clone());
            for q in p.known_factors.keys() {
                prop_assert!(p.cofactor_num.mod_floor(q) != BigInt::zero());
                prop_assert!(p.cofactor_den.mod_floor(q) != BigInt::zero());
            }
            let full = factor_rational(&x, &FactorEffort::default());
            prop_assert!(full.is_complete());
            prop_assert_eq!(full.reconstruct(), x);
        }
    }
}
