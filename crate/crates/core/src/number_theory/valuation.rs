//! p-adic valuations of rationals.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// `v_p(x)`, with `Infinite` standing for `v_p(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Valuation::Finite(0)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer magnitude.
pub fn uint_valuation(n: &BigUint, p: &BigUint) -> u64 {
    if n.is_zero() {
        return 0;
    }
    if *p == BigUint::from(2u32) {
        return n.trailing_zeros().unwrap_or(0);
    }
    // Strip p^(2^k) blocks first so large valuations stay cheap.
    let mut count = 0u64;
    let mut rest = n.clone();
    let mut powers = vec![p.clone()];
    loop {
        let next = powers.last().unwrap() * powers.last().unwrap();
        if next.bits() > rest.bits() {
            break;
        }
        powers.push(next);
    }
    for (k, pk) in powers.iter().enumerate().rev() {
        loop {
            let (q, r) = rest.div_rem(pk);
            if !r.is_zero() {
                break;
            }
            rest = q;
            count += 1u64 << k;
        }
    }
    count
}

pub fn int_valuation(n: &BigInt, p: u64) -> Valuation {
    if n.is_zero() {
        return Valuation::Infinite;
    }
    Valuation::Finite(uint_valuation(n.magnitude(), &BigUint::from(p)) as i64)
}

/// `v_p(numerator) - v_p(denominator)`.
pub fn valuation(x: &BigRational, p: u64) -> Valuation {
    valuation_big(x, &BigUint::from(p))
}

pub fn valuation_big(x: &BigRational, p: &BigUint) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let a = uint_valuation(x.numer().magnitude(), p) as i64;
    let b = uint_valuation(x.denom().magnitude(), p) as i64;
    Valuation::Finite(a - b)
}

/// Split `n = p^v * m` with `p` not dividing `m`; `n` must be nonzero.
pub fn split_prime_power(n: &BigInt, p: u64) -> (u64, BigInt) {
    let pb = BigUint::from(p);
    let v = uint_valuation(n.magnitude(), &pb);
    let m = n.magnitude() / pb.pow(v as u32);
    let sign = if n.sign() == Sign::Minus { Sign::Minus } else { Sign::Plus };
    (v, BigInt::from_biguint(sign, m))
}

/// Odd part and 2-adic valuation, via a bit shift.
pub fn split_two(n: &BigInt) -> (u64, BigInt) {
    let v = n.magnitude().trailing_zeros().unwrap_or(0);
    (v, n >> v)
}

pub fn small_valuation(n: u64, p: u64) -> u32 {
    if n == 0 {
        return 0;
    }
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn examples() {
        assert_eq!(valuation(&q(88, 1), 2), Valuation::Finite(3));
        assert_eq!(valuation(&q(1, 1), 7), Valuation::Finite(0));
        assert_eq!(valuation(&q(1183, 27), 7), Valuation::Finite(1));
        assert_eq!(valuation(&q(1183, 27), 3), Valuation::Finite(-3));
        assert_eq!(valuation(&q(0, 1), 5), Valuation::Infinite);
    }

    #[test]
    fn large_valuations() {
        let n = BigInt::from(3u32).pow(1000) * 7;
        assert_eq!(int_valuation(&n, 3), Valuation::Finite(1000));
        let m = BigInt::from(2u32).pow(4095) * -11;
        assert_eq!(split_two(&m), (4095, BigInt::from(-11)));
        assert_eq!(split_prime_power(&BigInt::from(-250), 5), (3, BigInt::from(-2)));
    }

    proptest! {
        #[test]
        fn additive(a in 1i64..100_000, b in 1i64..100_000, c in 1i64..1000, d in 1i64..1000,
                    p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])) {
            let x = q(a, c);
            let y = q(-b, d);
            let lhs = valuation(&(&x * &y), p).finite().unwrap();
            let rhs = valuation(&x, p).finite().unwrap() + valuation(&y, p).finite().unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn agrees_with_repeated_division(n in 1u64..10_000_000, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let v = int_valuation(&BigInt::from(n), p).finite().unwrap();
            prop_assert_eq!(v as u32, small_valuation(n, p));
        }
    }
}
