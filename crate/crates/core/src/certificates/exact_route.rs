//! Exact evaluation of critical-orbit quantities, used to re-check
//! certificates independently of the modular scan and the p-adic engine.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Signed;

use crate::dynamics::ORACLE_DEGREE_CAP;
use crate::exact::RatMap;
use crate::number_theory::valuation::valuation_big;
use crate::number_theory::Valuation;

/// `(P_m(x), Q_m(x))` for `m = 0..=n`. Levels with `d^m <= 256` come from
/// the expanded iterate; higher levels from the homogeneous scalar
/// recursion. `None` once a value exceeds `bit_cap` bits.
pub fn pairs(f: &RatMap, x: &BigRational, n: usize, bit_cap: u64) -> Option<Vec<(BigRational, BigRational)>> {
    let scalar = f.scalar_pairs_capped(x, n, bit_cap)?;
    let its = f.iterates(n, ORACLE_DEGREE_CAP);
    let out = scalar
        .into_iter()
        .enumerate()
        .map(|(m, pair)| match its.get(m) {
            Some(it) => (it.p.eval(x), it.q.eval(x)),
            None => pair,
        })
        .collect();
    Some(out)
}

/// `f^m(x)` for a polynomial map, `m = 0..=n`.
pub fn poly_orbit(f: &RatMap, x: &BigRational, n: usize, bit_cap: u64) -> Option<Vec<BigRational>> {
    let ps = pairs(f, x, n, bit_cap)?;
    Some(ps.into_iter().map(|(p, q)| p / q).collect())
}

/// `v_p(x)` with `x = 0` reported as `i64::MAX`.
pub fn val(x: &BigRational, p: &BigInt) -> i64 {
    match valuation_big(x, &p.abs().to_biguint().unwrap_or_else(|| BigUint::from(0u8))) {
        Valuation::Finite(v) => v,
        Valuation::Infinite => i64::MAX,
    }
}
