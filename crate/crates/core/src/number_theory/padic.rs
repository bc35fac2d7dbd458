//! Valuations of iterate values in truncated p-adic arithmetic.
//!
//! Values `f^n(x)` have numerators with roughly `d^n` digits, so they are
//! never built here. Instead the homogeneous pair `(P_k(x), Q_k(x))` is
//! iterated with every entry stored as `p^v * (u + O(p^r))`. When
//! cancellation exhausts the relative precision `r` the whole run restarts at
//! twice the precision, up to a ceiling; past the ceiling the answer is
//! `Unknown`, never a guess.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::valuation::split_prime_power;
use crate::exact::{Poly, ProjPoint, RatMap};

pub const DEFAULT_START_PRECISION: u32 = 32;
pub const DEFAULT_PRECISION_CEILING: u32 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicConfig {
    pub start_precision: u32,
    pub ceiling: u32,
}

impl Default for PadicConfig {
    fn default() -> Self {
        PadicConfig {
            start_precision: DEFAULT_START_PRECISION,
            ceiling: DEFAULT_PRECISION_CEILING,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("f^{level}(x) = 0, valuation is infinite")]
    ZeroValue { level: usize },
    #[error("the orbit reaches infinity at level {level}")]
    Pole { level: usize },
    #[error("{0} is not a prime")]
    NotPrime(u64),
}

/// Outcome of a p-adic valuation computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IterValuation {
    Exact(i64),
    /// The value is exactly zero.
    Infinite,
    /// Still indistinguishable from zero at the precision ceiling.
    Unknown,
}

impl IterValuation {
    pub fn exact(self) -> Option<i64> {
        match self {
            IterValuation::Exact(v) => Some(v),
            _ => None,
        }
    }
}

/// Valuations of `P_k(x)` and `Q_k(x)` at one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairValuation {
    pub p: IterValuation,
    pub q: IterValuation,
}

impl PairValuation {
    /// `v_p(P_k(x) / Q_k(x))`.
    pub fn quotient(self) -> IterValuation {
        match (self.p, self.q) {
            (IterValuation::Exact(a), IterValuation::Exact(b)) => IterValuation::Exact(a - b),
            (IterValuation::Infinite, IterValuation::Exact(_)) => IterValuation::Infinite,
            _ => IterValuation::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Padic {
    Zero,
    /// Known only to be divisible by `p^abs`.
    Small { abs: i64 },
    /// `p^v * (u + O(p^rel))` with `p` not dividing `u`, `0 < u < p^rel`.
    Unit { v: i64, u: BigInt, rel: u32 },
}

struct Ctx {
    p: BigInt,
    prec: u32,
    powers: Vec<BigInt>,
}

impl Ctx {
    fn new(p: u64, prec: u32) -> Ctx {
        let p = BigInt::from(p);
        let mut powers = Vec::with_capacity(prec as usize + 1);
        powers.push(BigInt::one());
        for k in 1..=prec as usize {
            let next = &powers[k - 1] * &p;
            powers.push(next);
        }
        Ctx { p, prec, powers }
    }

    fn pow(&self, k: u32) -> &BigInt {
        &self.powers[k as usize]
    }

    fn from_int(&self, n: &BigInt) -> Padic {
        if n.is_zero() {
            return Padic::Zero;
        }
        let (v, m) = split_prime_power(n, self.p_u64());
        let modulus = self.pow(self.prec);
        Padic::Unit {
            v: v as i64,
            u: m.mod_floor(modulus),
            rel: self.prec,
        }
    }

    fn p_u64(&self) -> u64 {
        u64::try_from(&self.p).unwrap()
    }

    fn from_rational(&self, x: &BigRational) -> Padic {
        let n = self.from_int(x.numer());
        if x.denom().is_one() {
            return n;
        }
        let d = self.from_int(x.denom());
        self.mul(&n, &self.inv_unit(&d))
    }

    fn mul(&self, a: &Padic, b: &Padic) -> Padic {
        use Padic::*;
        match (a, b) {
            (Zero, _) | (_, Zero) => Zero,
            (Small { abs: x }, Small { abs: y }) => Small { abs: x + y },
            (Small { abs }, Unit { v, .. }) | (Unit { v, .. }, Small { abs }) => {
                Small { abs: abs + v }
            }
            (Unit { v: v1, u: u1, rel: r1 }, Unit { v: v2, u: u2, rel: r2 }) => {
                let rel = (*r1).min(*r2);
                Unit {
                    v: v1 + v2,
                    u: (u1 * u2).mod_floor(self.pow(rel)),
                    rel,
                }
            }
        }
    }

    fn add(&self, a: &Padic, b: &Padic) -> Padic {
        use Padic::*;
        match (a, b) {
            (Zero, x) | (x, Zero) => x.clone(),
            (Small { abs: x }, Small { abs: y }) => Small { abs: *x.min(y) },
            (Small { abs }, Unit { v, u, rel }) | (Unit { v, u, rel }, Small { abs }) => {
                if v < abs {
                    let r = (*rel as i64).min(abs - v) as u32;
                    Unit {
                        v: *v,
                        u: u.mod_floor(self.pow(r)),
                        rel: r,
                    }
                } else {
                    Small { abs: *abs }
                }
            }
            (Unit { v: v1, u: u1, rel: r1 }, Unit { v: v2, u: u2, rel: r2 }) => {
                let v = *v1.min(v2);
                let abs = (v1 + *r1 as i64).min(v2 + *r2 as i64);
                let width = (abs - v) as u32;
                // A term shifted past the known width vanishes modulo p^width.
                let shifted = |u: &BigInt, shift: i64| {
                    if shift < width as i64 {
                        u * self.pow(shift as u32)
                    } else {
                        BigInt::zero()
                    }
                };
                let s = (shifted(u1, v1 - v) + shifted(u2, v2 - v)).mod_floor(self.pow(width));
                if s.is_zero() {
                    return Small { abs };
                }
                let (k, m) = split_prime_power(&s, self.p_u64());
                let k = k as u32;
                Unit {
                    v: v + k as i64,
                    u: m,
                    rel: width - k,
                }
            }
        }
    }

    fn inv_unit(&self, a: &Padic) -> Padic {
        let Padic::Unit { v, u, rel } = a else {
            unreachable!("only exact nonzero integers are inverted")
        };
        let inv = mod_inverse(u, self.pow(*rel)).expect("unit is invertible");
        Padic::Unit {
            v: -v,
            u: inv,
            rel: *rel,
        }
    }

    /// `sum a_i x^i y^(d-i)`.
    fn hom_eval(&self, coeffs: &[Padic], d: usize, x: &Padic, y: &Padic) -> Padic {
        let mut xp = Vec::with_capacity(d + 1);
        let mut yp = Vec::with_capacity(d + 1);
        xp.push(self.from_int(&BigInt::one()));
        yp.push(self.from_int(&BigInt::one()));
        for k in 1..=d {
            xp.push(self.mul(&xp[k - 1], x));
            yp.push(self.mul(&yp[k - 1], y));
        }
        let mut acc = Padic::Zero;
        for (i, c) in coeffs.iter().enumerate() {
            if *c == Padic::Zero {
                continue;
            }
            let term = self.mul(c, &self.mul(&xp[i], &yp[d - i]));
            acc = self.add(&acc, &term);
        }
        acc
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.abs().is_one() {
        return None;
    }
    Some((e.x * e.gcd.signum()).mod_floor(m))
}

fn resolve(x: &Padic) -> Option<IterValuation> {
    match x {
        Padic::Zero => Some(IterValuation::Infinite),
        Padic::Unit { v, .. } => Some(IterValuation::Exact(*v)),
        Padic::Small { .. } => None,
    }
}

/// Valuations of `(P_k(x), Q_k(x))` for `k = 0..=n`, where `f^k = P_k/Q_k`
/// is built by homogeneous composition from `(x, 1)`.
pub fn pair_valuations(
    f: &RatMap,
    x: &BigRational,
    n: usize,
    p: u64,
    cfg: PadicConfig,
) -> Result<Vec<PairValuation>, PadicError> {
    if !super::primes::is_prime_u64(p) {
        return Err(PadicError::NotPrime(p));
    }
    let d = f.degree();
    let mut prec = cfg.start_precision.max(1);
    loop {
        let ctx = Ctx::new(p, prec);
        let num: Vec<Padic> = coeffs_padic(&ctx, f.num(), d);
        let den: Vec<Padic> = coeffs_padic(&ctx, f.den(), d);
        let mut cur = (ctx.from_rational(x), ctx.from_int(&BigInt::one()));
        let mut out = Vec::with_capacity(n + 1);
        let mut unresolved = false;
        for k in 0..=n {
            if k > 0 {
                let next_p = ctx.hom_eval(&num, d, &cur.0, &cur.1);
                let next_q = ctx.hom_eval(&den, d, &cur.0, &cur.1);
                cur = (next_p, next_q);
            }
            let pv = resolve(&cur.0);
            let qv = resolve(&cur.1);
            if pv.is_none() || qv.is_none() {
                unresolved = true;
            }
            out.push(PairValuation {
                p: pv.unwrap_or(IterValuation::Unknown),
                q: qv.unwrap_or(IterValuation::Unknown),
            });
        }
        if !unresolved || prec >= cfg.ceiling {
            return Ok(out);
        }
        prec = (prec * 2).min(cfg.ceiling);
    }
}

fn coeffs_padic(ctx: &Ctx, p: &Poly, d: usize) -> Vec<Padic> {
    (0..=d).map(|i| ctx.from_rational(&p.coeff(i))).collect()
}

/// `v_p(f^n(x))` without constructing `f^n(x)`.
pub fn valuation_of_iterate(
    f: &RatMap,
    x: &BigRational,
    n: usize,
    p: u64,
) -> Result<IterValuation, PadicError> {
    valuation_of_iterate_with(f, x, n, p, PadicConfig::default())
}

pub fn valuation_of_iterate_with(
    f: &RatMap,
    x: &BigRational,
    n: usize,
    p: u64,
    cfg: PadicConfig,
) -> Result<IterValuation, PadicError> {
    let levels = pair_valuations(f, x, n, p, cfg)?;
    for (k, lv) in levels.iter().enumerate() {
        if lv.q == IterValuation::Infinite && k <= n {
            return Err(PadicError::Pole { level: k });
        }
    }
    match levels[n].quotient() {
        IterValuation::Infinite => Err(PadicError::ZeroValue { level: n }),
        IterValuation::Unknown => exact_zero_check(f, x, n),
        v => Ok(v),
    }
}

/// Cancellation to exactly zero looks like lost precision p-adically. When
/// the orbit is small enough to follow exactly, tell the two apart.
fn exact_zero_check(f: &RatMap, x: &BigRational, n: usize) -> Result<IterValuation, PadicError> {
    const BIT_LIMIT: u64 = 1 << 16;
    let mut v = ProjPoint::Finite(x.clone());
    for k in 1..=n {
        v = f.eval(&v);
        match &v {
            ProjPoint::Infinity => return Err(PadicError::Pole { level: k }),
            ProjPoint::Finite(r) if r.numer().bits() + r.denom().bits() > BIT_LIMIT => {
                return Ok(IterValuation::Unknown)
            }
            _ => {}
        }
    }
    if v.is_zero() {
        Err(PadicError::ZeroValue { level: n })
    } else {
        Ok(IterValuation::Unknown)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_map;
    use crate::number_theory::valuation::{valuation, Valuation};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn exact_route(f: &RatMap, x: &BigRational, n: usize, p: u64) -> Valuation {
        let mut v = x.clone();
        for _ in 0..n {
            v = f.num().eval(&v) / f.den().eval(&v);
        }
        valuation(&v, p)
    }

    #[test]
    fn spec_examples() {
        let f = parse_map("z^2+1").unwrap();
        let zero = q(0, 1);
        assert_eq!(valuation_of_iterate(&f, &zero, 3, 5).unwrap(), IterValuation::Exact(1));
        assert_eq!(valuation_of_iterate(&f, &zero, 2, 5).unwrap(), IterValuation::Exact(0));
        let g = parse_map("z^2").unwrap();
        assert_eq!(valuation_of_iterate(&g, &q(1, 1), 7, 3).unwrap(), IterValuation::Exact(0));
    }

    #[test]
    fn zero_values_are_errors() {
        let f = parse_map("z^2-z").unwrap();
        assert_eq!(
            valuation_of_iterate(&f, &q(0, 1), 3, 5),
            Err(PadicError::ZeroValue { level: 3 })
        );
        assert!(matches!(
            valuation_of_iterate(&f, &q(1, 1), 1, 7),
            Err(PadicError::ZeroValue { .. })
        ));
    }

    #[test]
    fn poles() {
        let f = parse_map("(z^2-4z+1)/(2z)").unwrap();
        assert_eq!(
            valuation_of_iterate(&f, &q(0, 1), 2, 3),
            Err(PadicError::Pole { level: 1 })
        );
    }

    #[test]
    fn rational_map_and_denominators() {
        let f = parse_map("(z^2-4z+1)/(2z)").unwrap();
        for p in [2u64, 3, 5, 7, 11, 13] {
            for n in 1..=5 {
                let e = exact_route(&f, &q(-1, 1), n, p).finite().unwrap();
                assert_eq!(
                    valuation_of_iterate(&f, &q(-1, 1), n, p).unwrap(),
                    IterValuation::Exact(e)
                );
            }
        }
        let g = parse_map("z^3 - 6012/2755 z^2 + 12636/13775 z + 54/95").unwrap();
        for p in [2u64, 3, 5, 19, 29, 1459] {
            for n in 1..=4 {
                let e = exact_route(&g, &q(6, 5), n, p).finite().unwrap();
                assert_eq!(valuation_of_iterate(&g, &q(6, 5), n, p).unwrap(), IterValuation::Exact(e));
            }
        }
    }

    #[test]
    fn family_two_adic_valuations() {
        // v_2(P_n(-1)) = 2^n - 1 for b = 2, at levels where exact values are huge.
        let f = parse_map("(z^2-4z+1)/(2z)").unwrap();
        let levels = pair_valuations(&f, &q(-1, 1), 12, 2, PadicConfig::default()).unwrap();
        for (n, lv) in levels.iter().enumerate().skip(1) {
            let want = (1i64 << n) - 1;
            assert_eq!(lv.p, IterValuation::Exact(want), "level {n}");
            assert_eq!(lv.q, IterValuation::Exact(want), "level {n}");
        }
    }

    #[test]
    fn sum_with_far_apart_valuations() {
        let ctx = Ctx::new(3, 4);
        let a = Padic::Unit { v: 0, u: BigInt::from(2), rel: 4 };
        let b = Padic::Unit { v: 10, u: BigInt::from(1), rel: 4 };
        assert_eq!(ctx.add(&a, &b), a);
        assert_eq!(ctx.add(&b, &a), a);
    }

    #[test]
    fn ceiling_yields_unknown() {
        // f(1) = -7^20 cancels to order 20, beyond a precision-8 ceiling.
        let c = BigRational::from_integer(BigInt::from(7u32).pow(20) + 1);
        let f = RatMap::polynomial(Poly::new(vec![-c, q(0, 1), q(1, 1)]));
        let cfg = PadicConfig { start_precision: 4, ceiling: 8 };
        let lv = pair_valuations(&f, &q(1, 1), 1, 7, cfg).unwrap();
        assert_eq!(lv[1].p, IterValuation::Unknown);
        let lv = pair_valuations(&f, &q(1, 1), 1, 7, PadicConfig::default()).unwrap();
        assert_eq!(lv[1].p, IterValuation::Exact(20));
    }
}
