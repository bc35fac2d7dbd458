//! Forward orbits with exact cycle detection and a sound escape test.
//!
//! Escape is certified by a height inequality. Write `f = F1/F2` with
//! integer forms of degree `d` and take the extended-gcd identities
//! `G1 F1 + G2 F2 = R1 Y^(2d-1)` and `H1 F1 + H2 F2 = R2 X^(2d-1)`. For a
//! point `[a:b]` in lowest terms with `H = max(|a|, |b|)` this gives
//! `H(f(x)) >= H^d / (S R1 R2)`, where `S` bounds the 1-norms of the
//! cofactors. Once `H^(d-1) > S R1 R2` the height grows strictly at every
//! later step, so the point cannot be preperiodic. Polynomial maps also use
//! the archimedean bound `|x| > max(1, (1 + sum_{i<d} |a_i|) / |a_d|)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::exact::{Poly, ProjPoint, RatMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OrbitStatus {
    /// `values[tail] = values[tail + cycle]`, both minimal.
    Preperiodic { tail: usize, cycle: usize },
    Escaping { at_step: usize },
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitRecord {
    pub start: ProjPoint,
    pub values: Vec<ProjPoint>,
    pub status: OrbitStatus,
}

impl OrbitRecord {
    pub fn is_preperiodic(&self) -> bool {
        matches!(self.status, OrbitStatus::Preperiodic { .. })
    }
}

/// Precomputed data for the escape test of one map.
#[derive(Debug, Clone)]
pub struct EscapeBound {
    degree: u32,
    /// `S * R1 * R2`.
    height_threshold: BigRational,
    /// Archimedean radius, polynomial maps only.
    radius: Option<BigRational>,
}

impl EscapeBound {
    pub fn new(f: &RatMap) -> EscapeBound {
        let d = f.degree();
        let (f1, f2) = integer_forms(f);
        let rev = |p: &Poly| {
            let mut c: Vec<BigRational> = (0..=d).map(|i| p.coeff(i)).collect();
            c.reverse();
            Poly::new(c)
        };
        let (s1, r1) = cofactor_bound(&f1, &f2);
        let (s2, r2) = cofactor_bound(&rev(&f1), &rev(&f2));
        let s = if s1 > s2 { s1 } else { s2 };
        let radius = f.as_polynomial().map(|p| {
            let lead = p.leading().unwrap().abs();
            let tail = (0..d).fold(BigRational::one(), |acc, i| acc + p.coeff(i).abs());
            let r = tail / lead;
            if r < BigRational::one() {
                BigRational::one()
            } else {
                r
            }
        });
        EscapeBound {
            degree: d as u32,
            height_threshold: s * BigRational::from_integer(r1 * r2),
            radius,
        }
    }

    /// Whether the orbit of `x` provably escapes from here on.
    pub fn escapes(&self, x: &ProjPoint) -> bool {
        let ProjPoint::Finite(v) = x else {
            return false;
        };
        if let Some(r) = &self.radius {
            if v.abs() > *r {
                return true;
            }
        }
        let h = v.numer().abs().max(v.denom().clone());
        let hp = BigRational::from_integer(num_traits::pow(h, self.degree as usize - 1));
        hp > self.height_threshold
    }
}

/// The numerator and denominator scaled to integer coefficients.
fn integer_forms(f: &RatMap) -> (Poly, Poly) {
    let l = f
        .num()
        .coeffs()
        .iter()
        .chain(f.den().coeffs())
        .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let s = BigRational::from_integer(l);
    (f.num().scale(&s), f.den().scale(&s))
}

/// For coprime `a, b`: `(D (|u|_1 + |v|_1), D)` where `u a + v b = 1` and
/// `D` is the least common denominator of `u, v`.
fn cofactor_bound(a: &Poly, b: &Poly) -> (BigRational, BigInt) {
    let (u, v) = bezout(a, b);
    let den = u
        .coeffs()
        .iter()
        .chain(v.coeffs())
        .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let norm = u
        .coeffs()
        .iter()
        .chain(v.coeffs())
        .fold(BigRational::zero(), |acc, c| acc + c.abs());
    (norm * BigRational::from_integer(den.clone()), den)
}

/// `(u, v)` with `u a + v b = 1`; `a` and `b` must be coprime.
fn bezout(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Poly::one(), Poly::zero());
    let (mut t0, mut t1) = (Poly::zero(), Poly::one());
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        let s2 = &s0 - &(&q * &s1);
        let t2 = &t0 - &(&q * &t1);
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s2);
        (t0, t1) = (t1, t2);
    }
    let g = r0.coeff(0);
    assert!(r0.deg0() == 0 && !g.is_zero(), "forms must be coprime");
    let inv = g.recip();
    (s0.scale(&inv), t0.scale(&inv))
}

/// Iterate until a repeat, a certified escape, or `max_steps` applications.
pub fn orbit(f: &RatMap, x0: &ProjPoint, max_steps: usize) -> OrbitRecord {
    orbit_with(f, &EscapeBound::new(f), x0, max_steps)
}

pub fn orbit_with(f: &RatMap, bound: &EscapeBound, x0: &ProjPoint, max_steps: usize) -> OrbitRecord {
    let mut seen: HashMap<ProjPoint, usize> = HashMap::new();
    let mut values = vec![x0.clone()];
    seen.insert(x0.clone(), 0);
    let mut status = OrbitStatus::Truncated;
    if bound.escapes(x0) {
        status = OrbitStatus::Escaping { at_step: 0 };
    } else {
        for k in 1..=max_steps {
            let next = f.eval(&values[k - 1]);
            if let Some(&j) = seen.get(&next) {
                values.push(next);
                status = OrbitStatus::Preperiodic { tail: j, cycle: k - j };
                break;
            }
            seen.insert(next.clone(), k);
            let esc = bound.escapes(&next);
            values.push(next);
            if esc {
                status = OrbitStatus::Escaping { at_step: k };
                break;
            }
        }
    }
    OrbitRecord {
        start: x0.clone(),
        values,
        status,
    }
}
