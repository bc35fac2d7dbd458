//! Rational maps `P/Q` on the projective line and their iterates.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::ExactError;

/// Default bound on `d^n` for full polynomial iterates.
pub const DEFAULT_DEGREE_CAP: usize = 4096;

/// A point of P^1(Q).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProjPoint {
    Finite(BigRational),
    Infinity,
}

impl ProjPoint {
    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            ProjPoint::Finite(x) => Some(x),
            ProjPoint::Infinity => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ProjPoint::Finite(x) if x.is_zero())
    }
}

impl From<BigRational> for ProjPoint {
    fn from(x: BigRational) -> Self {
        ProjPoint::Finite(x)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(x) => write!(f, "{x}"),
            ProjPoint::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ProjPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            return Ok(ProjPoint::Infinity);
        }
        s.parse::<BigRational>()
            .map(ProjPoint::Finite)
            .map_err(serde::de::Error::custom)
    }
}

/// A rational map `num/den` with `gcd(num, den) = 1` in Q[z].
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatMap {
    num: Poly,
    den: Poly,
}

/// `f^n = P_n / Q_n`, built by homogeneous composition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IteratePair {
    pub level: usize,
    pub p: Poly,
    pub q: Poly,
}

impl RatMap {
    /// Build a map, cancelling any common polynomial factor. The scalar
    /// normalisation of the pair is kept as given.
    pub fn new(num: Poly, den: Poly) -> Result<RatMap, ExactError> {
        if den.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        let g = num.gcd(&den);
        if g.deg0() > 0 {
            let (n, _) = num.div_rem(&g);
            let (d, _) = den.div_rem(&g);
            return Ok(RatMap { num: n, den: d });
        }
        Ok(RatMap { num, den })
    }

    pub fn polynomial(p: Poly) -> RatMap {
        RatMap {
            num: p,
            den: Poly::one(),
        }
    }

    /// Canonical scaling: a constant denominator becomes 1; otherwise both
    /// parts get integer coefficients with joint content 1 and the
    /// denominator's leading coefficient is positive.
    pub fn normalized(&self) -> RatMap {
        if self.den.is_constant() {
            let c = self.den.coeff(0);
            return RatMap::polynomial(self.num.scale(&c.recip()));
        }
        let den_lcm = self
            .num
            .coeffs()
            .iter()
            .chain(self.den.coeffs())
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let l = BigRational::from_integer(den_lcm);
        let num = self.num.scale(&l);
        let den = self.den.scale(&l);
        let content = num
            .coeffs()
            .iter()
            .chain(den.coeffs())
            .fold(BigInt::zero(), |g, c| g.gcd(c.numer()));
        let mut s = BigRational::from_integer(content).recip();
        if den.leading().unwrap().is_negative() {
            s = -s;
        }
        RatMap {
            num: num.scale(&s),
            den: den.scale(&s),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.num.deg0().max(self.den.deg0())
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The map as a polynomial, when the denominator is constant.
    pub fn as_polynomial(&self) -> Option<Poly> {
        if self.is_polynomial() {
            Some(self.num.scale(&self.den.coeff(0).recip()))
        } else {
            None
        }
    }

    /// The Wronskian `Q P' - P Q'`, whose roots are the finite critical points.
    pub fn wronskian(&self) -> Poly {
        &self.den * &self.num.derivative() - &self.num * &self.den.derivative()
    }

    pub fn eval(&self, x: &ProjPoint) -> ProjPoint {
        match x {
            ProjPoint::Finite(v) => {
                let d = self.den.eval(v);
                if d.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(self.num.eval(v) / d)
                }
            }
            ProjPoint::Infinity => {
                let (dn, dd) = (self.num.degree(), self.den.deg0());
                match dn {
                    None => ProjPoint::Finite(BigRational::zero()),
                    Some(dn) if dn > dd => ProjPoint::Infinity,
                    Some(dn) if dn == dd => ProjPoint::Finite(
                        self.num.leading().unwrap() / self.den.leading().unwrap(),
                    ),
                    Some(_) => ProjPoint::Finite(BigRational::zero()),
                }
            }
        }
    }

    /// `f^n(x)` by direct exact iteration.
    pub fn eval_iter(&self, x: &ProjPoint, n: usize) -> ProjPoint {
        let mut v = x.clone();
        for _ in 0..n {
            v = self.eval(&v);
        }
        v
    }

    /// `(P_k(x), Q_k(x))` for `k = 0..=n`, from the homogeneous recursion
    /// started at `(x, 1)`. Never builds the polynomial iterates.
    pub fn scalar_pairs(&self, x: &BigRational, n: usize) -> Vec<(BigRational, BigRational)> {
        self.scalar_pairs_capped(x, n, u64::MAX).expect("no cap")
    }

    /// As `scalar_pairs`, giving up once an entry exceeds `bit_cap` bits.
    pub fn scalar_pairs_capped(
        &self,
        x: &BigRational,
        n: usize,
        bit_cap: u64,
    ) -> Option<Vec<(BigRational, BigRational)>> {
        let d = self.degree();
        let bits = |r: &BigRational| r.numer().bits() + r.denom().bits();
        let mut out = Vec::with_capacity(n + 1);
        out.push((x.clone(), BigRational::one()));
        for k in 1..=n {
            let (px, qx) = &out[k - 1];
            let next = (
                self.num.homogeneous_eval(d, px, qx),
                self.den.homogeneous_eval(d, px, qx),
            );
            if bits(&next.0) > bit_cap || bits(&next.1) > bit_cap {
                return None;
            }
            out.push(next);
        }
        Some(out)
    }

    /// `f^n = P_n/Q_n` as a coprime pair of polynomials of degree at most `d^n`.
    pub fn iterate(&self, n: usize, degree_cap: usize) -> Result<IteratePair, ExactError> {
        if n == 0 {
            return Ok(IteratePair {
                level: 0,
                p: Poly::z(),
                q: Poly::one(),
            });
        }
        let d = self.degree();
        let total = checked_pow(d, n).filter(|&t| t <= degree_cap);
        let Some(total) = total else {
            return Err(ExactError::DegreeCap {
                degree: d,
                level: n,
                cap: degree_cap,
            });
        };
        let (mut p, mut q) = (self.num.clone(), self.den.clone());
        for _ in 1..n {
            let (np, nq) = compose_pair(&self.num, &self.den, d, &p, &q);
            p = np;
            q = nq;
        }
        // Coprimality of (P_1, Q_1) carries through homogeneous composition;
        // re-check explicitly where the gcd is cheap.
        if total <= 64 && !q.is_constant() {
            let g = p.gcd(&q);
            if g.deg0() > 0 {
                p = p.div_rem(&g).0;
                q = q.div_rem(&g).0;
            }
        }
        Ok(IteratePair { level: n, p, q })
    }

    /// `f^0, f^1, ...` up to level `n` or the last level of degree at most
    /// `degree_cap`, whichever comes first.
    pub fn iterates(&self, n: usize, degree_cap: usize) -> Vec<IteratePair> {
        let d = self.degree();
        let mut out = vec![IteratePair {
            level: 0,
            p: Poly::z(),
            q: Poly::one(),
        }];
        let mut total = 1usize;
        for m in 1..=n {
            total = match total.checked_mul(d) {
                Some(t) if t <= degree_cap => t,
                _ => break,
            };
            let prev = &out[m - 1];
            let (p, q) = compose_pair(&self.num, &self.den, d, &prev.p, &prev.q);
            out.push(IteratePair { level: m, p, q });
        }
        out
    }
}

fn checked_pow(d: usize, n: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..n {
        acc = acc.checked_mul(d)?;
    }
    Some(acc)
}

/// Compose the degree-`d` map `outer_num/outer_den` with `inner_num/inner_den`.
pub fn compose_pair(
    outer_num: &Poly,
    outer_den: &Poly,
    d: usize,
    inner_num: &Poly,
    inner_den: &Poly,
) -> (Poly, Poly) {
    (
        outer_num.homogeneous_compose(d, inner_num, inner_den),
        outer_den.homogeneous_compose(d, inner_num, inner_den),
    )
}

/// `outer(inner_num / inner_den)` with denominators cleared: returns `(A, B)`
/// where `B = inner_den^(deg outer)` and `A/B = outer(inner_num/inner_den)`.
pub fn compose(outer: &Poly, inner_num: &Poly, inner_den: &Poly) -> (Poly, Poly) {
    let d = outer.deg0();
    (
        outer.homogeneous_compose(d, inner_num, inner_den),
        inner_den.pow(d as u32),
    )
}

impl fmt::Display for RatMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one_poly() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatMap({self})")
    }
}

impl Poly {
    fn is_one_poly(&self) -> bool {
        self.coeffs().len() == 1 && self.coeffs()[0].is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn fb(b: i64) -> RatMap {
        RatMap::new(Poly::from_ints([1, -2 * b, 1]), Poly::from_ints([0, 2 * b - 2])).unwrap()
    }

    #[test]
    fn compose_examples() {
        let (a, b) = compose(&Poly::from_ints([0, 0, 1]), &Poly::z(), &Poly::one());
        assert_eq!((a, b), (Poly::from_ints([0, 0, 1]), Poly::one()));
        let f = Poly::from_ints([-2, 0, 1]);
        let (a, b) = compose(&f, &f, &Poly::one());
        assert_eq!(a, Poly::from_ints([2, 0, -4, 0, 1]));
        assert_eq!(b, Poly::one());
    }

    #[test]
    fn family_composition_matches_recursion() {
        for b in [-3i64, 0, 2, 5] {
            let f = fb(b);
            let it1 = f.iterate(1, 64).unwrap();
            let it2 = f.iterate(2, 64).unwrap();
            let c = BigRational::from_integer((2 * (b - 1)).into());
            assert_eq!(it2.q, (&it1.p * &it1.q).scale(&c));
            let bb = BigRational::from_integer((2 * b).into());
            let expect_p = &(&it1.p * &it1.p) - &(&it1.p * &it1.q).scale(&bb) + &it1.q * &it1.q;
            assert_eq!(it2.p, expect_p);
        }
    }

    #[test]
    fn iterate_examples() {
        let f = RatMap::polynomial(Poly::from_ints([-2, 0, 1]));
        let it = f.iterate(2, 4096).unwrap();
        assert_eq!(it.p, Poly::from_ints([2, 0, -4, 0, 1]));
        assert_eq!(it.q, Poly::one());
        let it1 = fb(2).iterate(1, 4096).unwrap();
        assert_eq!((it1.p, it1.q), (fb(2).num().clone(), fb(2).den().clone()));
        let it2 = fb(2).iterate(2, 4096).unwrap();
        assert_eq!(it2.p.eval(&q(-1)), q(88));
        assert_eq!(it2.q.eval(&q(-1)), q(-24));
    }

    #[test]
    fn degree_cap_is_enforced() {
        let f = RatMap::polynomial(Poly::from_ints([1, 0, 1]));
        assert!(matches!(f.iterate(13, 4096), Err(ExactError::DegreeCap { .. })));
        assert!(f.iterate(12, 4096).is_ok());
    }

    #[test]
    fn scalar_pairs_match_polynomial_iterates() {
        let f = fb(6);
        let pairs = f.scalar_pairs(&q(-1), 4);
        for (n, (pv, qv)) in pairs.iter().enumerate().skip(1) {
            let it = f.iterate(n, 4096).unwrap();
            assert_eq!(&it.p.eval(&q(-1)), pv);
            assert_eq!(&it.q.eval(&q(-1)), qv);
        }
    }

    #[test]
    fn incremental_iterates() {
        let f = fb(6);
        let its = f.iterates(10, 64);
        assert_eq!(its.len(), 7);
        for it in &its {
            let one = f.iterate(it.level, 64).unwrap();
            assert_eq!((&one.p, &one.q), (&it.p, &it.q));
        }
    }

    #[test]
    fn wronskian_examples() {
        let f = RatMap::new(Poly::from_ints([1, 0, 1]), Poly::z()).unwrap();
        assert_eq!(f.wronskian(), Poly::from_ints([-1, 0, 1]));
        let g = RatMap::polynomial(Poly::from_ints([1, -3, 0, 1]));
        assert_eq!(g.wronskian(), Poly::from_ints([-3, 0, 3]));
        for b in [-4i64, 0, 2, 7] {
            let c = 2 * b - 2;
            assert_eq!(fb(b).wronskian(), Poly::from_ints([-c, 0, c]));
        }
    }

    #[test]
    fn eval_at_infinity_and_poles() {
        let f = fb(2);
        assert_eq!(f.eval(&ProjPoint::Infinity), ProjPoint::Infinity);
        assert_eq!(f.eval(&ProjPoint::Finite(q(0))), ProjPoint::Infinity);
        assert_eq!(f.eval(&ProjPoint::Finite(q(1))), ProjPoint::Finite(q(-1)));
        let g = RatMap::new(Poly::from_ints([1]), Poly::from_ints([0, 0, 1])).unwrap();
        assert_eq!(g.eval(&ProjPoint::Infinity), ProjPoint::Finite(q(0)));
    }

    #[test]
    fn new_cancels_common_factors() {
        // (z^2 - 1)/(z - 1) = z + 1
        let f = RatMap::new(Poly::from_ints([-1, 0, 1]), Poly::from_ints([-1, 1])).unwrap();
        assert!(f.is_polynomial());
        assert_eq!(f.as_polynomial().unwrap(), Poly::from_ints([1, 1]));
    }

    #[test]
    fn normalization() {
        let f = RatMap::new(Poly::from_ints([1, 0, 1]), Poly::from_ints([0, -2])).unwrap();
        let n = f.normalized();
        assert_eq!(n.num(), &Poly::from_ints([-1, 0, -1]));
        assert_eq!(n.den(), &Poly::from_ints([0, 2]));
        let g = RatMap::new(Poly::from_ints([2, 0, 4]), Poly::from_ints([2])).unwrap();
        assert_eq!(g.normalized().num(), &Poly::from_ints([1, 0, 2]));
        assert_eq!(g.normalized().den(), &Poly::one());
    }
}
