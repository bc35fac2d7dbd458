//! Word-size arithmetic modulo a prime for orbit scans, and the exact
//! cofactor stripping shared by the certificate searches.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exact::Poly;
use crate::number_theory::primes::{big_mod_u64, inv_mod_u64, mul_mod_u64};

/// `x mod p`, or `None` when `p` divides the denominator.
pub fn rat_mod(x: &BigRational, p: u64) -> Option<u64> {
    let d = big_mod_u64(x.denom(), p);
    let inv = inv_mod_u64(d, p)?;
    Some(mul_mod_u64(big_mod_u64(x.numer(), p), inv, p))
}

/// A polynomial reduced modulo `p`; `None` if a coefficient is not p-integral.
#[derive(Debug, Clone)]
pub struct PolyModP {
    pub p: u64,
    pub c: Vec<u64>,
}

impl PolyModP {
    pub fn new(f: &Poly, p: u64) -> Option<PolyModP> {
        let c = f.coeffs().iter().map(|a| rat_mod(a, p)).collect::<Option<Vec<u64>>>()?;
        Some(PolyModP { p, c })
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c
            .iter()
            .rev()
            .fold(0, |acc, &a| (mul_mod_u64(acc, x, self.p) + a) % self.p)
    }

    /// `sum c_i x^i y^(d-i)`.
    pub fn hom_eval(&self, d: usize, x: u64, y: u64) -> u64 {
        let p = self.p;
        let mut xp = vec![1u64; d + 1];
        let mut yp = vec![1u64; d + 1];
        for i in 1..=d {
            xp[i] = mul_mod_u64(xp[i - 1], x, p);
            yp[i] = mul_mod_u64(yp[i - 1], y, p);
        }
        let mut acc = 0u64;
        for (i, &a) in self.c.iter().enumerate() {
            acc = (acc + mul_mod_u64(a, mul_mod_u64(xp[i], yp[d - i], p), p)) % p;
        }
        acc
    }
}

/// Remove from `x` every prime factor it shares with any of `forbidden`.
pub fn strip(x: &BigInt, forbidden: &[BigInt]) -> BigInt {
    let mut out = x.abs();
    if out.is_zero() {
        return out;
    }
    for f in forbidden {
        if f.is_zero() {
            continue;
        }
        loop {
            let g = out.gcd(f);
            if g.is_one() {
                break;
            }
            while (&out % &g).is_zero() {
                out /= &g;
            }
        }
    }
    out
}

/// Numerators and denominators of `values`, for use as a forbidden list.
pub fn parts(values: &[BigRational]) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(2 * values.len());
    for v in values {
        out.push(v.numer().clone());
        out.push(v.denom().clone());
    }
    out
}

/// The part of `|num(x)| * den(x)` coprime to every forbidden integer.
pub fn odd_cofactor(x: &BigRational, forbidden: &[BigInt]) -> BigInt {
    strip(x.numer(), forbidden) * strip(x.denom(), forbidden)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn reduction() {
        assert_eq!(rat_mod(&q(3, 4), 7), Some(6));
        assert_eq!(rat_mod(&q(1, 7), 7), None);
        let f = PolyModP::new(&Poly::from_ints([1, 0, 1]), 5).unwrap();
        assert_eq!(f.eval(2), 0);
        assert_eq!(f.hom_eval(2, 2, 1), 0);
        assert_eq!(f.hom_eval(2, 1, 2), 0);
    }

    #[test]
    fn stripping() {
        let x = BigInt::from(2 * 2 * 3 * 11 * 11 * 13);
        assert_eq!(strip(&x, &[BigInt::from(6)]), BigInt::from(11 * 11 * 13));
        assert_eq!(strip(&-x.clone(), &[BigInt::from(26), BigInt::from(0)]), BigInt::from(3 * 121));
        assert_eq!(odd_cofactor(&q(-45, 14), &[BigInt::from(3)]), BigInt::from(70));
    }
}
