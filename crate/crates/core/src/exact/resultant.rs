//! Resultants and discriminants over Q.
//!
//! Sign convention: `Res(p, q) = l(p)^deg(q) * prod q(r)` over the roots `r`
//! of `p`, counted with multiplicity. The discriminant is
//! `(-1)^(D(D-1)/2) Res(p, p') / l(p)` with `D = deg p`.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::Poly;
use super::ExactError;

/// Resultant via the Euclidean remainder sequence over Q.
pub fn resultant(p: &Poly, q: &Poly) -> Result<BigRational, ExactError> {
    if p.is_zero() || q.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let mut a = p.clone();
    let mut b = q.clone();
    let mut acc = BigRational::one();
    loop {
        let da = a.deg0();
        let db = b.deg0();
        if db == 0 {
            return Ok(acc * pow(&b.coeff(0), da));
        }
        if da == 0 {
            return Ok(acc * pow(&a.coeff(0), db));
        }
        // Res(a, b) = (-1)^(da db) Res(b, a) = (-1)^(da db) l(b)^(da - dr) Res(b, r)
        let (_, r) = a.div_rem(&b);
        if r.is_zero() {
            return Ok(BigRational::zero());
        }
        let dr = r.deg0();
        if da * db % 2 == 1 {
            acc = -acc;
        }
        acc *= pow(b.leading().unwrap(), da - dr);
        a = b;
        b = r;
    }
}

pub fn discriminant(p: &Poly) -> Result<BigRational, ExactError> {
    let d = p.deg0();
    if d == 0 {
        return Err(ExactError::DegreeZero);
    }
    let r = resultant(p, &p.derivative())?;
    let s = r / p.leading().unwrap();
    Ok(if (d * (d - 1) / 2) % 2 == 1 { -s } else { s })
}

fn pow(x: &BigRational, e: usize) -> BigRational {
    num_traits::pow(x.clone(), e)
}
