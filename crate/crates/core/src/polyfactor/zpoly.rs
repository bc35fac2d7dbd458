//! Integer polynomials (`Vec<BigInt>`, low to high) and their arithmetic
//! modulo `m`, plus quadratic Hensel lifting of factorizations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::fp::FpPoly;
use crate::number_theory::primes::big_mod_u64;

pub type ZPoly = Vec<BigInt>;

pub fn trim(mut a: ZPoly) -> ZPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

pub fn deg(a: &[BigInt]) -> usize {
    a.len().saturating_sub(1)
}

pub fn lead(a: &[BigInt]) -> BigInt {
    a.last().cloned().unwrap_or_default()
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub fn add(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default()
            })
            .collect(),
    )
}

pub fn sub(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default()
            })
            .collect(),
    )
}

pub fn scale(a: &[BigInt], s: &BigInt) -> ZPoly {
    trim(a.iter().map(|c| c * s).collect())
}

/// Coefficients reduced into `0..m`.
pub fn reduce(a: &[BigInt], m: &BigInt) -> ZPoly {
    trim(a.iter().map(|c| c.mod_floor(m)).collect())
}

/// Coefficients reduced into `(-m/2, m/2]`.
pub fn symmetric(a: &[BigInt], m: &BigInt) -> ZPoly {
    let half = m >> 1u32;
    trim(
        a.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

pub fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Divide out the content and make the leading coefficient positive.
pub fn primitive(a: &[BigInt]) -> ZPoly {
    let mut g = content(a);
    if g.is_zero() {
        return vec![];
    }
    if lead(a).is_negative() {
        g = -g;
    }
    a.iter().map(|c| c / &g).collect()
}

pub fn mul_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZPoly {
    reduce(&mul(a, b), m)
}

/// Division by a polynomial whose leading coefficient is 1 modulo `m`.
pub fn div_rem_monic_mod(a: &[BigInt], h: &[BigInt], m: &BigInt) -> (ZPoly, ZPoly) {
    let mut r = reduce(a, m);
    let dh = deg(h);
    if r.len() < h.len() {
        return (vec![], r);
    }
    let mut q = vec![BigInt::zero(); r.len() - dh];
    for k in (0..q.len()).rev() {
        let c = r[k + dh].mod_floor(m);
        if c.is_zero() {
            continue;
        }
        for (j, hj) in h.iter().enumerate() {
            r[k + j] = (&r[k + j] - &c * hj).mod_floor(m);
        }
        q[k] = c;
    }
    r.truncate(dh);
    (trim(q), reduce(&r, m))
}

/// Exact division over Z, or `None` if `b` does not divide `a`.
pub fn exact_div(a: &[BigInt], b: &[BigInt]) -> Option<ZPoly> {
    if b.is_empty() {
        return None;
    }
    if a.is_empty() {
        return Some(vec![]);
    }
    if a.len() < b.len() {
        return None;
    }
    let db = deg(b);
    let lb = lead(b);
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for k in (0..q.len()).rev() {
        let (c, rem) = r[k + db].div_rem(&lb);
        if !rem.is_zero() {
            return None;
        }
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &c * bj;
        }
        q[k] = c;
    }
    if r[..db].iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some(trim(q))
}

pub fn to_fp(a: &[BigInt], p: u64) -> FpPoly {
    FpPoly::new(p, a.iter().map(|c| big_mod_u64(c, p)).collect())
}

pub fn from_fp(a: &FpPoly) -> ZPoly {
    a.c.iter().map(|&c| BigInt::from(c)).collect()
}

fn inv_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    assert!(e.gcd.is_one(), "leading coefficient not invertible");
    e.x.mod_floor(m)
}

/// One quadratic Hensel step: from `f = g h`, `s g + t h = 1` modulo `m`
/// to the same identities modulo `m2` (with `m2 | m^2`), `h` monic.
#[allow(clippy::too_many_arguments)]
fn hensel_step(
    f: &[BigInt],
    g: &[BigInt],
    h: &[BigInt],
    s: &[BigInt],
    t: &[BigInt],
    m2: &BigInt,
) -> (ZPoly, ZPoly, ZPoly, ZPoly) {
    let e = reduce(&sub(f, &mul(g, h)), m2);
    let (q, r) = div_rem_monic_mod(&mul(s, &e), h, m2);
    let g2 = reduce(&add(&add(g, &mul(t, &e)), &mul(&q, g)), m2);
    let h2 = reduce(&add(h, &r), m2);
    let b = reduce(&sub(&add(&mul(s, &g2), &mul(t, &h2)), &[BigInt::one()]), m2);
    let (c, d) = div_rem_monic_mod(&mul(s, &b), &h2, m2);
    let s2 = reduce(&sub(s, &d), m2);
    let t2 = reduce(&sub(&sub(t, &mul(t, &b)), &mul(&c, &g2)), m2);
    (g2, h2, s2, t2)
}

/// Lift `f = lc(f) * prod factors (mod p)` with monic, pairwise coprime
/// factors to monic factors modulo `p^k`.
pub fn hensel_lift(f: &[BigInt], factors: &[FpPoly], p: u64, k: u32) -> Vec<ZPoly> {
    let pk = BigInt::from(p).pow(k);
    lift_rec(f, factors, p, &pk)
}

fn lift_rec(f: &[BigInt], factors: &[FpPoly], p: u64, pk: &BigInt) -> Vec<ZPoly> {
    if factors.len() == 1 {
        let inv = inv_mod(&lead(f), pk);
        return vec![reduce(&scale(f, &inv), pk)];
    }
    let (left, right) = factors.split_at(factors.len() / 2);
    let lc_p = big_mod_u64(&lead(f), p);
    let g0 = left
        .iter()
        .fold(FpPoly::new(p, vec![lc_p]), |acc, a| acc.mul(a));
    let h0 = right.iter().fold(FpPoly::one(p), |acc, a| acc.mul(a));
    let (one, s0, t0) = g0.xgcd(&h0);
    debug_assert!(one.is_one());
    let (mut g, mut h, mut s, mut t) = (from_fp(&g0), from_fp(&h0), from_fp(&s0), from_fp(&t0));
    let pb = BigInt::from(p);
    let mut m = pb.clone();
    while &m < pk {
        let m2 = (&m * &m).min(pk.clone());
        let next = hensel_step(f, &g, &h, &s, &t, &m2);
        (g, h, s, t) = next;
        m = m2;
    }
    let mut out = lift_rec(&g, left, p, pk);
    out.extend(lift_rec(&h, right, p, pk));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(c: &[i64]) -> ZPoly {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn exact_division() {
        let a = mul(&z(&[1, 1]), &z(&[-3, 0, 2]));
        assert_eq!(exact_div(&a, &z(&[1, 1])), Some(z(&[-3, 0, 2])));
        assert_eq!(exact_div(&a, &z(&[2, 1])), None);
        assert_eq!(primitive(&z(&[-4, 0, -6])), z(&[2, 0, 3]));
    }

    #[test]
    fn lift_x4_plus_1_mod_17() {
        let f = z(&[1, 0, 0, 0, 1]);
        let fp = to_fp(&f, 17);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(7);
        let parts = super::super::fp::factor_squarefree(&fp, &mut rng);
        assert_eq!(parts.len(), 4);
        let lifted = hensel_lift(&f, &parts, 17, 6);
        let m = BigInt::from(17).pow(6);
        let prod = lifted.iter().fold(z(&[1]), |acc, g| mul_mod(&acc, g, &m));
        assert_eq!(prod, reduce(&f, &m));
    }

    #[test]
    fn lift_with_leading_coefficient() {
        // 6x^2 - x - 2 = (2x + 1)(3x - 2)
        let f = z(&[-2, -1, 6]);
        let fp = to_fp(&f, 5).monic();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let parts = super::super::fp::factor_squarefree(&fp, &mut rng);
        let lifted = hensel_lift(&f, &parts, 5, 6);
        let m = BigInt::from(5).pow(6);
        let prod = lifted.iter().fold(z(&[6]), |acc, g| mul_mod(&acc, g, &m));
        assert_eq!(prod, reduce(&f, &m));
    }
}
