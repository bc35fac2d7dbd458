//! Dense polynomials over F_p for word-sized odd primes `p < 2^31`.

use rand::Rng;

use crate::number_theory::primes::inv_mod_u64;

/// Coefficients low to high, trimmed, each in `0..p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    pub p: u64,
    pub c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> FpPoly {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn zero(p: u64) -> FpPoly {
        FpPoly { p, c: vec![] }
    }

    pub fn one(p: u64) -> FpPoly {
        FpPoly { p, c: vec![1] }
    }

    pub fn x(p: u64) -> FpPoly {
        FpPoly { p, c: vec![0, 1] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lead(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    fn trim(mut self) -> FpPoly {
        while self.c.last() == Some(&0) {
            self.c.pop();
        }
        self
    }

    pub fn add(&self, o: &FpPoly) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| {
                let a = self.c.get(i).copied().unwrap_or(0);
                let b = o.c.get(i).copied().unwrap_or(0);
                (a + b) % self.p
            })
            .collect();
        FpPoly { p: self.p, c }.trim()
    }

    pub fn sub(&self, o: &FpPoly) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        let p = self.p;
        let c = (0..n)
            .map(|i| {
                let a = self.c.get(i).copied().unwrap_or(0);
                let b = o.c.get(i).copied().unwrap_or(0);
                (a + p - b) % p
            })
            .collect();
        FpPoly { p, c }.trim()
    }

    pub fn mul(&self, o: &FpPoly) -> FpPoly {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p;
        let mut acc = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a * b) % p;
            }
        }
        FpPoly { p, c: acc }.trim()
    }

    pub fn scale(&self, s: u64) -> FpPoly {
        let p = self.p;
        FpPoly {
            p,
            c: self.c.iter().map(|&a| a * (s % p) % p).collect(),
        }
        .trim()
    }

    pub fn monic(&self) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod_u64(self.lead(), self.p).unwrap();
        self.scale(inv)
    }

    pub fn div_rem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        if self.c.len() < d.c.len() {
            return (FpPoly::zero(p), self.clone());
        }
        let inv = inv_mod_u64(d.lead(), p).unwrap();
        let mut r = self.c.clone();
        let dd = d.c.len() - 1;
        let mut q = vec![0u64; r.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = r[k + dd] * inv % p;
            q[k] = coef;
            if coef == 0 {
                continue;
            }
            for (j, &b) in d.c.iter().enumerate() {
                r[k + j] = (r[k + j] + p - coef * b % p) % p;
            }
        }
        r.truncate(dd);
        (FpPoly { p, c: q }.trim(), FpPoly { p, c: r }.trim())
    }

    pub fn rem(&self, d: &FpPoly) -> FpPoly {
        self.div_rem(d).1
    }

    pub fn mul_mod(&self, o: &FpPoly, m: &FpPoly) -> FpPoly {
        self.mul(o).rem(m)
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &FpPoly) -> FpPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*o = g`, `g` monic.
    pub fn xgcd(&self, o: &FpPoly) -> (FpPoly, FpPoly, FpPoly) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (FpPoly::one(p), FpPoly::zero(p));
        let (mut t0, mut t1) = (FpPoly::zero(p), FpPoly::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        let inv = inv_mod_u64(r0.lead(), p).unwrap();
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    pub fn derivative(&self) -> FpPoly {
        let p = self.p;
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| (i as u64 % p) * a % p)
            .collect();
        FpPoly { p, c }.trim()
    }

    /// `self^e mod m` for a little-endian multi-word exponent.
    pub fn pow_mod(&self, e: &[u64], m: &FpPoly) -> FpPoly {
        let mut acc = FpPoly::one(self.p).rem(m);
        let base = self.rem(m);
        for word in e.iter().rev() {
            for bit in (0..64).rev() {
                acc = acc.mul_mod(&acc, m);
                if (word >> bit) & 1 == 1 {
                    acc = acc.mul_mod(&base, m);
                }
            }
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        let d = self.derivative();
        !d.is_zero() && self.gcd(&d).deg() == 0
    }
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// `(k, product of all irreducible factors of degree k)`.
pub fn distinct_degree(f: &FpPoly) -> Vec<(usize, FpPoly)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = FpPoly::x(p);
    let xp = x.pow_mod(&[p], f);
    let mut h = xp; // x^(p^k) mod f
    let mut k = 1;
    while rest.deg() >= 2 * k {
        let g = rest.gcd(&h.sub(&x).rem(&rest));
        if g.deg() > 0 {
            rest = rest.div_rem(&g).0;
            out.push((k, g));
        }
        k += 1;
        h = h.pow_mod(&[p], f);
    }
    if rest.deg() > 0 {
        out.push((rest.deg(), rest.monic()));
    }
    out
}

/// Degrees of the irreducible factors of a monic squarefree polynomial.
pub fn factor_degrees(f: &FpPoly) -> Vec<usize> {
    let mut out = Vec::new();
    for (k, g) in distinct_degree(f) {
        out.extend(std::iter::repeat(k).take(g.deg() / k));
    }
    out.sort_unstable();
    out
}

/// Split a product of distinct monic irreducibles of common degree `k`
/// (Cantor-Zassenhaus, odd `p`).
pub fn equal_degree<R: Rng>(f: &FpPoly, k: usize, rng: &mut R) -> Vec<FpPoly> {
    if f.deg() == k {
        return vec![f.clone()];
    }
    let p = f.p;
    let exp = half_pow_minus_one(p, k);
    loop {
        let a = FpPoly::new(p, (0..f.deg()).map(|_| rng.gen_range(0..p)).collect());
        if a.deg() == 0 {
            continue;
        }
        let g = f.gcd(&a);
        let split = if g.deg() > 0 {
            g
        } else {
            let b = a.pow_mod(&exp, f).sub(&FpPoly::one(p));
            f.gcd(&b)
        };
        if split.deg() > 0 && split.deg() < f.deg() {
            let other = f.div_rem(&split).0.monic();
            let mut out = equal_degree(&split, k, rng);
            out.extend(equal_degree(&other, k, rng));
            return out;
        }
    }
}

/// `(p^k - 1) / 2` as little-endian u64 words.
fn half_pow_minus_one(p: u64, k: usize) -> Vec<u64> {
    let mut n = num_bigint::BigUint::from(p).pow(k as u32);
    n -= 1u32;
    n >>= 1;
    n.to_u64_digits()
}

/// Complete factorization of a monic squarefree polynomial into monic
/// irreducibles, sorted by degree then coefficients.
pub fn factor_squarefree<R: Rng>(f: &FpPoly, rng: &mut R) -> Vec<FpPoly> {
    let mut out = Vec::new();
    for (k, g) in distinct_degree(f) {
        out.extend(equal_degree(&g, k, rng));
    }
    out.sort_by(|a, b| (a.deg(), &a.c).cmp(&(b.deg(), &b.c)));
    out
}

pub fn eval(f: &FpPoly, x: u64) -> u64 {
    f.c.iter().rev().fold(0, |acc, &a| (acc * x + a) % f.p)
}
