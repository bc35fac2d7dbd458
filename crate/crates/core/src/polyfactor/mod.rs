//! Factorization of polynomials over Q.
//!
//! Squarefree parts are handled by the classical Zassenhaus pipeline:
//! degree patterns modulo several primes bound the possible factor degrees
//! (and often prove irreducibility outright), one prime with few modular
//! factors is lifted by Hensel's lemma past the Mignotte bound, and subsets
//! of lifted factors are recombined by trial division.

pub mod fp;
pub mod zpoly;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exact::Poly;
use crate::number_theory::primes::primes_up_to;
use fp::{factor_degrees, factor_squarefree, FpPoly};
use zpoly::ZPoly;

pub const DEFAULT_FACTOR_DEGREE_CAP: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorConfig {
    pub degree_cap: usize,
    /// Number of good primes whose degree patterns are intersected.
    pub pattern_primes: usize,
    /// Upper bound on recombination trial divisions.
    pub max_subsets: u64,
    pub seed: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            degree_cap: DEFAULT_FACTOR_DEGREE_CAP,
            pattern_primes: 5,
            max_subsets: 1 << 22,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("cannot factor the zero polynomial")]
    Zero,
    #[error("degree {degree} exceeds the factorization cap {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("factor recombination exceeded its budget")]
    Budget,
}

/// `f = unit * prod poly^multiplicity`, each `poly` a primitive integer
/// polynomial with positive leading coefficient, irreducible over Q.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    #[serde(serialize_with = "ser_rational")]
    pub unit: BigRational,
    pub factors: Vec<Factor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factor {
    pub poly: Poly,
    pub multiplicity: usize,
}

fn ser_rational<S: serde::Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl Factorization {
    /// Number of irreducible factors counted with multiplicity.
    pub fn count(&self) -> usize {
        self.factors.iter().map(|f| f.multiplicity).sum()
    }

    /// Degrees of the irreducible factors with multiplicity, ascending.
    pub fn degrees(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .factors
            .iter()
            .flat_map(|f| std::iter::repeat(f.poly.deg0()).take(f.multiplicity))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn expand(&self) -> Poly {
        let mut acc = Poly::constant(self.unit.clone());
        for f in &self.factors {
            acc = &acc * &f.poly.pow(f.multiplicity as u32);
        }
        acc
    }
}

pub fn factor_over_q(f: &Poly, cfg: &FactorConfig) -> Result<Factorization, FactorError> {
    if f.is_zero() {
        return Err(FactorError::Zero);
    }
    let d = f.deg0();
    if d > cfg.degree_cap {
        return Err(FactorError::DegreeCap {
            degree: d,
            cap: cfg.degree_cap,
        });
    }
    let (scale, ints) = f.primitive_integer();
    let mut factors = Vec::new();
    // Powers of z are common (0 is often a periodic point) and cheap to strip.
    let zeros = ints.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        factors.push(Factor {
            poly: Poly::z(),
            multiplicity: zeros,
        });
    }
    let rest: ZPoly = ints[zeros..].to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut budget = cfg.max_subsets;
    for (part, mult) in squarefree_decomposition(&rest) {
        for g in factor_squarefree_z(&part, cfg, &mut rng, &mut budget)? {
            factors.push(Factor {
                poly: Poly::from_bigints(&g),
                multiplicity: mult,
            });
        }
    }
    factors.sort_by(|a, b| {
        (a.poly.deg0(), a.poly.coeffs()).cmp(&(b.poly.deg0(), b.poly.coeffs()))
    });
    // The primitive integer factors multiply to `ints`; the unit restores f.
    Ok(Factorization {
        unit: scale,
        factors,
    })
}

/// Whether `f` (degree at least 1) is irreducible over Q.
pub fn is_irreducible(f: &Poly, cfg: &FactorConfig) -> Result<bool, FactorError> {
    if f.deg0() == 0 {
        return Ok(false);
    }
    if f.deg0() == 1 {
        return Ok(true);
    }
    let (_, ints) = f.primitive_integer();
    if ints[0].is_zero() {
        return Ok(false);
    }
    if let Some(verdict) = patterns_decide(&ints, cfg) {
        return Ok(verdict);
    }
    Ok(factor_over_q(f, cfg)?.count() == 1)
}

/// Irreducibility from degree patterns alone, when they suffice.
fn patterns_decide(f: &[BigInt], cfg: &FactorConfig) -> Option<bool> {
    let d = zpoly::deg(f);
    let good = good_primes(f, cfg.pattern_primes);
    if good.is_empty() {
        return None;
    }
    let allowed = allowed_degrees(d, good.iter().map(|(_, _, degs)| degs.as_slice()));
    if allowed.iter().all(|&k| k == 0 || k == d) {
        Some(true)
    } else {
        None
    }
}

/// Yun's algorithm over Q on an integer polynomial with nonzero constant
/// term. Returns primitive squarefree parts with their multiplicities.
fn squarefree_decomposition(f: &[BigInt]) -> Vec<(ZPoly, usize)> {
    if zpoly::deg(f) == 0 {
        return vec![];
    }
    if !good_primes(f, 1).is_empty() {
        return vec![(zpoly::primitive(f), 1)];
    }
    let fq = Poly::from_bigints(f);
    let df = fq.derivative();
    let a0 = fq.gcd(&df);
    let mut b = fq.div_rem(&a0).0;
    let mut c = df.div_rem(&a0).0;
    let mut dpoly = &c - &b.derivative();
    let mut out = Vec::new();
    let mut i = 1;
    while b.deg0() > 0 {
        let a = b.gcd(&dpoly);
        let nb = b.div_rem(&a).0;
        c = dpoly.div_rem(&a).0;
        dpoly = &c - &nb.derivative();
        if a.deg0() > 0 {
            out.push((a.primitive_integer().1, i));
        }
        b = nb;
        i += 1;
    }
    out
}

/// Primes `p` not dividing the leading coefficient for which `f mod p` is
/// squarefree, with the monic reduction and its factor degrees.
fn good_primes(f: &[BigInt], want: usize) -> Vec<(u64, FpPoly, Vec<usize>)> {
    let d = zpoly::deg(f);
    let mut out = Vec::new();
    // Past d^2 small primes the discriminant would have to be enormous.
    for &p in primes_up_to(20_000).iter().skip(1).take(40 + 2 * d) {
        let fp = zpoly::to_fp(f, p);
        if fp.deg() != d || !fp.is_squarefree() {
            continue;
        }
        let m = fp.monic();
        let degs = factor_degrees(&m);
        out.push((p, m, degs));
        if out.len() >= want {
            break;
        }
    }
    out
}

/// Degrees achievable as sums of sub-multisets of every pattern.
fn allowed_degrees<'a, I: Iterator<Item = &'a [usize]>>(d: usize, patterns: I) -> BTreeSet<usize> {
    let mut allowed: BTreeSet<usize> = (0..=d).collect();
    for pat in patterns {
        let mut reach = vec![false; d + 1];
        reach[0] = true;
        for &k in pat {
            for s in (k..=d).rev() {
                if reach[s - k] {
                    reach[s] = true;
                }
            }
        }
        allowed.retain(|&s| reach[s]);
    }
    allowed
}

fn mignotte_modulus_exponent(f: &[BigInt], p: u64) -> u32 {
    let d = zpoly::deg(f) as u32;
    let max = f.iter().map(|c| c.abs()).max().unwrap();
    let bound: BigInt = BigInt::from(2u32) * zpoly::lead(f).abs() * (BigInt::one() << d)
        * BigInt::from(d + 1)
        * max;
    let pb = BigInt::from(p);
    let mut k = 1;
    let mut pk = pb.clone();
    while pk <= bound {
        pk *= &pb;
        k += 1;
    }
    k
}

fn factor_squarefree_z(
    f: &[BigInt],
    cfg: &FactorConfig,
    rng: &mut ChaCha8Rng,
    budget: &mut u64,
) -> Result<Vec<ZPoly>, FactorError> {
    let d = zpoly::deg(f);
    if d == 1 {
        return Ok(vec![zpoly::primitive(f)]);
    }
    let good = good_primes(f, cfg.pattern_primes);
    let allowed = allowed_degrees(d, good.iter().map(|(_, _, degs)| degs.as_slice()));
    if allowed.iter().all(|&k| k == 0 || k == d) {
        return Ok(vec![zpoly::primitive(f)]);
    }
    let (p, fp, _) = good
        .into_iter()
        .min_by_key(|(_, _, degs)| degs.len())
        .expect("a good prime exists for a squarefree polynomial");
    let modular = factor_squarefree(&fp, rng);
    let k = mignotte_modulus_exponent(f, p);
    let lifted = zpoly::hensel_lift(f, &modular, p, k);
    let pk = BigInt::from(p).pow(k);
    recombine(f, lifted, &pk, &allowed, budget)
}

fn recombine(
    f: &[BigInt],
    mut pool: Vec<ZPoly>,
    pk: &BigInt,
    allowed: &BTreeSet<usize>,
    budget: &mut u64,
) -> Result<Vec<ZPoly>, FactorError> {
    let mut cur = zpoly::primitive(f);
    let mut found = Vec::new();
    let mut size = 1;
    'outer: while 2 * size <= pool.len() {
        let n = pool.len();
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let dsum: usize = idx.iter().map(|&i| zpoly::deg(&pool[i])).sum();
            if allowed.contains(&dsum) {
                if *budget == 0 {
                    return Err(FactorError::Budget);
                }
                *budget -= 1;
                let lc = zpoly::lead(&cur);
                let prod = idx
                    .iter()
                    .fold(vec![lc.clone()], |acc, &i| zpoly::mul_mod(&acc, &pool[i], pk));
                let cand = zpoly::symmetric(&prod, pk);
                let constant_ok = cur[0].is_zero()
                    || (!cand[0].is_zero() && (&lc * &cur[0]) % &cand[0] == BigInt::zero());
                if constant_ok {
                    let g = zpoly::primitive(&cand);
                    if let Some(q) = zpoly::exact_div(&cur, &g) {
                        found.push(g);
                        cur = zpoly::primitive(&q);
                        for &i in idx.iter().rev() {
                            pool.remove(i);
                        }
                        continue 'outer;
                    }
                }
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
        size += 1;
    }
    found.push(cur);
    Ok(found)
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
