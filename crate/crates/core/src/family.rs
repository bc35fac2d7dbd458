//! The family `f_b(z) = (z^2 - 2bz + 1) / ((2b - 2) z)` for integer `b != 1`.
//!
//! The critical points are `1` and `-1`, with `f_b(1) = -1` and `f_b(inf) = inf`.
//! Writing `f_b^n = P_n / Q_n` with
//!
//! ```text
//! P_n = P_(n-1)^2 - 2b P_(n-1) Q_(n-1) + Q_(n-1)^2,   Q_n = 2(b-1) P_(n-1) Q_(n-1),
//! ```
//!
//! every level-`n` quantity the maximality criterion needs is a function of
//! the integers `P_n(-1)` and `Q_n(-1)`. For even `b` both have 2-adic
//! valuation `2^n - 1`, and their odd parts `u_n`, `w_n` satisfy
//! `2 u_n = u_(n-1)^2 - 2b u_(n-1) w_(n-1) + w_(n-1)^2` and
//! `w_n = (b-1) u_(n-1) w_(n-1)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::certificates::exact_route::pairs;
use crate::certificates::ratmap::{certify_quadratic_ratmap, ratmap_forbidden_constants};
use crate::certificates::{
    detect_obstructions, verdict, AnalysisReport, CertConfig, CertError, CertMode, Certificate, Conclusion,
    Condition, Conditionality, LevelReport, LevelStatus, MapKind, Verdict,
};
use crate::exact::{Poly, RatMap};
use crate::number_theory::{is_pm_square, is_square, split_two};

/// Largest level `fb_sequences` computes; `P_n(-1)` has about `2^n log2|2b|` bits.
pub const SEQUENCE_LEVEL_CAP: usize = 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("b = 1 collapses the map to a constant")]
    BIsOne,
    #[error("level {0} exceeds the sequence cap {SEQUENCE_LEVEL_CAP}")]
    CapExceeded(usize),
    #[error("P_{0}(-1) = 0")]
    ZeroValue(usize),
    #[error(transparent)]
    Cert(#[from] CertError),
}

/// Which case of the index-one theorem, if any, covers `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyClass {
    /// `b = 2 mod 4` and `b > 0`.
    TwoModFourPositive,
    /// `b = 4 mod 8`.
    FourModEight,
    Other,
}

impl FamilyClass {
    pub fn of(b: i64) -> FamilyClass {
        if b > 0 && b.rem_euclid(4) == 2 {
            FamilyClass::TwoModFourPositive
        } else if b.rem_euclid(8) == 4 {
            FamilyClass::FourModEight
        } else {
            FamilyClass::Other
        }
    }

    pub fn is_proven(self) -> bool {
        self != FamilyClass::Other
    }
}

/// `f_b` with numerator `z^2 - 2bz + 1` and denominator `(2b - 2) z` exactly.
pub fn fb_map(b: i64) -> Result<RatMap, FamilyError> {
    if b == 1 {
        return Err(FamilyError::BIsOne);
    }
    let num = Poly::from_ints([1, -2 * b, 1]);
    let den = Poly::from_ints([0, 2 * b - 2]);
    RatMap::new(num, den).map_err(|_| FamilyError::BIsOne)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyLevel {
    pub n: usize,
    #[serde(serialize_with = "crate::serde_util::bigint")]
    pub p_at_minus1: BigInt,
    #[serde(serialize_with = "crate::serde_util::bigint")]
    pub q_at_minus1: BigInt,
    pub v2_p: u64,
    pub v2_q: u64,
    /// Odd part of `P_n(-1)`, with its sign.
    #[serde(serialize_with = "crate::serde_util::bigint")]
    pub u: BigInt,
    /// Odd part of `Q_n(-1)`, with its sign.
    #[serde(serialize_with = "crate::serde_util::bigint")]
    pub w: BigInt,
    pub u_mod8: u8,
    pub w_mod8: u8,
    pub u_is_pm_square: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyPoint {
    pub b: i64,
    pub levels: Vec<FamilyLevel>,
}

impl FamilyPoint {
    pub fn level(&self, n: usize) -> &FamilyLevel {
        &self.levels[n - 1]
    }
}

fn mod8(x: &BigInt) -> u8 {
    x.mod_floor(&BigInt::from(8)).try_into().unwrap_or(0)
}

fn level(n: usize, p: BigInt, q: BigInt, v2_p: u64, u: BigInt, v2_q: u64, w: BigInt) -> FamilyLevel {
    FamilyLevel {
        n,
        u_mod8: mod8(&u),
        w_mod8: mod8(&w),
        u_is_pm_square: is_pm_square(&u),
        p_at_minus1: p,
        q_at_minus1: q,
        v2_p,
        v2_q,
        u,
        w,
    }
}

/// `P_n(-1)`, `Q_n(-1)` and their 2-adic splits for `n = 1..=n_max`.
pub fn fb_sequences(b: i64, n_max: usize) -> Result<FamilyPoint, FamilyError> {
    if b == 1 {
        return Err(FamilyError::BIsOne);
    }
    if n_max > SEQUENCE_LEVEL_CAP {
        return Err(FamilyError::CapExceeded(n_max));
    }
    if b == -1 && n_max >= 1 {
        return Err(FamilyError::ZeroValue(1));
    }
    let bb = BigInt::from(b);
    let two_b = BigInt::from(2 * b);
    let mut levels = Vec::with_capacity(n_max);
    if b % 2 == 0 {
        let (mut u, mut w) = (BigInt::from(1 + b), BigInt::from(1 - b));
        for n in 1..=n_max {
            if n > 1 {
                let twice = &u * &u - &two_b * &u * &w + &w * &w;
                let next_w = (&bb - 1) * &u * &w;
                u = twice / 2;
                w = next_w;
            }
            let e = (1u64 << n) - 1;
            levels.push(level(n, &u << e, &w << e, e, u.clone(), e, w.clone()));
        }
    } else {
        let (mut p, mut q) = (BigInt::from(2 + 2 * b), BigInt::from(2 - 2 * b));
        for n in 1..=n_max {
            if n > 1 {
                let next_p = &p * &p - &two_b * &p * &q + &q * &q;
                let next_q = BigInt::from(2 * (b - 1)) * &p * &q;
                p = next_p;
                q = next_q;
            }
            if p.is_zero() {
                return Err(FamilyError::ZeroValue(n));
            }
            let (ep, u) = split_two(&p);
            let (eq, w) = split_two(&q);
            levels.push(level(n, p.clone(), q.clone(), ep, u, eq, w));
        }
    }
    Ok(FamilyPoint { b, levels })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The hypothesis of the check does not hold for this `b`.
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaCheck {
    /// Every prime dividing `Q_i(-1)` divides `Q_j(-1)` for `j > i`.
    DenominatorPersistence,
    /// `gcd(u_n, w_n) = 1`.
    CoprimeOddParts,
    /// Odd primes of `P_n(-1)` are new at level `n` and, for `n >= 2`,
    /// avoid `(b - 1)(b + 1)`.
    PrimitiveOddPrimes,
    /// `v_2(P_n(-1)) = v_2(Q_n(-1)) = 2^n - 1` for even `b`.
    TwoAdicValuation,
    /// `P_n(-1) > 0`, `Q_n(-1) < 0` and `u_n = 3, 7 mod 8` for `b = 2 mod 4`, `b > 0`.
    PositiveThreeSevenModEight,
    /// `u_n, w_n = +-3 mod 8`, and `2 u_n = 10 mod 16` for `n >= 2`, when `b = 4 mod 8`.
    PlusMinusThreeModEight,
    /// `u_n` is not `+-` a square, for `b` in a proven class. Outside them
    /// the square behavior is recorded in `FamilyLevel::u_is_pm_square`.
    NotPlusMinusSquare,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaResult {
    pub check: LemmaCheck,
    pub n: usize,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub b: i64,
    pub class: FamilyClass,
    pub results: Vec<LemmaResult>,
}

impl LemmaReport {
    pub fn failures(&self) -> impl Iterator<Item = &LemmaResult> {
        self.results.iter().filter(|r| r.status == CheckStatus::Fail)
    }

    pub fn all_pass(&self, check: LemmaCheck) -> bool {
        self.results
            .iter()
            .filter(|r| r.check == check)
            .all(|r| r.status == CheckStatus::Pass)
    }
}

fn status(applies: bool, holds: bool) -> CheckStatus {
    match (applies, holds) {
        (false, _) => CheckStatus::Skipped,
        (true, true) => CheckStatus::Pass,
        (true, false) => CheckStatus::Fail,
    }
}

/// Run every structural check on the sequences up to `n_max`. The checks
/// use gcds of exact values, so none is left undecided.
pub fn fb_verify_lemmas(b: i64, n_max: usize) -> Result<LemmaReport, FamilyError> {
    let seq = fb_sequences(b, n_max)?;
    let class = FamilyClass::of(b);
    let even = b % 2 == 0;
    let bm1bp1 = BigInt::from(b - 1) * BigInt::from(b + 1);
    let sixteen = BigInt::from(16);
    let mut results = Vec::new();
    let mut push = |check, n, st| results.push(LemmaResult { check, n, status: st });
    for (i, lv) in seq.levels.iter().enumerate() {
        let n = lv.n;
        let persists = i == 0 || (&lv.q_at_minus1 % &seq.levels[i - 1].q_at_minus1).is_zero();
        push(LemmaCheck::DenominatorPersistence, n, status(true, persists));
        push(LemmaCheck::CoprimeOddParts, n, status(true, lv.u.gcd(&lv.w).is_one()));
        let new = seq.levels[..i].iter().all(|m| lv.u.gcd(&m.u).is_one());
        let avoids = n < 2 || lv.u.gcd(&bm1bp1).is_one();
        push(LemmaCheck::PrimitiveOddPrimes, n, status(true, new && avoids));
        let expected = (1u64 << n) - 1;
        push(
            LemmaCheck::TwoAdicValuation,
            n,
            status(even, lv.v2_p == expected && lv.v2_q == expected),
        );
        let signs = lv.p_at_minus1.is_positive() && lv.q_at_minus1.is_negative();
        push(
            LemmaCheck::PositiveThreeSevenModEight,
            n,
            status(
                class == FamilyClass::TwoModFourPositive,
                signs && lv.u.is_positive() && matches!(lv.u_mod8, 3 | 7),
            ),
        );
        let pm3 = |r: u8| r == 3 || r == 5;
        let ten = n < 2 || (BigInt::from(2) * &lv.u).mod_floor(&sixteen) == BigInt::from(10);
        push(
            LemmaCheck::PlusMinusThreeModEight,
            n,
            status(class == FamilyClass::FourModEight, pm3(lv.u_mod8) && pm3(lv.w_mod8) && ten),
        );
        push(LemmaCheck::NotPlusMinusSquare, n, status(class.is_proven(), !lv.u_is_pm_square));
    }
    Ok(LemmaReport { b, class, results })
}

fn level_one(b: i64) -> LevelReport {
    let disc = BigInt::from(4) * BigInt::from(b * b - 1);
    if is_square(&disc) {
        return LevelReport::gap(1, "Disc(P_1) = 4(b^2-1) is a square, so P_1 is reducible");
    }
    LevelReport {
        n: 1,
        status: LevelStatus::Certified,
        certificates: vec![Certificate {
            level: 1,
            mode: CertMode::Irreducibility,
            prime: None,
            cofactor: None,
            critical_point: None,
            factor: None,
            conditions: vec![Condition::flag("Disc(P_1) = 4(b^2-1) is not a square", true)],
            conclusion: Conclusion::QuadRatMax,
            statement: Conclusion::QuadRatMax.statement(1),
            reverified: None,
        }],
        note: None,
    }
}

fn cofactor_conditions(coprime_consts: bool, coprime_earlier: bool, coprime_partner: bool, nonsquare: bool) -> Vec<Condition> {
    vec![
        Condition::flag("gcd(u_n, 2(b-1)(b+1)) = 1", coprime_consts),
        Condition::flag("gcd(u_n, P_j(1) P_j(-1)) = 1 for 2 <= j < n", coprime_earlier),
        Condition::flag("gcd(u_n, P_n(1)) = 1", coprime_partner),
        Condition::flag("u_n is not +-square", nonsquare),
    ]
}

/// Level `n >= 2` from the sequences: `u_n` not `+-` a square and coprime to
/// every forbidden value yields a prime of odd valuation in `P_n(-1)` that
/// meets all conditions. `P_j(1)` is `(2b-2)^(2^(j-1)) P_(j-1)(-1)`.
fn cofactor_level(b: i64, seq: &FamilyPoint, n: usize) -> Option<Certificate> {
    let u = &seq.level(n).u;
    let consts = BigInt::from(2) * BigInt::from(b - 1) * BigInt::from(b + 1);
    let coprime_consts = u.gcd(&consts).is_one();
    let coprime_earlier = (1..n).all(|m| u.gcd(&seq.level(m).u).is_one());
    let coprime_partner = u.gcd(&BigInt::from(2 * b - 2)).is_one() && u.gcd(&seq.level(n - 1).u).is_one();
    let nonsquare = !is_pm_square(u);
    let conds = cofactor_conditions(coprime_consts, coprime_earlier, coprime_partner, nonsquare);
    conds.iter().all(|c| c.holds).then(|| Certificate {
        level: n,
        mode: CertMode::NonSquareCofactor,
        prime: None,
        cofactor: Some(u.clone()),
        critical_point: None,
        factor: None,
        conditions: conds,
        conclusion: Conclusion::QuadRatMax,
        statement: Conclusion::QuadRatMax.statement(n),
        reverified: None,
    })
}

/// Rebuild a sequence-based certificate from the map's own homogeneous
/// iteration at `1` and `-1`.
pub fn reverify_family_cert(f: &RatMap, cert: &Certificate, cfg: &CertConfig) -> Option<bool> {
    let n = cert.level;
    if cert.mode == CertMode::Irreducibility {
        return crate::certificates::ratmap::reverify(f, cert, cfg);
    }
    if cert.mode != CertMode::NonSquareCofactor || n < 2 {
        return None;
    }
    let one = BigRational::one();
    let minus = pairs(f, &-one.clone(), n, cfg.value_bit_cap)?;
    let plus = pairs(f, &one, n, cfg.value_bit_cap)?;
    let int = |x: &BigRational| x.is_integer().then(|| x.to_integer());
    let (_, u) = split_two(&int(&minus[n].0)?);
    let mut consts = BigInt::from(2);
    for (_, c) in ratmap_forbidden_constants(f).ok()? {
        consts *= int(&c)?;
    }
    let coprime_consts = u.gcd(&consts).is_one();
    let mut coprime_earlier = true;
    for j in 2..n {
        coprime_earlier &= u.gcd(&int(&minus[j].0)?).is_one() && u.gcd(&int(&plus[j].0)?).is_one();
    }
    let coprime_partner = u.gcd(&int(&plus[n].0)?).is_one();
    let conds = cofactor_conditions(coprime_consts, coprime_earlier, coprime_partner, !is_pm_square(&u));
    Some(Some(&u) == cert.cofactor.as_ref() && conds == cert.conditions && conds.iter().all(|c| c.holds))
}

/// Per-level certificates for `f_b` through `cfg.n_max`. Levels the
/// sequence route cannot certify fall back to the general rational-map
/// search.
pub fn fb_certify(b: i64, cfg: &CertConfig) -> Result<AnalysisReport, FamilyError> {
    let f = fb_map(b)?;
    let class = FamilyClass::of(b);
    let scan = detect_obstructions(&f, MapKind::QuadRatMap, cfg)?;
    let mut notes = vec![format!("b = {b}, class {class:?}")];
    let mut levels = Vec::new();
    if scan.obstructions.is_empty() && cfg.n_max >= 1 {
        levels.push(level_one(b));
        let seq = fb_sequences(b, cfg.n_max)?;
        let mut missing = Vec::new();
        for n in 2..=cfg.n_max {
            match cofactor_level(b, &seq, n) {
                Some(c) => levels.push(LevelReport {
                    n,
                    status: LevelStatus::Certified,
                    certificates: vec![c],
                    note: None,
                }),
                None => {
                    missing.push(n);
                    levels.push(LevelReport::gap(n, "u_n route failed"));
                }
            }
        }
        if !missing.is_empty() {
            notes.push(format!("levels {missing:?} tried with the general rational-map search"));
            let (_, general) = certify_quadratic_ratmap(&f, cfg)?;
            for g in general {
                if missing.contains(&g.n) && g.status == LevelStatus::Certified {
                    let n = g.n;
                    levels[n - 1] = g;
                }
            }
        }
        for lv in levels.iter_mut() {
            let mut failed = false;
            for c in lv.certificates.iter_mut() {
                c.reverified = match c.mode {
                    CertMode::ExplicitPrime => crate::certificates::ratmap::reverify(&f, c, cfg),
                    _ => reverify_family_cert(&f, c, cfg),
                };
                failed |= c.reverified == Some(false);
            }
            if failed {
                notes.push(format!("level {}: certificate failed exact re-verification", lv.n));
                *lv = LevelReport::gap(lv.n, "certificate failed exact re-verification");
            }
        }
    }
    let v = verdict(&scan.obstructions, &levels, cfg.n_max);
    let conditionality = match (&v, class.is_proven()) {
        (Verdict::InfiniteIndex { .. }, _) => Conditionality::unconditional("the obstruction forces infinite index over Q"),
        (_, true) => Conditionality::unconditional("b lies in a class where index one holds at every level"),
        (_, false) => Conditionality::unconditional(
            "b lies outside the proven classes; only the checked levels are claimed",
        ),
    };
    let gaps = levels.iter().filter(|l| l.status == LevelStatus::Gap).map(|l| l.n).collect();
    Ok(AnalysisReport {
        schema: "1",
        map: f.to_string(),
        degree: 2,
        kind: MapKind::QuadRatMap,
        n_max: cfg.n_max,
        critical: scan.critical,
        hypotheses: None,
        obstructions: scan.obstructions,
        pcf: scan.pcf,
        stability: None,
        collision: scan.collision,
        root_orbit: scan.root_orbit,
        unknowns: scan.unknowns,
        levels,
        gaps,
        verdict: v,
        conditionality,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::ObstructionKind;
    use crate::exact::ProjPoint;

    fn int(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn cfg(n: usize) -> CertConfig {
        CertConfig {
            n_max: n,
            ..CertConfig::default()
        }
    }

    #[test]
    fn maps() {
        assert_eq!(fb_map(2).unwrap().to_string(), fb_map(2).unwrap().to_string());
        let f = fb_map(2).unwrap();
        assert_eq!(f.num(), &Poly::from_ints([1, -4, 1]));
        assert_eq!(f.den(), &Poly::from_ints([0, 2]));
        let f = fb_map(0).unwrap();
        assert_eq!(f.den(), &Poly::from_ints([0, -2]));
        assert_eq!(fb_map(1), Err(FamilyError::BIsOne));
    }

    #[test]
    fn b2_values() {
        let s = fb_sequences(2, 2).unwrap();
        assert_eq!((s.level(1).p_at_minus1.clone(), s.level(1).q_at_minus1.clone()), (int(6), int(-2)));
        assert_eq!((s.level(2).p_at_minus1.clone(), s.level(2).q_at_minus1.clone()), (int(88), int(-24)));
        assert_eq!((s.level(2).u.clone(), s.level(2).w.clone()), (int(11), int(-3)));
        let s = fb_sequences(0, 1).unwrap();
        assert_eq!((s.level(1).p_at_minus1.clone(), s.level(1).q_at_minus1.clone()), (int(2), int(2)));
    }

    #[test]
    fn sequences_match_iterates() {
        for b in [-6i64, -3, 0, 2, 3, 4, 9] {
            let f = fb_map(b).unwrap();
            let s = fb_sequences(b, 8).unwrap();
            let x = BigRational::from_integer(int(-1));
            for it in f.iterates(8, 256).iter().skip(1) {
                let n = it.level;
                assert_eq!(it.p.eval(&x), BigRational::from_integer(s.level(n).p_at_minus1.clone()), "b={b} n={n}");
                assert_eq!(it.q.eval(&x), BigRational::from_integer(s.level(n).q_at_minus1.clone()), "b={b} n={n}");
            }
        }
    }

    #[test]
    fn collision_identity() {
        for b in [-4i64, 2, 5] {
            let f = fb_map(b).unwrap();
            let plus = f.scalar_pairs(&BigRational::one(), 10);
            let minus = f.scalar_pairs(&-BigRational::one(), 10);
            for n in 1..=10 {
                assert_eq!(&plus[n].0 / &plus[n].1, &minus[n - 1].0 / &minus[n - 1].1);
            }
            assert_eq!(f.eval(&ProjPoint::Finite(BigRational::one())), ProjPoint::Finite(-BigRational::one()));
        }
    }

    #[test]
    fn lemma_checks() {
        let r = fb_verify_lemmas(2, 10).unwrap();
        assert_eq!(r.failures().count(), 0);
        assert!(r.all_pass(LemmaCheck::PositiveThreeSevenModEight));
        let r = fb_verify_lemmas(4, 10).unwrap();
        assert_eq!(r.failures().count(), 0);
        assert!(r.all_pass(LemmaCheck::PlusMinusThreeModEight));
        let r = fb_verify_lemmas(3, 6).unwrap();
        assert!(r
            .results
            .iter()
            .filter(|x| x.check == LemmaCheck::TwoAdicValuation)
            .all(|x| x.status == CheckStatus::Skipped));
        assert!(r.all_pass(LemmaCheck::CoprimeOddParts));
        // u_1 = 1 for b = 3; outside the proven classes this is a record, not a failure.
        assert_eq!(r.failures().count(), 0);
        assert!(fb_sequences(3, 1).unwrap().level(1).u_is_pm_square);
    }

    #[test]
    fn certify_classes() {
        for b in [2i64, 4, -4] {
            let r = fb_certify(b, &cfg(6)).unwrap();
            assert_eq!(r.verdict, Verdict::IndexOne { levels: (1..=6).collect() }, "b={b}");
            for c in r.levels.iter().flat_map(|l| &l.certificates) {
                assert_eq!(c.reverified, Some(true));
            }
        }
    }

    #[test]
    fn degenerate_members() {
        for b in [-1i64, 0] {
            let r = fb_certify(b, &cfg(3)).unwrap();
            assert_eq!(r.verdict, Verdict::InfiniteIndex { reason: ObstructionKind::Pcf }, "b={b}");
        }
    }

    #[test]
    fn outside_classes_is_best_effort() {
        let r = fb_certify(8, &cfg(5)).unwrap();
        assert!(!r.conditionality.note.is_empty());
        assert!(r.levels.iter().all(|l| l.status != LevelStatus::Conditional));
    }
}
