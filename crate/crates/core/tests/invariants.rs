use arbor_core::certificates::{analyze, CertConfig, LevelStatus, MapKind};
use arbor_core::dynamics::{disc_iterate, orbit, OrbitStatus};
use arbor_core::exact::{Poly, ProjPoint, RatMap, DEFAULT_DEGREE_CAP};
use arbor_core::family::{fb_map, fb_sequences};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn quad(c: &BigRational) -> Poly {
    Poly::new(vec![c.clone(), BigRational::zero(), q(1, 1)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn family_sequences_match_the_orbit_of_minus_one(b in -30i64..30, n_max in 1usize..7) {
        // b = 1 is excluded and b = -1 sends -1 to 0.
        prop_assume!(b != 1 && b != -1);
        let seq = fb_sequences(b, n_max).unwrap();
        let f = fb_map(b).unwrap();
        let mut x = ProjPoint::Finite(q(-1, 1));
        for lv in &seq.levels {
            x = f.eval(&x);
            let expected = if lv.q_at_minus1.is_zero() {
                ProjPoint::Infinity
            } else {
                ProjPoint::Finite(BigRational::new(lv.p_at_minus1.clone(), lv.q_at_minus1.clone()))
            };
            prop_assert_eq!(&x, &expected, "b = {}, n = {}", b, lv.n);
            let v2 = lv.p_at_minus1.trailing_zeros().unwrap_or(0);
            prop_assert_eq!(lv.v2_p, v2);
            prop_assert_eq!(&lv.u << lv.v2_p, lv.p_at_minus1.clone());
        }
    }

    #[test]
    fn iterate_polynomials_evaluate_like_the_orbit(
        a in -4i64..5, c in -4i64..5, d in 1i64..4, x in -6i64..7, n in 1usize..4,
    ) {
        let num = Poly::from_ints([1, a, 1]);
        let den = Poly::from_ints([0, d]);
        let f = RatMap::new(num, den).unwrap();
        prop_assume!(f.degree() == 2);
        let it = f.iterate(n, DEFAULT_DEGREE_CAP).unwrap();
        let x = q(x, c.abs() + 1);
        let den = it.q.eval(&x);
        let expected = f.eval_iter(&ProjPoint::Finite(x.clone()), n);
        if den.is_zero() {
            prop_assert_eq!(expected, ProjPoint::Infinity);
        } else {
            prop_assert_eq!(expected, ProjPoint::Finite(it.p.eval(&x) / den));
        }
    }

    #[test]
    fn preperiodic_records_close_up(c in -6i64..3, x in -3i64..4) {
        let f = RatMap::polynomial(quad(&q(c, 1)));
        let start = ProjPoint::Finite(q(x, 1));
        let r = orbit(&f, &start, 32);
        if let OrbitStatus::Preperiodic { tail, cycle } = r.status {
            prop_assert!(cycle >= 1);
            let a = f.eval_iter(&start, tail);
            prop_assert_eq!(f.eval_iter(&a, cycle), a);
        }
        if let OrbitStatus::Escaping { at_step } = r.status {
            let seen = &r.values[..=at_step];
            for (i, v) in seen.iter().enumerate() {
                prop_assert!(!seen[i + 1..].contains(v));
            }
        }
    }

    #[test]
    fn disc_routes_agree(num in -20i64..20, den in 1i64..6, t in -5i64..6, n in 1usize..3) {
        let f = quad(&q(num, den));
        let cmp = disc_iterate(&f, n, &q(t, 1), true).unwrap();
        prop_assert_eq!(cmp.agree, Some(true));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn certified_levels_reverify(num in 1i64..40, den in 1i64..4) {
        let c = q(num, den);
        let f = RatMap::polynomial(quad(&c));
        let cfg = CertConfig { n_max: 4, ..CertConfig::default() };
        let r = analyze(&f, Some(MapKind::QuadPoly), &cfg).unwrap();
        for lv in r.levels.iter().filter(|l| l.status == LevelStatus::Certified) {
            prop_assert!(!lv.certificates.is_empty());
            for cert in &lv.certificates {
                prop_assert!(cert.all_hold());
                prop_assert_ne!(cert.reverified, Some(false));
            }
        }
        prop_assert!(r.gaps.iter().all(|n| (1..=4).contains(n)));
    }
}

#[test]
fn two_adic_split_of_a_family_value() {
    let seq = fb_sequences(2, 3).unwrap();
    for lv in &seq.levels {
        let expected = (1u64 << lv.n) - 1;
        assert_eq!(lv.v2_p, expected);
        assert_eq!(lv.v2_q, expected);
        assert_eq!(&lv.w << lv.v2_q, lv.q_at_minus1);
        assert!(lv.u.clone() % BigInt::from(2) != BigInt::zero());
    }
}
