//! Randomized invariants across the library.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use ccf::algorithms::AlgorithmSpec;
use ccf::approximation::{
    best_approx_oracle_in, certify_bad_circle, is_norm, norm_by_search, CircleVerdict, Distance2,
};
use ccf::arithmetic::{BallComplex, Branch, QuadraticSurd};
use ccf::expansion::{run, run_with, verify_identities, Iterate, RunOptions, TraceValue};
use ccf::forms::{orbit_along, SigmaForm};
use ccf::regions::Region;
use ccf::rings::{KElem, Ring, RingElement};
use ccf::util::rat;

fn g(a: i64, b: i64) -> RingElement {
    RingElement::from_i64(Ring::Gaussian, a, b)
}

fn element(ring: Ring, span: i64) -> impl Strategy<Value = RingElement> {
    (-span..=span, -span..=span).prop_map(move |(a, b)| RingElement::from_i64(ring, a, b))
}

fn surd(ring: Ring) -> impl Strategy<Value = (QuadraticSurd, [RingElement; 3])> {
    (element(ring, 4), element(ring, 4), element(ring, 4)).prop_filter_map("irreducible", |(a, b, c)| {
        if a.is_zero() || c.is_zero() {
            return None;
        }
        QuadraticSurd::from_poly(&a, &b, &c, Branch::PositiveImaginary)
            .ok()
            .map(|z| (z, [a, b, c]))
    })
}

fn gaussian_point(span: i64, den: i64) -> impl Strategy<Value = KElem> {
    (-span * den..=span * den, -span * den..=span * den)
        .prop_map(move |(a, b)| KElem::from_ints(Ring::Gaussian, a, b, den))
}

fn coords(k: &KElem) -> (BigRational, BigRational) {
    let n = k.numer();
    let d = k.denom().clone();
    (
        BigRational::new(n.a.clone(), d.clone()),
        BigRational::new(n.b.clone(), d),
    )
}

fn ball_at(k: &KElem, r: &BigRational) -> BallComplex {
    let (x, y) = coords(k);
    BallComplex::from_rationals(&x, &y, r, 80)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identities_and_period_replay(
        (z, _) in surd(Ring::Gaussian),
        alg in prop::sample::select(vec!["hurwitz", "even", "lambda", "perturbed:r=3/20"]),
    ) {
        let alg: AlgorithmSpec = alg.parse().unwrap();
        let t = run_with(&z, &alg, RunOptions { budget: 500, stop_at_period: true }).unwrap();
        prop_assert!(verify_identities(&t).passed());
        prop_assert!(t.period.is_some());
        prop_assert!(t.verify_period());
    }

    #[test]
    fn eisenstein_identities((z, _) in surd(Ring::Eisenstein)) {
        let t = run_with(&z, &AlgorithmSpec::eisenstein(), RunOptions { budget: 500, stop_at_period: true }).unwrap();
        prop_assert!(verify_identities(&t).passed());
        prop_assert!(t.verify_period());
    }

    #[test]
    fn steps_stay_inside_ball_images((z, _) in surd(Ring::Gaussian), a in element(Ring::Gaussian, 3)) {
        let prec = 128;
        let exact = z.step(&a).embed(prec);
        let via_balls = z.embed(prec).sub_element(&a).inv().unwrap();
        prop_assert!(via_balls.contains_ball(&exact) || via_balls.overlaps(&exact));
        let (cx, cy) = exact.center_f64();
        let (bx, by) = via_balls.center_f64();
        prop_assert!((cx - bx).hypot(cy - by) <= via_balls.radius_f64() + exact.radius_f64());
    }

    #[test]
    fn stepped_surds_keep_integral_polynomials((z, _) in surd(Ring::Gaussian)) {
        let t = run(&z, &AlgorithmSpec::hurwitz(), 12).unwrap();
        for n in 0..t.len() {
            let Some(Iterate::Surd(zn)) = t.z(n) else { unreachable!() };
            let (a, b, c) = zn.min_poly();
            let f = SigmaForm::from_polynomial(&a, &b, &c).unwrap();
            prop_assert!(f.is_zero_at(zn.as_lelem()).unwrap());
        }
    }

    #[test]
    fn orbit_preserves_determinant_and_corners((z, [a, b, c]) in surd(Ring::Gaussian)) {
        let t = run_with(&z, &AlgorithmSpec::hurwitz(), RunOptions::default()).unwrap();
        let x = SigmaForm::from_polynomial(&a, &b, &c).unwrap();
        let orbit = orbit_along(&t, &x, None).unwrap();
        prop_assert!(orbit.det_preserved);
        prop_assert!(orbit.corner_entries);
        prop_assert!(orbit.zeros_transported);
        prop_assert!(orbit.within_bound);
    }

    #[test]
    fn ball_arithmetic_encloses_exact_results(
        c1 in gaussian_point(3, 7),
        c2 in gaussian_point(3, 5),
        o1 in gaussian_point(1, 64),
        o2 in gaussian_point(1, 64),
    ) {
        let r = rat(1, 50);
        // offsets are at most √2/100 < 1/50 away from the centres
        let (b1, b2) = (ball_at(&c1, &r), ball_at(&c2, &r));
        let scale = KElem::from_ints(Ring::Gaussian, 1, 0, 100);
        let p1 = &c1 + &(&o1 * &scale);
        let p2 = &c2 + &(&o2 * &scale);
        let check = |ball: BallComplex, exact: KElem| {
            let (x, y) = coords(&exact);
            ball.contains_rational(&x, &y)
        };
        prop_assert!(check(b1.add(&b2), &p1 + &p2));
        prop_assert!(check(b1.sub(&b2), &p1 - &p2));
        prop_assert!(check(b1.mul(&b2), &p1 * &p2));
        if let Ok(inv) = b1.inv() {
            prop_assert!(check(inv, p1.inv().unwrap()));
        }
    }

    #[test]
    fn choose_lands_in_fundamental_set(
        p in gaussian_point(6, 97),
        alg in prop::sample::select(vec!["hurwitz", "even", "lambda", "perturbed:r=3/20"]),
    ) {
        let alg: AlgorithmSpec = alg.parse().unwrap();
        let a = alg.choose(&p).unwrap();
        prop_assert_eq!(alg.choose(&p).unwrap(), a.clone());
        let rem = &p - &KElem::from(&a);
        prop_assert!(rem.norm() < rat(1, 1));
        prop_assert_ne!(alg.fundamental_set().contains(&rem), Some(false));
    }

    #[test]
    fn inversion_is_an_involution_and_reciprocal(w in gaussian_point(3, 61)) {
        prop_assume!(!w.is_zero());
        for r in [Region::q_h(), Region::diamond_h(), Region::q_r(&rat(3, 20))] {
            let inv = r.invert();
            if let (Some(x), Some(y)) = (inv.invert().contains(&w), r.contains(&w)) {
                prop_assert_eq!(x, y);
            }
            if let (Some(x), Some(y)) = (inv.contains(&w), r.contains(&w.inv().unwrap())) {
                prop_assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn certification_ignores_the_centre(
        cx in -6i64..=6, cy in -6i64..=6, d in 1i64..=4,
        num in 1i64..=60, den in 1i64..=6,
        eisenstein in any::<bool>(),
    ) {
        let ring = if eisenstein { Ring::Eisenstein } else { Ring::Gaussian };
        let r2 = rat(num, den);
        let center = KElem::from_ints(ring, cx, cy, d);
        let here = certify_bad_circle(&center, &r2, ring).unwrap();
        let origin = certify_bad_circle(&KElem::zero(ring), &r2, ring).unwrap();
        prop_assert_eq!(
            matches!(here.verdict, CircleVerdict::CertifiedBad),
            matches!(origin.verdict, CircleVerdict::CertifiedBad)
        );
        if let CircleVerdict::ContainsKPoint { witness } = &here.verdict {
            prop_assert_eq!((witness - &center).norm(), r2);
        }
    }
}

#[test]
fn norms_agree_with_search_up_to_ten_thousand() {
    for ring in [Ring::Gaussian, Ring::Eisenstein] {
        for n in 1..=10_000u32 {
            let n = BigInt::from(n);
            let w = is_norm(&n, ring).unwrap();
            assert_eq!(w.is_norm(), norm_by_search(&n, ring).is_some(), "{n} in {ring:?}");
            if let Some(x) = &w.witness {
                assert_eq!(x.norm(), n);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_rows_match_convergents_and_units((z, _) in surd(Ring::Gaussian)) {
        let t = run(&z, &AlgorithmSpec::hurwitz(), 6).unwrap();
        let iterate = Iterate::Surd(z.clone());
        let table = best_approx_oracle_in(Ring::Gaussian, &iterate, 400, 1_000_000).unwrap();
        for n in 0..t.len() {
            let s = &t.steps[n];
            let qn = s.q.norm();
            if qn > BigInt::from(400) {
                break;
            }
            let row = table.row(&s.q).expect("every q up to the bound has a row");
            let Some(TraceValue::Exact(delta)) = t.delta(n) else { unreachable!() };
            let target = delta.abs2().scale(&BigRational::from_integer(qn).recip());
            let Distance2::Exact(d2) = &row.dist2 else { unreachable!() };
            if row.p == s.p {
                prop_assert!(d2.sub(&target).is_zero());
            } else {
                prop_assert!(d2.cmp_to(&target).is_le());
            }
        }
        let units = Ring::Gaussian.units();
        for row in table.rows.iter().take(40) {
            for u in &units {
                let other = table.row(&(&row.q * u)).unwrap();
                let (Distance2::Exact(a), Distance2::Exact(b)) = (&row.dist2, &other.dist2) else { unreachable!() };
                prop_assert!(a.sub(b).is_zero());
            }
        }
    }
}

#[test]
fn unit_rows_carry_associate_numerators() {
    let z = QuadraticSurd::from_poly(&g(1, 0), &g(0, 0), &g(2, 0), Branch::PositiveImaginary).unwrap();
    let table = best_approx_oracle_in(Ring::Gaussian, &Iterate::Surd(z), 50, 1_000_000).unwrap();
    let row = table.row(&g(2, 0)).unwrap();
    let turned = table.row(&g(0, 2)).unwrap();
    assert_eq!(turned.p, &row.p * &g(0, 1));
}
