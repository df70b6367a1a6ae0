mod common;

use common::{laurent, positive_rational, rational};
use num_traits::Zero;
use proptest::prelude::*;
use radext::ratlaurent::{
    certify_sign_on_interval, count_roots_between, isolate_positive_roots, parse_rational, format_rational,
    sturm_positive_root_count, Interval, LaurentPoly, PositivityCertificate, Rational, SturmChain, UniPoly,
};

proptest! {
    #[test]
    fn ring_axioms(a in laurent(-4, 6, 5), b in laurent(-4, 6, 5), c in laurent(-4, 6, 5)) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &LaurentPoly::one(), a.clone());
    }

    #[test]
    fn leibniz_rule(a in laurent(-4, 6, 5), b in laurent(-4, 6, 5)) {
        let lhs = (&a * &b).differentiate();
        let rhs = &(&a.differentiate() * &b) + &(&a * &b.differentiate());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in laurent(-4, 6, 5), b in laurent(-4, 6, 5), y in positive_rational(20, 7)) {
        let (va, vb) = (a.eval(&y).unwrap(), b.eval(&y).unwrap());
        prop_assert_eq!((&a * &b).eval(&y).unwrap(), &va * &vb);
        prop_assert_eq!((&a + &b).eval(&y).unwrap(), va + vb);
    }

    #[test]
    fn json_round_trip(a in laurent(-4, 6, 5), r in rational(1000, 999)) {
        let text = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<LaurentPoly>(&text).unwrap(), a);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
}

/// `1000` equally spaced rationals strictly inside `(lo, hi)`.
fn grid<'a>(lo: &'a Rational, hi: &Rational) -> impl Iterator<Item = Rational> + 'a {
    let step = (hi - lo) / Rational::from_integer(1001.into());
    (1..=1000).map(move |i| lo + &step * Rational::from_integer(i.into()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn certificate_agrees_with_dense_sampling(
        p in laurent(-3, 30, 7),
        lo in positive_rational(12, 4),
        width in positive_rational(12, 4),
    ) {
        let hi = &lo + &width;
        let iv = Interval::bounded(lo.clone(), hi.clone()).unwrap();
        let cert = certify_sign_on_interval(&p, &iv).unwrap();
        let sampled_negative = grid(&lo, &hi).any(|y| p.eval(&y).unwrap() < Rational::zero());
        match cert {
            PositivityCertificate::NonnegativeOn { .. } => prop_assert!(!sampled_negative),
            PositivityCertificate::NegativeWitness { point, value } => {
                prop_assert!(iv.contains(&point));
                prop_assert!(value < Rational::zero());
                prop_assert_eq!(p.eval(&point).unwrap(), value);
            }
            PositivityCertificate::IdenticallyZero => prop_assert!(p.is_zero()),
        }
    }

    #[test]
    fn isolation_count_matches_sturm_variations(p in laurent(0, 12, 6)) {
        prop_assume!(!p.is_zero());
        let roots = isolate_positive_roots(&p).unwrap();
        let chain = SturmChain::new(&UniPoly::from_laurent(&p));
        // After clearing the valuation the base polynomial is nonzero at 0.
        let variations = chain.variations_at(&Rational::zero()) - chain.variations_at_infinity();
        prop_assert_eq!(roots.len(), variations);
        prop_assert_eq!(roots.len(), sturm_positive_root_count(&p).unwrap());
        for iv in &roots {
            prop_assert_eq!(count_roots_between(&p, &iv.lo, Some(&iv.hi)).unwrap(), 1);
        }
    }

    #[test]
    fn isolates_planted_roots(raw in prop::collection::btree_set((1i64..=40, 1i64..=5), 1..=5)) {
        let planted: std::collections::BTreeSet<Rational> =
            raw.into_iter().map(|(p, q)| Rational::new(p.into(), q.into())).collect();
        let p = planted.iter().fold(LaurentPoly::one(), |acc, r| {
            &acc * &(&LaurentPoly::var() - &LaurentPoly::constant(r.clone()))
        });
        let roots = isolate_positive_roots(&p).unwrap();
        prop_assert_eq!(roots.len(), planted.len());
        for (iv, r) in roots.iter().zip(&planted) {
            prop_assert!(iv.contains(r), "{} not in ({}, {})", r, iv.lo, iv.hi);
        }
    }
}

#[test]
fn no_positive_roots() {
    // y² + 1 and 1 + y have none; y³ − 2 has one irrational root.
    let y = LaurentPoly::var();
    let one = LaurentPoly::one();
    assert!(isolate_positive_roots(&(&(&y * &y) + &one)).unwrap().is_empty());
    assert!(isolate_positive_roots(&(&y + &one)).unwrap().is_empty());
    let cube = &(&y * &(&y * &y)) - &LaurentPoly::constant(Rational::from_integer(2.into()));
    let roots = isolate_positive_roots(&cube).unwrap();
    assert_eq!(roots.len(), 1);
    assert!(roots[0].exact.is_none());
    let (lo, hi) = (&roots[0].lo, &roots[0].hi);
    assert!(cube.eval(lo).unwrap() < Rational::zero() && cube.eval(hi).unwrap() > Rational::zero());
    assert!(roots[0].width() <= Rational::new(1.into(), (1 << 20).into()));
}
