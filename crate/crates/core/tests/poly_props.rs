use goodpair::rational::int;
use goodpair::{Poly, Rational};
use proptest::prelude::*;

const VARS: usize = 3;

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0u32..3, VARS), -5i64..=5), 0..6).prop_map(|terms| {
        Poly::from_terms(VARS, terms.into_iter().map(|(e, c)| (e, int(c)))).unwrap()
    })
}

fn point() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-6i64..=6, 1i64..=4), VARS)
        .prop_map(|v| v.into_iter().map(|(a, b)| Rational::new(a.into(), b.into())).collect())
}

proptest! {
    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Poly::one(VARS), a.clone());
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly(), b in poly(), x in point()) {
        let (va, vb) = (a.evaluate(&x).unwrap(), b.evaluate(&x).unwrap());
        prop_assert_eq!((&a + &b).evaluate(&x).unwrap(), &va + &vb);
        prop_assert_eq!((&a * &b).evaluate(&x).unwrap(), va * vb);
    }

    #[test]
    fn substitution_is_a_homomorphism(a in poly(), b in poly(), images in prop::collection::vec(poly(), VARS), x in point()) {
        let sub = |p: &Poly| p.substitute(&images).unwrap();
        prop_assert_eq!(sub(&(&a * &b)), &sub(&a) * &sub(&b));
        prop_assert_eq!(sub(&(&a + &b)), &sub(&a) + &sub(&b));
        // Composition agrees with evaluating the images first.
        let inner: Vec<Rational> = images.iter().map(|q| q.evaluate(&x).unwrap()).collect();
        prop_assert_eq!(sub(&a).evaluate(&x).unwrap(), a.evaluate(&inner).unwrap());
    }

    #[test]
    fn derivative_obeys_leibniz(a in poly(), b in poly(), v in 0..VARS) {
        let lhs = (&a * &b).derivative(v);
        let rhs = &(&a.derivative(v) * &b) + &(&a * &b.derivative(v));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn json_roundtrip(a in poly()) {
        let text = serde_json::to_string(&a).unwrap();
        let back: Poly = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, a);
    }
}
