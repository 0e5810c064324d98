use esl_core::mapspec::{parse_map_spec, MapSpec};
use esl_core::poly::rational;
use esl_core::{ExponentVector, PolyMap, Polynomial, Rational};
use proptest::prelude::*;

fn polynomial(n: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(
        (prop::collection::vec(0u32..5, n), -9i64..10, 1i64..5),
        0..6,
    )
    .prop_map(move |terms| {
        Polynomial::from_terms(
            n,
            terms
                .into_iter()
                .map(|(e, a, b)| (ExponentVector::new(e).unwrap(), rational(a, b))),
        )
        .unwrap()
    })
}

fn point(n: usize) -> impl Strategy<Value = Option<Vec<Rational>>> {
    prop::option::of(prop::collection::vec((-7i64..8, 1i64..4), n))
        .prop_map(|p| p.map(|v| v.into_iter().map(|(a, b)| rational(a, b)).collect()))
}

fn spec() -> impl Strategy<Value = MapSpec> {
    (1usize..4)
        .prop_flat_map(|n| (Just(n), 1..=n))
        .prop_flat_map(|(n, m)| (Just(n), prop::collection::vec(polynomial(n), m), point(n)))
        .prop_map(|(n, comps, pt)| MapSpec::from_map(PolyMap::new(n, comps).unwrap(), pt).unwrap())
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(s in spec()) {
        let text = s.to_string();
        let back = parse_map_spec(&text).unwrap();
        prop_assert_eq!(back.map(), s.map());
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn localized_map_vanishes_at_origin(s in spec()) {
        let local = s.localized().unwrap();
        let zero = vec![Rational::from_integer(0.into()); local.source_dim()];
        for c in local.components() {
            prop_assert_eq!(c.evaluate(&zero).unwrap(), Rational::from_integer(0.into()));
        }
    }
}
