use esl_core::padic::{ball_mass, cylinder_mass, MassEngine, DEFAULT_CELL_BUDGET};
use esl_core::poly::integer;
use esl_core::{ExponentVector, PolyMap, Polynomial, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn int_poly(n: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0u32..4, n), -3i64..4), 1..4).prop_map(
        move |terms| {
            Polynomial::from_terms(
                n,
                terms
                    .into_iter()
                    .map(|(e, c)| (ExponentVector::new(e).unwrap(), integer(c))),
            )
            .unwrap()
        },
    )
}

fn int_map() -> impl Strategy<Value = PolyMap> {
    (1usize..3)
        .prop_flat_map(|n| (Just(n), 1..=n))
        .prop_flat_map(|(n, m)| {
            prop::collection::vec(int_poly(n), m).prop_map(move |c| PolyMap::new(n, c).unwrap())
        })
}

fn targets(p: u64, k: u32, m: usize) -> Vec<Vec<BigInt>> {
    let q = p.pow(k);
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|v| (0..q).map(move |t| [v.clone(), vec![BigInt::from(t)]].concat()))
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn haar_consistency(map in int_map(), p in prop::sample::select(vec![2u64, 3]), k in 1u32..3) {
        let total: Rational = targets(p, k, map.target_dim())
            .iter()
            .map(|y| cylinder_mass(&map, p, k, y, DEFAULT_CELL_BUDGET).unwrap())
            .sum();
        prop_assert_eq!(total, Rational::one());
    }

    #[test]
    fn haar_consistency_of_refinement(f in int_poly(2), p in prop::sample::select(vec![2u64, 3, 5]), k in 1u32..4) {
        let map = PolyMap::new(2, vec![f]).unwrap();
        let total: Rational = targets(p, k, 1)
            .iter()
            .map(|y| ball_mass(&map, p, k, y, MassEngine::Refinement, DEFAULT_CELL_BUDGET).unwrap())
            .sum();
        prop_assert_eq!(total, Rational::one());
    }

    #[test]
    fn depth_coherence(map in int_map(), p in prop::sample::select(vec![2u64, 3]), k in 1u32..3, seed in any::<u64>()) {
        let m = map.target_dim();
        let pk = BigInt::from(p.pow(k));
        let y: Vec<BigInt> = (0..m).map(|i| BigInt::from((seed >> (8 * i)) % p.pow(k))).collect();
        let parent = cylinder_mass(&map, p, k, &y, DEFAULT_CELL_BUDGET).unwrap();
        let children: Rational = targets(p, 1, m)
            .iter()
            .map(|t| {
                let child: Vec<BigInt> = y.iter().zip(t).map(|(a, b)| a + b * &pk).collect();
                cylinder_mass(&map, p, k + 1, &child, DEFAULT_CELL_BUDGET).unwrap()
            })
            .sum();
        prop_assert_eq!(parent, children);
    }
}

#[test]
fn zero_map_concentrates_at_zero() {
    let map = PolyMap::new(1, vec![Polynomial::zero(1)]).unwrap();
    assert_eq!(
        cylinder_mass(&map, 3, 2, &[BigInt::zero()], DEFAULT_CELL_BUDGET).unwrap(),
        Rational::one()
    );
}
