//! Randomised invariants across modules.

use entrolab::entropy::{
    binary_entropy, binary_entropy_inverse, entropy_vector_of, is_polymatroid, GroundSet, JointDistribution,
    LinearFunctional, SubsetIndex, Variable,
};
use entrolab::lp::{parse_lp, render_lp, LinearConstraint, LinearSystem, Relation};
use entrolab::rational::{int, ratio, to_f64};
use entrolab::recovery::{check_permutation_equivalence, recover_distribution, FamilyOracle, IndicatorFamily};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn joint(weights: &[u32], sizes: &[usize]) -> JointDistribution {
    let variables = sizes
        .iter()
        .enumerate()
        .map(|(i, &s)| Variable { name: format!("V{i}"), alphabet: (0..s).map(|v| v.to_string()).collect() })
        .collect();
    let total: u32 = weights.iter().sum();
    let mut entries = Vec::new();
    for (k, &w) in weights.iter().enumerate() {
        if w == 0 {
            continue;
        }
        let mut rest = k;
        let outcome = sizes
            .iter()
            .map(|&s| {
                let v = rest % s;
                rest /= s;
                v
            })
            .collect();
        entries.push((outcome, ratio(i64::from(w), i64::from(total))));
    }
    JointDistribution::new(variables, entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_vectors_are_polymatroids(weights in prop::collection::vec(0u32..6, 12), extra in 0u32..6) {
        let mut w = weights;
        w[0] += 1 + extra;
        let d = joint(&w, &[2, 3, 2]);
        prop_assert!(is_polymatroid(&entropy_vector_of(&d)).holds());
    }

    #[test]
    fn lp_dump_round_trips(rows in prop::collection::vec(
        (prop::collection::vec(-5i64..=5, 7), 0usize..3, -9i64..=9, 1i64..=4), 1..8)
    ) {
        let g = GroundSet::new(["A", "B", "C"]).unwrap();
        let mut sys = LinearSystem::new(g);
        for (coeffs, rel, num, den) in rows {
            let f = LinearFunctional::from_terms(
                coeffs.iter().enumerate().map(|(c, &v)| (SubsetIndex::from_coordinate(c), ratio(v, den))),
            );
            let relation = [Relation::Ge, Relation::Le, Relation::Eq][rel];
            sys.push(LinearConstraint::new(f, relation, ratio(num, den))).unwrap();
        }
        let text = render_lp(&sys);
        let back = parse_lp(&text).unwrap();
        prop_assert_eq!(render_lp(&back), text);
        prop_assert_eq!(back.constraints(), sys.constraints());
    }

    #[test]
    fn binary_entropy_inverse_round_trips(q in 0.0f64..=0.5) {
        let back = binary_entropy_inverse(binary_entropy(q)).unwrap();
        prop_assert!((back - q).abs() < 1e-9, "{} -> {}", q, back);
    }

    #[test]
    fn recovery_is_label_invariant(weights in prop::collection::vec(1i64..200, 2..=5), seed in any::<u64>()) {
        let total: i64 = weights.iter().sum();
        let probs: Vec<_> = weights.iter().map(|&w| ratio(w, total)).collect();
        let family = IndicatorFamily::from_probabilities(&probs).unwrap();
        let oracle = FamilyOracle::shuffled(&family, &mut ChaCha8Rng::seed_from_u64(seed));
        let r = recover_distribution(&oracle, probs.len()).unwrap();
        let truth: Vec<f64> = probs.iter().map(to_f64).collect();
        prop_assert!(check_permutation_equivalence(&r.probabilities, &truth));
        let sum: f64 = r.probabilities.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
    }
}

#[test]
fn deterministic_point_mass_has_zero_entropy() {
    let d = joint(&[0, 0, 5, 0], &[2, 2]);
    assert!(entropy_vector_of(&d).values().iter().all(|v| *v == int(0)));
}
