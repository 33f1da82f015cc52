mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use structrates_core::loss::{
    decode, frontier_distance, frontier_witness, is_on_frontier, margin_gap, FiniteLoss, SandwichConstants,
    SignedMeasure,
};

fn loss_strategy() -> impl Strategy<Value = FiniteLoss> {
    (2usize..=6, 2usize..=6)
        .prop_flat_map(|(nz, ny)| prop::collection::vec(prop::collection::vec(0.0f64..3.0, ny), nz))
        .prop_map(|rows| {
            let (nz, ny) = (rows.len(), rows[0].len());
            FiniteLoss::new(common::labels("z", nz), common::labels("y", ny), rows).unwrap()
        })
}

fn loss_and_measure() -> impl Strategy<Value = (FiniteLoss, SignedMeasure)> {
    loss_strategy().prop_flat_map(|loss| {
        let ny = loss.n_y();
        (Just(loss), prop::collection::vec(-1.0f64..2.0, ny).prop_map(SignedMeasure::new))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn decode_is_exhaustive_argmin((loss, mu) in loss_and_measure()) {
        prop_assert_eq!(decode(&loss, &mu).unwrap(), common::exhaustive_decode(&loss, &mu));
    }

    #[test]
    fn distance_is_scale_covariant((loss, mu) in loss_and_measure(), c in 0.01f64..50.0) {
        let d = frontier_distance(&loss, &mu).unwrap();
        let dc = frontier_distance(&loss, &mu.scaled(c)).unwrap();
        prop_assert!((dc - c * d).abs() <= 1e-9 * (1.0 + c * d));
        prop_assert_eq!(decode(&loss, &mu).unwrap(), decode(&loss, &mu.scaled(c)).unwrap());
    }

    #[test]
    fn sandwich_holds((loss, mu) in loss_and_measure()) {
        if let Some(c) = SandwichConstants::for_loss(&loss) {
            let gamma = margin_gap(&loss, &mu).unwrap();
            let d = frontier_distance(&loss, &mu).unwrap();
            prop_assert!(c.lower * gamma <= d + 1e-12);
            prop_assert!(d <= c.upper * gamma + 1e-12);
        }
    }

    #[test]
    fn projection_lands_on_frontier((loss, mu) in loss_and_measure()) {
        let w = frontier_witness(&loss, &mu).unwrap();
        let p = w.projection(&loss, &mu);
        prop_assert!(margin_gap(&loss, &p).unwrap() <= 1e-9);
    }

    #[test]
    fn small_perturbations_keep_the_decode((loss, mu) in loss_and_measure(), seed in any::<u64>()) {
        // ‖g − g*‖ < d(g*, F) implies the plug-in decode agrees with f*
        let d = frontier_distance(&loss, &mu).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(common::ball_violations(&mut rng, &loss, &mu, 0.99 * d, 200), 0);
    }

    #[test]
    fn frontier_flag_matches_zero_distance((loss, mu) in loss_and_measure()) {
        if is_on_frontier(&loss, &mu).unwrap() {
            prop_assert!(frontier_distance(&loss, &mu).unwrap() <= 1e-12 * loss.c_psi().max(1.0) * 1e3);
        }
    }
}

#[test]
fn exact_ties_take_the_lowest_index() {
    let loss = FiniteLoss::new(
        common::labels("z", 3),
        common::labels("y", 2),
        vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]],
    )
    .unwrap();
    let mu = SignedMeasure::new(vec![0.5, 0.5]);
    assert_eq!(decode(&loss, &mu).unwrap(), 0);
    assert!(is_on_frontier(&loss, &mu).unwrap());
    assert_eq!(frontier_distance(&loss, &mu).unwrap(), 0.0);
}
