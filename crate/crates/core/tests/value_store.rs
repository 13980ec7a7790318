mod common;

use common::{close, softmax_naive, variance_pairwise};
use proptest::prelude::*;
use voi_arbiter::value_store::{population_variance, sample_index, softmax_in_place};
use voi_arbiter::{seeded_rng, ActionId, QStore, SoftmaxParams, StateId};

fn row() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, 1..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn variance_matches_pairwise_oracle(xs in row()) {
        prop_assert!(close(population_variance(&xs), variance_pairwise(&xs), 1e-12));
    }

    #[test]
    fn softmax_matches_naive_oracle(xs in row(), rho in 0.01f64..1.0) {
        let mut p = xs.clone();
        softmax_in_place(&mut p, rho);
        let oracle = softmax_naive(&xs, rho);
        for (a, b) in p.iter().zip(&oracle) {
            prop_assert!(close(*a, *b, 1e-12), "{a} vs {b}");
        }
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spread_is_shift_invariant(xs in prop::collection::vec(-50.0f64..50.0, 6), shift in -100.0f64..100.0) {
        let mut q = QStore::new(2, 6, 10).unwrap();
        for (a, &x) in xs.iter().enumerate() {
            q.write_q(StateId(0), ActionId(a), x);
            q.write_q(StateId(1), ActionId(a), x + shift);
        }
        prop_assert!((q.state_spread(StateId(0)) - q.state_spread(StateId(1))).abs() < 1e-9);
    }

    #[test]
    fn history_keeps_last_window(writes in prop::collection::vec(-50.0f64..50.0, 0..40), window in 1usize..12) {
        let mut q = QStore::new(1, 1, window).unwrap();
        for &w in &writes {
            q.write_q(StateId(0), ActionId(0), w);
        }
        let kept = writes.len().min(window);
        let h = q.history(StateId(0), ActionId(0));
        prop_assert_eq!(h.len(), kept);
        prop_assert_eq!(&h[..], &writes[writes.len() - kept..]);
        let expected = if kept < 2 { 0.0 } else { variance_pairwise(&h) };
        prop_assert!(close(q.pair_uncertainty(StateId(0), ActionId(0)), expected, 1e-12));
    }

    #[test]
    fn sampling_respects_zero_mass(u in 0.0f64..1.0) {
        let i = sample_index(&[0.0, 0.5, 0.0, 0.5, 0.0], u);
        prop_assert!(i == 1 || i == 3);
    }
}

#[test]
fn softmax_frequencies_within_three_standard_errors() {
    let mut q = QStore::new(1, 6, 10).unwrap();
    for (a, v) in [1.0, -2.0, 0.5, 3.0, 0.0, 2.5].into_iter().enumerate() {
        q.write_q(StateId(0), ActionId(a), v);
    }
    let params = SoftmaxParams::new(0.9).unwrap();
    let probs = softmax_naive(q.row(StateId(0)), 0.9);
    let n = 100_000;
    let mut counts = [0usize; 6];
    let mut rng = seeded_rng(2024);
    for _ in 0..n {
        counts[q.softmax_select(StateId(0), params, &mut rng).0] += 1;
    }
    for (a, &c) in counts.iter().enumerate() {
        let se = (probs[a] * (1.0 - probs[a]) / n as f64).sqrt();
        let freq = c as f64 / n as f64;
        assert!(
            (freq - probs[a]).abs() <= 3.0 * se,
            "action {a}: {freq} vs {}",
            probs[a]
        );
    }
}

#[test]
fn greedy_breaks_ties_low() {
    let mut q = QStore::new(1, 4, 10).unwrap();
    q.write_q(StateId(0), ActionId(2), 1.0);
    q.write_q(StateId(0), ActionId(3), 1.0);
    assert_eq!(q.greedy(StateId(0)), ActionId(2));
    assert_eq!(
        QStore::new(1, 4, 10).unwrap().greedy(StateId(0)),
        ActionId(0)
    );
}

#[test]
fn csv_round_trip() {
    let mut q = QStore::new(3, 2, 10).unwrap();
    q.write_q(StateId(1), ActionId(1), -0.1234567890123);
    q.write_q(StateId(2), ActionId(0), 1e-300);
    let mut buf = Vec::new();
    q.write_csv(&mut buf).unwrap();
    let back = QStore::read_csv(&buf[..], 3, 2, 10).unwrap();
    assert_eq!(back.values(), q.values());
    assert!(QStore::read_csv(&buf[..], 4, 2, 10).is_err());
    assert!(QStore::read_csv(&b"1,2\n3,x\n4,5\n"[..], 3, 2, 10).is_err());
}
