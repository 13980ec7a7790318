//! Taxi conformance against brute-force oracles.

mod common;

use std::collections::HashSet;

use common::shortest_delivery;

use voi_arbiter::env::{TaxiAction, IN_TAXI, TAXI_LANDMARKS};
use voi_arbiter::harness::greedy_return;
use voi_arbiter::{seeded_rng, ActionId, Environment, QStore, StateId, Taxi, TaxiState};

/// Cells whose east edge is a wall, read off the map by hand.
const EAST_WALLS: [(usize, usize); 6] = [(0, 1), (1, 1), (3, 0), (4, 0), (3, 2), (4, 2)];

/// Every legal start state, found by checking all field combinations.
fn legal_starts_oracle() -> HashSet<StateId> {
    let mut out = HashSet::new();
    for row in 0..5 {
        for col in 0..5 {
            for passenger in 0..4 {
                for destination in 0..4 {
                    if passenger != destination {
                        let i = ((row * 5 + col) * 5 + passenger) * 4 + destination;
                        out.insert(StateId(i));
                    }
                }
            }
        }
    }
    out
}

#[test]
fn encode_decode_round_trip_all_states() {
    for i in 0..500 {
        let decoded = TaxiState::decode(StateId(i)).unwrap();
        assert_eq!(decoded.encode().unwrap(), StateId(i));
    }
}

#[test]
fn reset_stays_inside_legal_start_set() {
    let env = Taxi::new();
    let oracle = legal_starts_oracle();
    assert_eq!(oracle.len(), 300);
    let starts: HashSet<StateId> = env.start_states().iter().copied().collect();
    assert_eq!(starts, oracle);
    let mut rng = seeded_rng(11);
    let mut hit = HashSet::new();
    for _ in 0..20_000 {
        let s = env.reset(&mut rng);
        assert!(oracle.contains(&s));
        hit.insert(s);
    }
    // uniform over 300 states: all of them show up in 20k draws
    assert_eq!(hit.len(), 300);
}

#[test]
fn step_is_deterministic() {
    let env = Taxi::new();
    for s in 0..500 {
        for a in 0..6 {
            let first = env.step(StateId(s), ActionId(a)).unwrap();
            for _ in 0..1000 {
                assert_eq!(env.step(StateId(s), ActionId(a)).unwrap(), first);
            }
        }
    }
}

#[test]
fn rewards_are_confined() {
    let env = Taxi::new();
    for s in 0..500 {
        for a in 0..6 {
            let t = env.step(StateId(s), ActionId(a)).unwrap();
            assert!([-1.0, -10.0, 20.0].contains(&t.reward), "{s} {a} {t:?}");
            assert_eq!(t.terminal, t.reward == 20.0);
            if t.terminal {
                let before = TaxiState::decode(StateId(s)).unwrap();
                assert_eq!(before.passenger, IN_TAXI);
                assert_eq!(TAXI_LANDMARKS[before.destination], (before.row, before.col));
                assert_eq!(a, TaxiAction::Dropoff as usize);
            }
        }
    }
}

#[test]
fn moves_follow_wall_layout() {
    let env = Taxi::new();
    for s in 0..500 {
        let before = TaxiState::decode(StateId(s)).unwrap();
        for a in 0..4 {
            let t = env.step(StateId(s), ActionId(a)).unwrap();
            let after = TaxiState::decode(t.next_state).unwrap();
            assert_eq!(t.reward, -1.0);
            assert_eq!(
                (after.passenger, after.destination),
                (before.passenger, before.destination)
            );
            let (r, c) = (before.row, before.col);
            let blocked = match a {
                0 => r == 4,
                1 => r == 0,
                2 => c == 4 || EAST_WALLS.contains(&(r, c)),
                _ => c == 0 || EAST_WALLS.contains(&(r, c - 1)),
            };
            let expected = match (a, blocked) {
                (_, true) => (r, c),
                (0, _) => (r + 1, c),
                (1, _) => (r - 1, c),
                (2, _) => (r, c + 1),
                _ => (r, c - 1),
            };
            assert_eq!((after.row, after.col), expected, "state {s} action {a}");
        }
    }
}

#[test]
fn shortest_path_oracle_matches_optimal_rewards() {
    let env = Taxi::new();
    let mut total = 0.0;
    for &s in env.start_states() {
        let steps = shortest_delivery(&env, s).expect("every start can deliver");
        let best_reward = 20.0 - (steps as f64 - 1.0);
        assert!(best_reward <= 20.0);
        total += best_reward;
    }
    // mean optimal return over the 300 starts, computed independently
    assert!((total / 300.0 - 7.93).abs() < 1e-9);
}

#[test]
fn value_iteration_policy_is_shortest() {
    let env = Taxi::new();
    let mut q = QStore::new(500, 6, 1).unwrap();
    for _ in 0..200 {
        let mut next = q.clone();
        for s in (0..500).map(StateId) {
            for a in (0..6).map(ActionId) {
                let t = env.step(s, a).unwrap();
                let cont = if t.terminal {
                    0.0
                } else {
                    q.max_q(t.next_state)
                };
                next.write_q(s, a, t.reward + 0.9 * cont);
            }
        }
        q = next;
    }
    for &s in env.start_states() {
        let (reward, steps, delivered) = greedy_return(&env, &q, s).unwrap();
        assert!(delivered);
        assert_eq!(Some(steps), shortest_delivery(&env, s));
        assert_eq!(reward, 21.0 - steps as f64);
    }
}
