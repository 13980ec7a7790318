//! Independent oracles shared by the integration tests. Nothing here calls
//! into the code under test except to build inputs.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use rand::Rng;
use voi_arbiter::{
    seeded_rng, ActionId, Environment, QStore, StateId, Taxi, Transition, WorldModel,
};

/// Population variance as the mean squared pairwise difference halved.
pub fn variance_pairwise(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mut sum = 0.0;
    for &a in xs {
        for &b in xs {
            sum += (a - b) * (a - b);
        }
    }
    sum / (2.0 * n * n)
}

/// Softmax without the max shift; only safe for small `rho * x`.
pub fn softmax_naive(xs: &[f64], rho: f64) -> Vec<f64> {
    let e: Vec<f64> = xs.iter().map(|x| (rho * x).exp()).collect();
    let z: f64 = e.iter().sum();
    e.iter().map(|x| x / z).collect()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// `(next, count, reward, terminal)`
pub type Edge = (usize, u64, f64, bool);

/// A random stochastic MDP given as exact integer counts per successor.
pub struct RandomMdp {
    pub num_states: usize,
    pub num_actions: usize,
    /// `edges[s][a]` lists the observed successors.
    pub edges: Vec<Vec<Vec<Edge>>>,
    pub q: Vec<Vec<f64>>,
}

impl RandomMdp {
    pub fn generate(seed: u64, max_states: usize) -> Self {
        let mut rng = seeded_rng(seed);
        let num_states = rng.gen_range(2..=max_states);
        let num_actions = rng.gen_range(1..=4);
        let edges = (0..num_states)
            .map(|_| {
                (0..num_actions)
                    .map(|_| {
                        let mut nexts: Vec<usize> = (0..num_states).collect();
                        let k = rng.gen_range(1..=num_states.min(4));
                        let mut out = Vec::new();
                        for _ in 0..k {
                            let next = nexts.swap_remove(rng.gen_range(0..nexts.len()));
                            out.push((
                                next,
                                rng.gen_range(1..=5),
                                rng.gen_range(-10..=20) as f64,
                                rng.gen_bool(0.15),
                            ));
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        let q = (0..num_states)
            .map(|_| (0..num_actions).map(|_| rng.gen_range(-5.0..5.0)).collect())
            .collect();
        RandomMdp {
            num_states,
            num_actions,
            edges,
            q,
        }
    }

    /// Feeds every edge into a model as many times as its count.
    pub fn observed_model(&self) -> WorldModel {
        let mut model = WorldModel::new(self.num_states, self.num_actions);
        for s in 0..self.num_states {
            for a in 0..self.num_actions {
                for &(next, count, reward, terminal) in &self.edges[s][a] {
                    let t = Transition {
                        next_state: StateId(next),
                        reward,
                        terminal,
                    };
                    for _ in 0..count {
                        model.observe(StateId(s), ActionId(a), &t);
                    }
                }
            }
        }
        model
    }

    pub fn store(&self) -> QStore {
        let mut q = QStore::new(self.num_states, self.num_actions, 10).unwrap();
        for s in 0..self.num_states {
            for a in 0..self.num_actions {
                q.write_q(StateId(s), ActionId(a), self.q[s][a]);
            }
        }
        q
    }

    /// Finite-horizon value iteration: full sweeps from the Q-table leaves.
    pub fn value_iteration(&self, depth: usize, gamma: f64) -> Vec<Vec<f64>> {
        let mut qd = self.q.clone();
        for _ in 0..depth {
            let v: Vec<f64> = qd
                .iter()
                .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                .collect();
            qd = (0..self.num_states)
                .map(|s| {
                    (0..self.num_actions)
                        .map(|a| {
                            let total: u64 = self.edges[s][a].iter().map(|e| e.1).sum();
                            self.edges[s][a]
                                .iter()
                                .map(|&(next, count, r, term)| {
                                    let cont = if term { 0.0 } else { v[next] };
                                    count as f64 / total as f64 * (r + gamma * cont)
                                })
                                .sum()
                        })
                        .collect()
                })
                .collect();
        }
        qd
    }
}

/// Fewest steps to a delivery from `start`, by breadth-first search.
pub fn shortest_delivery(env: &Taxi, start: StateId) -> Option<usize> {
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((s, d)) = queue.pop_front() {
        for a in 0..env.num_actions() {
            let t = env.step(s, ActionId(a)).unwrap();
            if t.terminal {
                return Some(d + 1);
            }
            if seen.insert(t.next_state) {
                queue.push_back((t.next_state, d + 1));
            }
        }
    }
    None
}
