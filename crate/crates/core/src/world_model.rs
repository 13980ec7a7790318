//! Count-based model of the environment and depth-limited lookahead over it.
//!
//! The model only learns from real transitions. Planning reads the model and
//! the cached Q-values and writes back a single value for the root pair.

use std::collections::HashMap;
use std::io::Write;

use crate::env::{ActionId, StateId, Transition};
use crate::error::{Error, Result};
use crate::value_store::QStore;

#[derive(Clone, Debug, PartialEq)]
struct Successor {
    next: StateId,
    count: u64,
    reward_sum: f64,
    terminal: bool,
}

/// Lookahead settings: horizon and discount.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanConfig {
    pub max_depth: usize,
    pub gamma: f64,
}

impl PlanConfig {
    pub fn new(max_depth: usize, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::Config(format!(
                "gamma must be in [0, 1], got {gamma}"
            )));
        }
        Ok(PlanConfig { max_depth, gamma })
    }
}

/// Observed successor of a state-action pair with its estimates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub next: StateId,
    pub probability: f64,
    pub reward: f64,
    pub terminal: bool,
}

/// Sparse transition counts and reward sums per `(s, a)`.
#[derive(Clone, Debug)]
pub struct WorldModel {
    num_states: usize,
    num_actions: usize,
    edges: Vec<Vec<Successor>>,
    totals: Vec<u64>,
}

impl WorldModel {
    pub fn new(num_states: usize, num_actions: usize) -> Self {
        let pairs = num_states * num_actions;
        WorldModel {
            num_states,
            num_actions,
            edges: vec![Vec::new(); pairs],
            totals: vec![0; pairs],
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    #[inline]
    fn pair(&self, s: StateId, a: ActionId) -> usize {
        debug_assert!(s.0 < self.num_states && a.0 < self.num_actions);
        s.0 * self.num_actions + a.0
    }

    /// Records one real transition.
    pub fn observe(&mut self, s: StateId, a: ActionId, t: &Transition) {
        let pair = self.pair(s, a);
        self.totals[pair] += 1;
        let edges = &mut self.edges[pair];
        match edges.iter_mut().find(|e| e.next == t.next_state) {
            Some(edge) => {
                edge.count += 1;
                edge.reward_sum += t.reward;
                edge.terminal |= t.terminal;
            }
            None => edges.push(Successor {
                next: t.next_state,
                count: 1,
                reward_sum: t.reward,
                terminal: t.terminal,
            }),
        }
    }

    pub fn is_observed(&self, s: StateId, a: ActionId) -> bool {
        self.totals[self.pair(s, a)] > 0
    }

    pub fn visits(&self, s: StateId, a: ActionId) -> u64 {
        self.totals[self.pair(s, a)]
    }

    /// Estimated `P(next | s, a)`; zero for unobserved pairs or successors.
    pub fn probability(&self, s: StateId, a: ActionId, next: StateId) -> f64 {
        let pair = self.pair(s, a);
        self.edges[pair]
            .iter()
            .find(|e| e.next == next)
            .map_or(0.0, |e| e.count as f64 / self.totals[pair] as f64)
    }

    /// Mean observed reward for `(s, a, next)`.
    pub fn reward_estimate(&self, s: StateId, a: ActionId, next: StateId) -> Option<f64> {
        self.edges[self.pair(s, a)]
            .iter()
            .find(|e| e.next == next)
            .map(|e| e.reward_sum / e.count as f64)
    }

    /// Observed successors of `(s, a)` in first-seen order.
    pub fn successors(&self, s: StateId, a: ActionId) -> impl Iterator<Item = Estimate> + '_ {
        let pair = self.pair(s, a);
        let total = self.totals[pair] as f64;
        self.edges[pair].iter().map(move |e| Estimate {
            next: e.next,
            probability: e.count as f64 / total,
            reward: e.reward_sum / e.count as f64,
            terminal: e.terminal,
        })
    }

    /// Depth-limited Bellman backup of `(s, a)` without touching the store.
    ///
    /// `B_0(s, a) = q[s][a]`; for `d >= 1`,
    /// `B_d(s, a) = sum_s' P(s'|s,a) * (R(s,a,s') + gamma * max_a' B_{d-1}(s', a'))`
    /// with zero continuation after terminal successors. Pairs the model has
    /// never seen fall back to their cached value at any depth.
    pub fn lookahead(&self, s: StateId, a: ActionId, depth: usize, q: &QStore, gamma: f64) -> f64 {
        let mut memo = HashMap::new();
        self.backup(s, a, depth, q, gamma, &mut memo)
    }

    fn backup(
        &self,
        s: StateId,
        a: ActionId,
        depth: usize,
        q: &QStore,
        gamma: f64,
        memo: &mut HashMap<(usize, usize), f64>,
    ) -> f64 {
        let pair = self.pair(s, a);
        if depth == 0 || self.totals[pair] == 0 {
            return q.get(s, a);
        }
        let total = self.totals[pair] as f64;
        let mut value = 0.0;
        for e in &self.edges[pair] {
            let p = e.count as f64 / total;
            let r = e.reward_sum / e.count as f64;
            let continuation = if e.terminal {
                0.0
            } else {
                self.state_value(e.next, depth - 1, q, gamma, memo)
            };
            value += p * (r + gamma * continuation);
        }
        value
    }

    fn state_value(
        &self,
        s: StateId,
        depth: usize,
        q: &QStore,
        gamma: f64,
        memo: &mut HashMap<(usize, usize), f64>,
    ) -> f64 {
        if depth == 0 {
            return q.max_q(s);
        }
        if let Some(&v) = memo.get(&(s.0, depth)) {
            return v;
        }
        let v = (0..self.num_actions)
            .map(|a| self.backup(s, ActionId(a), depth, q, gamma, memo))
            .fold(f64::NEG_INFINITY, f64::max);
        memo.insert((s.0, depth), v);
        v
    }

    /// Runs [`WorldModel::lookahead`] and commits the result to `q[s][a]`,
    /// which also appends it to the pair's history.
    pub fn plan_backup(
        &self,
        s: StateId,
        a: ActionId,
        depth: usize,
        q: &mut QStore,
        cfg: &PlanConfig,
    ) -> f64 {
        let value = self.lookahead(s, a, depth, q, cfg.gamma);
        q.write_q(s, a, value);
        value
    }

    /// Dumps observed transitions as `s,a,next,probability,reward` lines.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "s,a,next,probability,reward")?;
        for s in 0..self.num_states {
            for a in 0..self.num_actions {
                for e in self.successors(StateId(s), ActionId(a)) {
                    writeln!(out, "{s},{a},{},{},{}", e.next, e.probability, e.reward)?;
                }
            }
        }
        Ok(())
    }
}
