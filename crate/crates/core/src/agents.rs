//! The three learners: the VoI arbiter, plain Q-learning and Q-learning with
//! experience replay.
//!
//! All agents share the same episode skeleton and consume their generator in
//! the same order: one draw for the start state, then one softmax draw per
//! step, then (replay only) the minibatch indices. That ordering is what makes
//! the reduction properties hold bit for bit.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::{ActionId, Environment, StateId, Transition};
use crate::error::{Error, Result};
use crate::harness::EpisodeRecord;
use crate::value_store::{QStore, SoftmaxParams, DEFAULT_HISTORY_WINDOW};
use crate::world_model::{PlanConfig, WorldModel};

/// Experience replay settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayConfig {
    pub capacity: usize,
    /// Transitions replayed after every real update; 0 disables replay.
    pub batch_size: usize,
}

impl Default for ReplayConfig {
    fn default() -> Self {
        ReplayConfig {
            capacity: 50_000,
            batch_size: 32,
        }
    }
}

/// Hyperparameters shared by all agents. Defaults are the published ones.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArbiterConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub max_depth: usize,
    /// Softmax inverse temperature.
    pub rho: f64,
    /// Initial VoI threshold; may be `inf` to disable planning.
    pub voi_threshold: f64,
    /// Threshold multiplier applied after every episode.
    pub voi_mult: f64,
    pub epsilon: f64,
    pub history_window: usize,
    pub replay: ReplayConfig,
}

impl Default for ArbiterConfig {
    fn default() -> Self {
        ArbiterConfig {
            alpha: 0.8,
            gamma: 0.9,
            max_depth: 2,
            rho: 0.9,
            voi_threshold: 0.1,
            voi_mult: 1.005,
            epsilon: 1e-6,
            history_window: DEFAULT_HISTORY_WINDOW,
            replay: ReplayConfig::default(),
        }
    }
}

impl ArbiterConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return fail(format!("alpha must be in (0, 1], got {}", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return fail(format!("gamma must be in [0, 1], got {}", self.gamma));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return fail(format!("rho must be finite and > 0, got {}", self.rho));
        }
        if self.voi_threshold.is_nan() || self.voi_threshold < 0.0 {
            return fail(format!(
                "voi_threshold must be >= 0, got {}",
                self.voi_threshold
            ));
        }
        if !(self.voi_mult >= 1.0 && self.voi_mult.is_finite()) {
            return fail(format!("voi_mult must be >= 1, got {}", self.voi_mult));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return fail(format!("epsilon must be > 0, got {}", self.epsilon));
        }
        if self.history_window == 0 {
            return fail("history_window must be positive".into());
        }
        if self.replay.capacity == 0 {
            return fail("replay capacity must be positive".into());
        }
        Ok(())
    }

    pub fn softmax(&self) -> SoftmaxParams {
        SoftmaxParams::new(self.rho).expect("validated rho")
    }

    pub fn plan(&self) -> PlanConfig {
        PlanConfig {
            max_depth: self.max_depth,
            gamma: self.gamma,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Arbiter,
    Qlearning,
    Replay,
}

impl AgentKind {
    pub const ALL: [AgentKind; 3] = [AgentKind::Arbiter, AgentKind::Replay, AgentKind::Qlearning];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Arbiter => "arbiter",
            AgentKind::Qlearning => "qlearning",
            AgentKind::Replay => "replay",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arbiter" => Ok(AgentKind::Arbiter),
            "qlearning" => Ok(AgentKind::Qlearning),
            "replay" => Ok(AgentKind::Replay),
            other => Err(Error::Config(format!(
                "unknown agent `{other}` (expected arbiter, qlearning or replay)"
            ))),
        }
    }
}

/// Model-based / model-free evaluation counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepTrace {
    pub mb_evals: u64,
    pub mf_evals: u64,
}

impl std::ops::AddAssign for StepTrace {
    fn add_assign(&mut self, rhs: Self) {
        self.mb_evals += rhs.mb_evals;
        self.mf_evals += rhs.mf_evals;
    }
}

/// `C(s,a) / (sigma(s) + epsilon)`: history variance of the pair over the
/// spread of the state's current values.
pub fn voi(s: StateId, a: ActionId, q: &QStore, epsilon: f64) -> f64 {
    q.pair_uncertainty(s, a) / (q.state_spread(s) + epsilon)
}

/// One Q-learning step toward `r + gamma * max_a' q[next][a']`, committed
/// through [`QStore::write_q`].
pub fn q_update(
    q: &mut QStore,
    s: StateId,
    a: ActionId,
    t: &Transition,
    alpha: f64,
    gamma: f64,
) -> f64 {
    let bootstrap = if t.terminal {
        0.0
    } else {
        q.max_q(t.next_state)
    };
    let old = q.get(s, a);
    let value = old + alpha * (t.reward + gamma * bootstrap - old);
    q.write_q(s, a, value);
    value
}

/// Decision and learning hooks driven by the shared episode loop.
trait Learner {
    fn choose<R: Rng + ?Sized>(&mut self, s: StateId, rng: &mut R) -> (ActionId, StepTrace);

    fn learn<R: Rng + ?Sized>(&mut self, s: StateId, a: ActionId, t: &Transition, rng: &mut R);
}

fn run_episode<E, R, L>(
    env: &E,
    rng: &mut R,
    index: usize,
    voi_threshold: f64,
    learner: &mut L,
) -> Result<EpisodeRecord>
where
    E: Environment,
    R: Rng + ?Sized,
    L: Learner,
{
    let mut state = env.reset(rng);
    let mut total_reward = 0.0;
    let mut trace = StepTrace::default();
    let mut steps = 0;
    let mut terminal = false;
    while steps < env.step_cap() {
        let (action, delta) = learner.choose(state, rng);
        trace += delta;
        let t = env.step(state, action)?;
        learner.learn(state, action, &t, rng);
        total_reward += t.reward;
        steps += 1;
        if t.terminal {
            terminal = true;
            break;
        }
        state = t.next_state;
    }
    Ok(EpisodeRecord {
        episode_index: index,
        total_reward,
        steps,
        mb_evals: trace.mb_evals,
        mf_evals: trace.mf_evals,
        voi_threshold,
        truncated: !terminal,
    })
}

/// Arbitrates per action between a depth-limited model-based backup and the
/// cached model-free value.
#[derive(Clone, Debug)]
pub struct Arbiter {
    cfg: ArbiterConfig,
    q: QStore,
    model: WorldModel,
    threshold: f64,
    evaluated: Vec<bool>,
}

impl Arbiter {
    pub fn new(num_states: usize, num_actions: usize, cfg: ArbiterConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Arbiter {
            q: QStore::new(num_states, num_actions, cfg.history_window)?,
            model: WorldModel::new(num_states, num_actions),
            threshold: cfg.voi_threshold,
            evaluated: vec![false; num_states * num_actions],
            cfg,
        })
    }

    pub fn for_env<E: Environment>(env: &E, cfg: ArbiterConfig) -> Result<Self> {
        Self::new(env.num_states(), env.num_actions(), cfg)
    }

    pub fn q(&self) -> &QStore {
        &self.q
    }

    pub fn model(&self) -> &WorldModel {
        &self.model
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn config(&self) -> &ArbiterConfig {
        &self.cfg
    }

    /// Arbitration signal used by the gate. A pair that has never been
    /// evaluated reports `f64::MAX`, so it gets one model-based evaluation
    /// under any finite threshold and none when the threshold is infinite.
    pub fn gate_voi(&self, s: StateId, a: ActionId) -> f64 {
        if self.evaluated[s.0 * self.q.num_actions() + a.0] {
            voi(s, a, &self.q, self.cfg.epsilon)
        } else {
            f64::MAX
        }
    }

    /// Evaluates every action of `s` (planning those whose VoI reaches the
    /// threshold) and then softmax-samples an action from the refreshed row.
    pub fn decide<R: Rng + ?Sized>(&mut self, s: StateId, rng: &mut R) -> (ActionId, StepTrace) {
        let mut trace = StepTrace::default();
        let plan = self.cfg.plan();
        for a in (0..self.q.num_actions()).map(ActionId) {
            let signal = self.gate_voi(s, a);
            if signal >= self.threshold {
                let pair = s.0 * self.q.num_actions() + a.0;
                if !self.evaluated[pair] {
                    // seed the history with the cached value so the backup
                    // that follows gives the pair a variance
                    let cached = self.q.get(s, a);
                    self.q.write_q(s, a, cached);
                }
                self.model
                    .plan_backup(s, a, plan.max_depth, &mut self.q, &plan);
                trace.mb_evals += 1;
            } else {
                trace.mf_evals += 1;
            }
            self.evaluated[s.0 * self.q.num_actions() + a.0] = true;
        }
        let action = self.q.softmax_select(s, self.cfg.softmax(), rng);
        (action, trace)
    }

    /// Learns from one real transition: model first, then the Q-update.
    pub fn learn(&mut self, s: StateId, a: ActionId, t: &Transition) {
        self.model.observe(s, a, t);
        q_update(&mut self.q, s, a, t, self.cfg.alpha, self.cfg.gamma);
    }

    /// Runs one episode and then scales the threshold by `voi_mult`. The
    /// record carries the threshold that was in force during the episode.
    pub fn run_episode<E: Environment, R: Rng + ?Sized>(
        &mut self,
        env: &E,
        rng: &mut R,
        index: usize,
    ) -> Result<EpisodeRecord> {
        let record = run_episode(env, rng, index, self.threshold, self)?;
        self.threshold *= self.cfg.voi_mult;
        Ok(record)
    }
}

impl Learner for Arbiter {
    fn choose<R: Rng + ?Sized>(&mut self, s: StateId, rng: &mut R) -> (ActionId, StepTrace) {
        self.decide(s, rng)
    }

    fn learn<R: Rng + ?Sized>(&mut self, s: StateId, a: ActionId, t: &Transition, _: &mut R) {
        Arbiter::learn(self, s, a, t)
    }
}

/// Plain tabular Q-learning with softmax exploration.
#[derive(Clone, Debug)]
pub struct QLearner {
    cfg: ArbiterConfig,
    q: QStore,
}

impl QLearner {
    pub fn new(num_states: usize, num_actions: usize, cfg: ArbiterConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(QLearner {
            q: QStore::new(num_states, num_actions, cfg.history_window)?,
            cfg,
        })
    }

    pub fn for_env<E: Environment>(env: &E, cfg: ArbiterConfig) -> Result<Self> {
        Self::new(env.num_states(), env.num_actions(), cfg)
    }

    pub fn q(&self) -> &QStore {
        &self.q
    }

    pub fn run_episode<E: Environment, R: Rng + ?Sized>(
        &mut self,
        env: &E,
        rng: &mut R,
        index: usize,
    ) -> Result<EpisodeRecord> {
        run_episode(env, rng, index, f64::INFINITY, self)
    }
}

/// Every action counts as one model-free evaluation.
fn model_free_trace(q: &QStore) -> StepTrace {
    StepTrace {
        mb_evals: 0,
        mf_evals: q.num_actions() as u64,
    }
}

impl Learner for QLearner {
    fn choose<R: Rng + ?Sized>(&mut self, s: StateId, rng: &mut R) -> (ActionId, StepTrace) {
        (
            self.q.softmax_select(s, self.cfg.softmax(), rng),
            model_free_trace(&self.q),
        )
    }

    fn learn<R: Rng + ?Sized>(&mut self, s: StateId, a: ActionId, t: &Transition, _: &mut R) {
        q_update(&mut self.q, s, a, t, self.cfg.alpha, self.cfg.gamma);
    }
}

/// One stored real transition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Experience {
    pub state: StateId,
    pub action: ActionId,
    pub transition: Transition,
}

/// Bounded FIFO of past transitions with uniform sampling.
#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    capacity: usize,
    batch_size: usize,
    entries: VecDeque<Experience>,
}

impl ReplayBuffer {
    pub fn new(cfg: ReplayConfig) -> Result<Self> {
        if cfg.capacity == 0 {
            return Err(Error::Config("replay capacity must be positive".into()));
        }
        Ok(ReplayBuffer {
            capacity: cfg.capacity,
            batch_size: cfg.batch_size,
            entries: VecDeque::with_capacity(cfg.capacity.min(1 << 16)),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    /// Appends, evicting the oldest entry when full.
    pub fn push(&mut self, e: Experience) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(e);
    }

    pub fn get(&self, i: usize) -> Option<&Experience> {
        self.entries.get(i)
    }

    /// `batch_size` indices drawn uniformly with replacement, or nothing while
    /// the buffer holds fewer than `batch_size` entries.
    pub fn sample_indices<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        if self.batch_size == 0 || self.entries.len() < self.batch_size {
            return Vec::new();
        }
        (0..self.batch_size)
            .map(|_| rng.gen_range(0..self.entries.len()))
            .collect()
    }
}

/// Q-learning that replays a uniform minibatch of stored transitions after
/// every real update.
#[derive(Clone, Debug)]
pub struct ReplayAgent {
    cfg: ArbiterConfig,
    q: QStore,
    buffer: ReplayBuffer,
}

impl ReplayAgent {
    pub fn new(num_states: usize, num_actions: usize, cfg: ArbiterConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(ReplayAgent {
            q: QStore::new(num_states, num_actions, cfg.history_window)?,
            buffer: ReplayBuffer::new(cfg.replay)?,
            cfg,
        })
    }

    pub fn for_env<E: Environment>(env: &E, cfg: ArbiterConfig) -> Result<Self> {
        Self::new(env.num_states(), env.num_actions(), cfg)
    }

    pub fn q(&self) -> &QStore {
        &self.q
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn run_episode<E: Environment, R: Rng + ?Sized>(
        &mut self,
        env: &E,
        rng: &mut R,
        index: usize,
    ) -> Result<EpisodeRecord> {
        run_episode(env, rng, index, f64::INFINITY, self)
    }
}

impl Learner for ReplayAgent {
    fn choose<R: Rng + ?Sized>(&mut self, s: StateId, rng: &mut R) -> (ActionId, StepTrace) {
        (
            self.q.softmax_select(s, self.cfg.softmax(), rng),
            model_free_trace(&self.q),
        )
    }

    fn learn<R: Rng + ?Sized>(&mut self, s: StateId, a: ActionId, t: &Transition, rng: &mut R) {
        let (alpha, gamma) = (self.cfg.alpha, self.cfg.gamma);
        self.buffer.push(Experience {
            state: s,
            action: a,
            transition: *t,
        });
        q_update(&mut self.q, s, a, t, alpha, gamma);
        for i in self.buffer.sample_indices(rng) {
            let e = self.buffer.entries[i];
            q_update(&mut self.q, e.state, e.action, &e.transition, alpha, gamma);
        }
    }
}

/// Any of the three agents behind one interface.
#[derive(Clone, Debug)]
pub enum AnyAgent {
    Arbiter(Arbiter),
    Qlearning(QLearner),
    Replay(ReplayAgent),
}

impl AnyAgent {
    pub fn new<E: Environment>(kind: AgentKind, env: &E, cfg: ArbiterConfig) -> Result<Self> {
        Ok(match kind {
            AgentKind::Arbiter => AnyAgent::Arbiter(Arbiter::for_env(env, cfg)?),
            AgentKind::Qlearning => AnyAgent::Qlearning(QLearner::for_env(env, cfg)?),
            AgentKind::Replay => AnyAgent::Replay(ReplayAgent::for_env(env, cfg)?),
        })
    }

    pub fn kind(&self) -> AgentKind {
        match self {
            AnyAgent::Arbiter(_) => AgentKind::Arbiter,
            AnyAgent::Qlearning(_) => AgentKind::Qlearning,
            AnyAgent::Replay(_) => AgentKind::Replay,
        }
    }

    pub fn q(&self) -> &QStore {
        match self {
            AnyAgent::Arbiter(a) => a.q(),
            AnyAgent::Qlearning(a) => a.q(),
            AnyAgent::Replay(a) => a.q(),
        }
    }

    pub fn run_episode<E: Environment, R: Rng + ?Sized>(
        &mut self,
        env: &E,
        rng: &mut R,
        index: usize,
    ) -> Result<EpisodeRecord> {
        match self {
            AnyAgent::Arbiter(a) => a.run_episode(env, rng, index),
            AnyAgent::Qlearning(a) => a.run_episode(env, rng, index),
            AnyAgent::Replay(a) => a.run_episode(env, rng, index),
        }
    }
}
