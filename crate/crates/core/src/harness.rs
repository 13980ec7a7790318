//! Seeded multi-run experiments.
//!
//! Run `i` of an experiment uses seed `base_seed + i` and owns all of its
//! state, so runs execute in parallel and are merged by run index.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{AgentKind, AnyAgent, ArbiterConfig};
use crate::env::{Environment, StateId};
use crate::error::{Error, Result};
use crate::seeded_rng;
use crate::value_store::QStore;

/// Trailing window for the final-performance statistics and the solve test.
pub const FINAL_WINDOW: usize = 100;
/// Moving-average reward at which an agent counts as having solved the task.
pub const SOLVE_THRESHOLD: f64 = 0.0;

/// Metrics of one training episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode_index: usize,
    pub total_reward: f64,
    pub steps: usize,
    pub mb_evals: u64,
    pub mf_evals: u64,
    pub voi_threshold: f64,
    /// Hit the step cap without delivering.
    pub truncated: bool,
}

/// One independent training run.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub seed: u64,
    pub records: Vec<EpisodeRecord>,
    /// Final Q-table, row-major with `num_actions` columns.
    pub final_q: Vec<f64>,
    pub num_actions: usize,
    /// Mean greedy return of the final Q-table over every start state.
    pub final_greedy: f64,
}

/// Cross-run aggregates. Every per-episode vector has one entry per episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub agent: AgentKind,
    pub num_runs: usize,
    pub num_episodes: usize,
    pub base_seed: u64,
    pub mean_reward: Vec<f64>,
    /// Population standard deviation across runs.
    pub std_reward: Vec<f64>,
    pub mean_steps: Vec<f64>,
    pub mean_mb_evals: Vec<f64>,
    pub mean_mf_evals: Vec<f64>,
    pub final_window: usize,
    /// Mean over runs of each run's mean reward in the final window.
    pub final_mean: f64,
    /// Standard deviation over runs of the same per-run window means.
    pub final_std: f64,
    /// First episode (1-based) whose trailing `FINAL_WINDOW`-episode average
    /// of `mean_reward` reaches [`SOLVE_THRESHOLD`].
    pub episodes_to_solve: Option<usize>,
    /// Mean and standard deviation over runs of [`RunResult::final_greedy`];
    /// `None` when built from bare records. Diagnostic only.
    pub final_greedy_mean: Option<f64>,
    pub final_greedy_std: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub summary: ExperimentSummary,
    pub runs: Vec<RunResult>,
}

/// Trains a fresh agent for `num_episodes` episodes from `seed` and hands
/// back the trained agent with its records.
pub fn train_agent<E: Environment>(
    kind: AgentKind,
    env: &E,
    cfg: &ArbiterConfig,
    num_episodes: usize,
    seed: u64,
) -> Result<(AnyAgent, Vec<EpisodeRecord>)> {
    let mut agent = AnyAgent::new(kind, env, *cfg)?;
    let mut rng = seeded_rng(seed);
    let records = (0..num_episodes)
        .map(|i| agent.run_episode(env, &mut rng, i))
        .collect::<Result<Vec<_>>>()?;
    Ok((agent, records))
}

pub fn run_single<E: Environment>(
    kind: AgentKind,
    env: &E,
    cfg: &ArbiterConfig,
    num_episodes: usize,
    seed: u64,
) -> Result<RunResult> {
    let (agent, records) = train_agent(kind, env, cfg, num_episodes, seed)?;
    Ok(RunResult {
        seed,
        records,
        final_greedy: mean_greedy_return(env, agent.q())?,
        final_q: agent.q().values().to_vec(),
        num_actions: agent.q().num_actions(),
    })
}

/// Return of the greedy policy of `q` from `start`, capped at the
/// environment's horizon. Returns `(reward, steps, delivered)`.
pub fn greedy_return<E: Environment>(
    env: &E,
    q: &QStore,
    start: StateId,
) -> Result<(f64, usize, bool)> {
    let mut state = start;
    let mut reward = 0.0;
    for step in 1..=env.step_cap() {
        let t = env.step(state, q.greedy(state))?;
        reward += t.reward;
        if t.terminal {
            return Ok((reward, step, true));
        }
        state = t.next_state;
    }
    Ok((reward, env.step_cap(), false))
}

/// Greedy return averaged uniformly over every start state.
pub fn mean_greedy_return<E: Environment>(env: &E, q: &QStore) -> Result<f64> {
    let starts = env.start_states();
    let mut total = 0.0;
    for &s in starts {
        total += greedy_return(env, q, s)?.0;
    }
    Ok(total / starts.len() as f64)
}

/// Runs `num_runs` independent agents with seeds `base_seed..base_seed + num_runs`.
pub fn run_experiment<E: Environment + Sync>(
    kind: AgentKind,
    env: &E,
    cfg: &ArbiterConfig,
    num_runs: usize,
    num_episodes: usize,
    base_seed: u64,
) -> Result<Experiment> {
    if num_runs == 0 || num_episodes == 0 {
        return Err(Error::Config(
            "need at least one run and one episode".into(),
        ));
    }
    cfg.validate()?;
    let runs = (0..num_runs as u64)
        .into_par_iter()
        .map(|i| run_single(kind, env, cfg, num_episodes, base_seed.wrapping_add(i)))
        .collect::<Result<Vec<_>>>()?;
    let records: Vec<&[EpisodeRecord]> = runs.iter().map(|r| r.records.as_slice()).collect();
    let mut summary = summarize(kind, base_seed, &records)?;
    let (greedy_mean, greedy_std) = mean_std(runs.iter().map(|r| r.final_greedy));
    summary.final_greedy_mean = Some(greedy_mean);
    summary.final_greedy_std = Some(greedy_std);
    Ok(Experiment { summary, runs })
}

/// Aggregates per-run records (all runs must have the same length).
pub fn summarize(
    agent: AgentKind,
    base_seed: u64,
    runs: &[&[EpisodeRecord]],
) -> Result<ExperimentSummary> {
    let num_runs = runs.len();
    let num_episodes = runs.first().map_or(0, |r| r.len());
    if num_runs == 0 || num_episodes == 0 {
        return Err(Error::Config("nothing to summarize".into()));
    }
    if runs.iter().any(|r| r.len() != num_episodes) {
        return Err(Error::Config("runs have different episode counts".into()));
    }
    let column = |f: &dyn Fn(&EpisodeRecord) -> f64| -> Vec<(f64, f64)> {
        (0..num_episodes)
            .map(|e| mean_std(runs.iter().map(|r| f(&r[e]))))
            .collect()
    };
    let reward = column(&|r| r.total_reward);
    let window = FINAL_WINDOW.min(num_episodes);
    let (final_mean, final_std) = mean_std(runs.iter().map(|r| {
        r[num_episodes - window..]
            .iter()
            .map(|x| x.total_reward)
            .sum::<f64>()
            / window as f64
    }));
    let mean_reward: Vec<f64> = reward.iter().map(|x| x.0).collect();
    Ok(ExperimentSummary {
        agent,
        num_runs,
        num_episodes,
        base_seed,
        episodes_to_solve: episodes_to_solve(&mean_reward, FINAL_WINDOW, SOLVE_THRESHOLD),
        std_reward: reward.iter().map(|x| x.1).collect(),
        mean_reward,
        mean_steps: column(&|r| r.steps as f64)
            .into_iter()
            .map(|x| x.0)
            .collect(),
        mean_mb_evals: column(&|r| r.mb_evals as f64)
            .into_iter()
            .map(|x| x.0)
            .collect(),
        mean_mf_evals: column(&|r| r.mf_evals as f64)
            .into_iter()
            .map(|x| x.0)
            .collect(),
        final_window: window,
        final_mean,
        final_std,
        final_greedy_mean: None,
        final_greedy_std: None,
    })
}

/// Mean and population standard deviation (two-pass).
pub fn mean_std<I: IntoIterator<Item = f64>>(xs: I) -> (f64, f64) {
    let xs: Vec<f64> = xs.into_iter().collect();
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// First 1-based episode `e >= window` with `mean(curve[e - window..e]) >= threshold`.
pub fn episodes_to_solve(curve: &[f64], window: usize, threshold: f64) -> Option<usize> {
    if window == 0 || curve.len() < window {
        return None;
    }
    let mut sum: f64 = curve[..window].iter().sum();
    if sum / window as f64 >= threshold {
        return Some(window);
    }
    for e in window..curve.len() {
        sum += curve[e] - curve[e - window];
        if sum / window as f64 >= threshold {
            return Some(e + 1);
        }
    }
    None
}

/// Side-by-side experiments sharing one seed schedule.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub experiments: Vec<Experiment>,
}

impl Comparison {
    pub fn get(&self, kind: AgentKind) -> Option<&Experiment> {
        self.experiments.iter().find(|e| e.summary.agent == kind)
    }

    /// Agents ordered by `episodes_to_solve`, unsolved last.
    pub fn solve_order(&self) -> Vec<(AgentKind, Option<usize>)> {
        let mut order: Vec<_> = self
            .experiments
            .iter()
            .map(|e| (e.summary.agent, e.summary.episodes_to_solve))
            .collect();
        order.sort_by_key(|&(_, e)| e.unwrap_or(usize::MAX));
        order
    }
}

pub fn compare<E: Environment + Sync>(
    agents: &[AgentKind],
    env: &E,
    cfg: &ArbiterConfig,
    num_runs: usize,
    num_episodes: usize,
    base_seed: u64,
) -> Result<Comparison> {
    let experiments = agents
        .iter()
        .map(|&kind| run_experiment(kind, env, cfg, num_runs, num_episodes, base_seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(Comparison { experiments })
}
