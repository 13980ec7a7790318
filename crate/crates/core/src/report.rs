//! CSV, JSON and SVG artifacts for experiments.
//!
//! Per-episode CSV columns:
//! `run,episode,total_reward,steps,mb_evals,mf_evals,voi_threshold,truncated`
//! where `run` is the 0-based run index and `episode` is 1-based.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::agents::{AgentKind, ArbiterConfig};
use crate::config::RunConfig;
use crate::env::{ActionId, Environment, StateId, Taxi, TaxiAction, TaxiState};
use crate::error::{Error, Result};
use crate::harness::{mean_greedy_return, Comparison, Experiment, ExperimentSummary, RunResult};
use crate::plot::LineChart;
use crate::value_store::QStore;

pub const EPISODE_CSV_HEADER: &str =
    "run,episode,total_reward,steps,mb_evals,mf_evals,voi_threshold,truncated";
pub const REWARD_SVG: &str = "rewards.svg";
pub const ARBITRATION_SVG: &str = "arbitration.svg";
pub const COMPARISON_JSON: &str = "comparison.json";

pub fn write_episode_csv<W: Write>(mut out: W, runs: &[RunResult]) -> std::io::Result<()> {
    writeln!(out, "{EPISODE_CSV_HEADER}")?;
    for (run, result) in runs.iter().enumerate() {
        for r in &result.records {
            writeln!(
                out,
                "{run},{},{},{},{},{},{},{}",
                r.episode_index + 1,
                r.total_reward,
                r.steps,
                r.mb_evals,
                r.mf_evals,
                r.voi_threshold,
                r.truncated
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct RunReport<'a> {
    config: &'a ArbiterConfig,
    runs: usize,
    episodes: usize,
    seed: u64,
    summary: &'a ExperimentSummary,
}

#[derive(Serialize)]
struct ComparisonReport<'a> {
    config: &'a ArbiterConfig,
    runs: usize,
    episodes: usize,
    seed: u64,
    agents: Vec<&'a ExperimentSummary>,
    /// Agent names ordered by episodes to solve, unsolved last.
    solve_order: Vec<SolveEntry>,
}

#[derive(Serialize)]
struct SolveEntry {
    agent: AgentKind,
    episodes_to_solve: Option<usize>,
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `<agent>_episodes.csv`, `<agent>_summary.json` and the Q-table of
/// the first run as `<agent>_qtable.csv`. Returns the written paths.
pub fn write_run_artifacts(
    cfg: &RunConfig,
    experiment: &Experiment,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let agent = experiment.summary.agent;
    let csv_path = dir.join(format!("{agent}_episodes.csv"));
    let mut out = create(&csv_path)?;
    write_episode_csv(&mut out, &experiment.runs)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(&csv_path, e))?;

    let json_path = dir.join(format!("{agent}_summary.json"));
    let report = RunReport {
        config: &cfg.params,
        runs: cfg.num_runs,
        episodes: cfg.num_episodes,
        seed: cfg.base_seed,
        summary: &experiment.summary,
    };
    write_text(&json_path, &serde_json::to_string_pretty(&report)?)?;

    let q_path = dir.join(format!("{agent}_qtable.csv"));
    let first = &experiment.runs[0];
    let mut out = create(&q_path)?;
    for row in first.final_q.chunks(first.num_actions) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(",")).map_err(|e| Error::io(&q_path, e))?;
    }
    out.flush().map_err(|e| Error::io(&q_path, e))?;
    Ok(vec![csv_path, json_path, q_path])
}

/// Learning curves (mean +- 1 std across runs) for every agent.
pub fn reward_chart(cmp: &Comparison) -> LineChart {
    cmp.experiments.iter().fold(
        LineChart::new("Average reward during training", "episode", "total reward"),
        |chart, e| {
            chart.series(
                e.summary.agent.name(),
                e.summary.mean_reward.clone(),
                Some(e.summary.std_reward.clone()),
            )
        },
    )
}

/// Mean model-based and model-free evaluation counts per episode.
pub fn arbitration_chart(summary: &ExperimentSummary) -> LineChart {
    LineChart::new(
        "Model-based vs model-free evaluations",
        "episode",
        "evaluations per episode",
    )
    .series("model-based", summary.mean_mb_evals.clone(), None)
    .series("model-free", summary.mean_mf_evals.clone(), None)
}

pub fn comparison_json(cfg: &RunConfig, cmp: &Comparison) -> Result<String> {
    let report = ComparisonReport {
        config: &cfg.params,
        runs: cfg.num_runs,
        episodes: cfg.num_episodes,
        seed: cfg.base_seed,
        agents: cmp.experiments.iter().map(|e| &e.summary).collect(),
        solve_order: cmp
            .solve_order()
            .into_iter()
            .map(|(agent, episodes_to_solve)| SolveEntry {
                agent,
                episodes_to_solve,
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&report)?)
}

/// Writes `comparison.json`, `rewards.svg` and (when the arbiter took part)
/// `arbitration.svg`.
pub fn write_compare_artifacts(
    cfg: &RunConfig,
    cmp: &Comparison,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    let json = dir.join(COMPARISON_JSON);
    write_text(&json, &comparison_json(cfg, cmp)?)?;
    written.push(json);
    let rewards = dir.join(REWARD_SVG);
    write_text(&rewards, &reward_chart(cmp).to_svg())?;
    written.push(rewards);
    if let Some(arbiter) = cmp.get(AgentKind::Arbiter) {
        let path = dir.join(ARBITRATION_SVG);
        write_text(&path, &arbitration_chart(&arbiter.summary).to_svg())?;
        written.push(path);
    }
    Ok(written)
}

/// Human-readable summary lines for one experiment.
pub fn summary_text(s: &ExperimentSummary) -> String {
    let solve = s.episodes_to_solve.map_or_else(
        || "not solved".to_string(),
        |e| format!("solved at episode {e}"),
    );
    let mut text = format!(
        "{:<9} runs={} episodes={} final-{} reward {:.2} ± {:.2}, {solve}",
        s.agent.name(),
        s.num_runs,
        s.num_episodes,
        s.final_window,
        s.final_mean,
        s.final_std,
    );
    if let (Some(m), Some(sd)) = (s.final_greedy_mean, s.final_greedy_std) {
        text.push_str(&format!(", greedy return {m:.2} ± {sd:.2}"));
    }
    text
}

/// Greedy policy of a Taxi Q-table, one line per state, followed by summary
/// statistics.
pub fn policy_report(env: &Taxi, q: &QStore) -> Result<String> {
    let mut text = String::new();
    let mut counts = vec![0usize; q.num_actions()];
    for s in (0..q.num_states()).map(StateId) {
        let action = q.greedy(s);
        counts[action.0] += 1;
        let name = TaxiAction::from_id(action).map_or("?", TaxiAction::name);
        let decoded = TaxiState::decode(s)?.to_string();
        text.push_str(&format!(
            "{:>3}  {decoded:<44} -> {name:<7} q={:.4}\n",
            s.0,
            q.get(s, action)
        ));
    }
    let values = q.values();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    text.push_str(&format!("q: mean {mean:.4} min {min:.4} max {max:.4}\n"));
    let hist: Vec<String> = counts
        .iter()
        .enumerate()
        .map(|(a, c)| {
            let name = TaxiAction::from_id(ActionId(a)).map_or("?", TaxiAction::name);
            format!("{name}={c}")
        })
        .collect();
    text.push_str(&format!("greedy actions: {}\n", hist.join(" ")));
    text.push_str(&format!(
        "mean greedy return over {} start states: {:.3}\n",
        env.start_states().len(),
        mean_greedy_return(env, q)?
    ));
    Ok(text)
}
