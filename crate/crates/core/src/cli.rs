//! The `run`, `compare` and `inspect` commands behind the `voi-arbiter`
//! binary. Each command returns the text it wants printed and the artifacts
//! it wrote; the binary only parses arguments and maps errors to exit codes.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use crate::agents::{AgentKind, AnyAgent};
use crate::config::RunConfig;
use crate::env::{Environment, Taxi};
use crate::error::{Error, Result};
use crate::harness::{compare, run_experiment, train_agent};
use crate::report::{policy_report, summary_text, write_compare_artifacts, write_run_artifacts};
use crate::value_store::QStore;

#[derive(Debug)]
pub struct Outcome {
    pub message: String,
    pub artifacts: Vec<PathBuf>,
}

/// Trains `cfg.agent` over the configured runs and writes its CSV, JSON and
/// Q-table. With `dump_model` an arbiter also writes its learned transition
/// table (first seed only).
pub fn cmd_run(cfg: &RunConfig, dump_model: bool) -> Result<Outcome> {
    cfg.validate()?;
    if dump_model && cfg.agent != AgentKind::Arbiter {
        return Err(Error::Config(
            "only the arbiter learns a transition model".into(),
        ));
    }
    let env = Taxi::new();
    let experiment = run_experiment(
        cfg.agent,
        &env,
        &cfg.params,
        cfg.num_runs,
        cfg.num_episodes,
        cfg.base_seed,
    )?;
    let mut artifacts = write_run_artifacts(cfg, &experiment, &cfg.out_dir)?;
    if dump_model {
        // same seed as run 0, so this replays that run exactly
        let (agent, _) = train_agent(
            cfg.agent,
            &env,
            &cfg.params,
            cfg.num_episodes,
            cfg.base_seed,
        )?;
        if let AnyAgent::Arbiter(arbiter) = agent {
            let path = cfg.out_dir.join("arbiter_model.csv");
            let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            arbiter
                .model()
                .write_csv(std::io::BufWriter::new(file))
                .map_err(|e| Error::io(&path, e))?;
            artifacts.push(path);
        }
    }
    Ok(Outcome {
        message: summary_text(&experiment.summary),
        artifacts,
    })
}

/// Runs all three agents on the same seed schedule and writes the comparison
/// JSON plus the reward and arbitration charts.
pub fn cmd_compare(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let env = Taxi::new();
    let cmp = compare(
        &AgentKind::ALL,
        &env,
        &cfg.params,
        cfg.num_runs,
        cfg.num_episodes,
        cfg.base_seed,
    )?;
    let artifacts = write_compare_artifacts(cfg, &cmp, &cfg.out_dir)?;
    let mut message: Vec<String> = cmp
        .experiments
        .iter()
        .map(|e| summary_text(&e.summary))
        .collect();
    let order: Vec<String> = cmp
        .solve_order()
        .into_iter()
        .map(|(k, e)| format!("{k} ({})", e.map_or("unsolved".into(), |e| e.to_string())))
        .collect();
    message.push(format!("solve order: {}", order.join(" < ")));
    Ok(Outcome {
        message: message.join("\n"),
        artifacts,
    })
}

/// Reads a 500x6 Taxi Q-table CSV and reports its greedy policy.
pub fn cmd_inspect(path: &Path) -> Result<Outcome> {
    let env = Taxi::new();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let q = QStore::read_csv(BufReader::new(file), env.num_states(), env.num_actions(), 1)
        .map_err(|e| match e {
            Error::Dimensions { .. } | Error::Parse { .. } => Error::Parse {
                path: path.to_path_buf(),
                message: e.to_string(),
            },
            other => other,
        })?;
    Ok(Outcome {
        message: policy_report(&env, &q)?,
        artifacts: Vec::new(),
    })
}
