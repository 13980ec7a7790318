use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use voi_arbiter::cli::{cmd_compare, cmd_inspect, cmd_run, Outcome};
use voi_arbiter::config::RunConfig;
use voi_arbiter::{AgentKind, Result};

/// VoI arbitration between depth-limited planning and Q-learning on Taxi.
#[derive(Parser)]
#[command(name = "voi-arbiter", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one agent over several seeded runs and write CSV/JSON artifacts.
    Run {
        #[command(flatten)]
        opts: RunOpts,
        /// Also write the learned transition table of the first run (arbiter only).
        #[arg(long)]
        dump_model: bool,
    },
    /// Train all three agents and write comparison JSON and SVG charts.
    Compare {
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Print the greedy policy of a saved 500x6 Q-table.
    Inspect { qtable: PathBuf },
}

#[derive(Args)]
struct RunOpts {
    /// key = value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    agent: Option<AgentKind>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    voi_threshold: Option<f64>,
    #[arg(long)]
    voi_mult: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    history_window: Option<usize>,
    #[arg(long)]
    replay_capacity: Option<usize>,
    #[arg(long)]
    replay_batch: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, env = "VOI_ARBITER_OUT")]
    out: Option<PathBuf>,
}

impl RunOpts {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let overrides = [
            ("agent", self.agent.map(|a| a.to_string())),
            ("alpha", self.alpha.map(|v| v.to_string())),
            ("gamma", self.gamma.map(|v| v.to_string())),
            ("depth", self.depth.map(|v| v.to_string())),
            ("rho", self.rho.map(|v| v.to_string())),
            ("voi_threshold", self.voi_threshold.map(|v| v.to_string())),
            ("voi_mult", self.voi_mult.map(|v| v.to_string())),
            ("epsilon", self.epsilon.map(|v| v.to_string())),
            ("history_window", self.history_window.map(|v| v.to_string())),
            (
                "replay_capacity",
                self.replay_capacity.map(|v| v.to_string()),
            ),
            ("replay_batch", self.replay_batch.map(|v| v.to_string())),
            ("runs", self.runs.map(|v| v.to_string())),
            ("episodes", self.episodes.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
        ];
        for (key, value) in overrides {
            if let Some(value) = value {
                cfg.set(key, &value)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Run { opts, dump_model } => cmd_run(&opts.resolve()?, dump_model),
        Command::Compare { opts } => cmd_compare(&opts.resolve()?),
        Command::Inspect { qtable } => cmd_inspect(&qtable),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(outcome) => {
            println!("{}", outcome.message);
            for path in outcome.artifacts {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
