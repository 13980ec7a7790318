//! Value-of-information arbitration between a model-based depth-limited
//! planner and a model-free tabular Q-learner.
//!
//! The crate is organised bottom-up:
//!
//! - [`env`]: the discrete episodic MDP interface, the 5x5 [`Taxi`] gridworld
//!   and a small table-driven [`TabularMdp`] used for fixtures.
//! - [`value_store`]: the Q-table with bounded per-pair value histories, the
//!   variance statistics feeding the arbitration signal, and softmax selection.
//! - [`world_model`]: a count-based transition/reward model and the
//!   depth-limited Bellman lookahead over it.
//! - [`agents`]: the VoI arbiter, plain Q-learning and Q-learning with
//!   experience replay.
//! - [`harness`]: seeded multi-run experiments, aggregation and comparison.
//! - [`config`], [`report`], [`plot`], [`cli`]: key=value configuration files,
//!   CSV/JSON artifacts and SVG charts used by the `voi-arbiter` binary.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory:
//!
//! ```bash
//! cargo run --release --example taxi_tour
//! cargo run --release --example arbitration_handoff
//! cargo run --release --example baseline_comparison out/comparison
//! ```

pub mod agents;
pub mod cli;
pub mod config;
pub mod env;
mod error;
pub mod harness;
pub mod plot;
pub mod report;
pub mod value_store;
pub mod world_model;

pub use agents::{
    AgentKind, Arbiter, ArbiterConfig, QLearner, ReplayAgent, ReplayBuffer, ReplayConfig,
};
pub use env::{ActionId, Environment, StateId, TabularMdp, Taxi, TaxiState, Transition};
pub use error::{Error, Result};
pub use harness::{EpisodeRecord, ExperimentSummary};
pub use value_store::{QStore, SoftmaxParams};
pub use world_model::{PlanConfig, WorldModel};

/// Seeded generator used for every run. ChaCha8 keeps streams identical across
/// platforms and releases of `rand`.
pub type RunRng = rand_chacha::ChaCha8Rng;

/// Builds the generator for a given seed.
pub fn seeded_rng(seed: u64) -> RunRng {
    use rand::SeedableRng;
    RunRng::seed_from_u64(seed)
}
