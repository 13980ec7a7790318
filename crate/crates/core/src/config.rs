//! Flat `key = value` run configuration.
//!
//! ```text
//! # published defaults
//! agent = arbiter
//! alpha = 0.8
//! episodes = 500
//! ```
//!
//! Blank lines and `#` comments are ignored. Unknown keys are errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::agents::{AgentKind, ArbiterConfig};
use crate::error::{Error, Result};

/// Everything needed to reproduce one experiment invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub agent: AgentKind,
    pub params: ArbiterConfig,
    pub num_runs: usize,
    pub num_episodes: usize,
    pub base_seed: u64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            agent: AgentKind::Arbiter,
            params: ArbiterConfig::default(),
            num_runs: 100,
            num_episodes: 500,
            base_seed: 0,
            out_dir: PathBuf::from("out"),
        }
    }
}

/// Keys in the order they are written.
pub const KEYS: [&str; 15] = [
    "agent",
    "alpha",
    "gamma",
    "depth",
    "rho",
    "voi_threshold",
    "voi_mult",
    "epsilon",
    "history_window",
    "replay_capacity",
    "replay_batch",
    "runs",
    "episodes",
    "seed",
    "out",
];

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.num_runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.num_episodes == 0 {
            return Err(Error::Config("episodes must be at least 1".into()));
        }
        Ok(())
    }

    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
        }
        let p = &mut self.params;
        match key {
            "agent" => self.agent = value.parse()?,
            "alpha" => p.alpha = num(key, value)?,
            "gamma" => p.gamma = num(key, value)?,
            "depth" => p.max_depth = num(key, value)?,
            "rho" => p.rho = num(key, value)?,
            "voi_threshold" => p.voi_threshold = num(key, value)?,
            "voi_mult" => p.voi_mult = num(key, value)?,
            "epsilon" => p.epsilon = num(key, value)?,
            "history_window" => p.history_window = num(key, value)?,
            "replay_capacity" => p.replay.capacity = num(key, value)?,
            "replay_batch" => p.replay.batch_size = num(key, value)?,
            "runs" => self.num_runs = num(key, value)?,
            "episodes" => self.num_episodes = num(key, value)?,
            "seed" => self.base_seed = num(key, value)?,
            "out" => self.out_dir = PathBuf::from(value),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let p = &self.params;
        Some(match key {
            "agent" => self.agent.to_string(),
            "alpha" => p.alpha.to_string(),
            "gamma" => p.gamma.to_string(),
            "depth" => p.max_depth.to_string(),
            "rho" => p.rho.to_string(),
            "voi_threshold" => p.voi_threshold.to_string(),
            "voi_mult" => p.voi_mult.to_string(),
            "epsilon" => p.epsilon.to_string(),
            "history_window" => p.history_window.to_string(),
            "replay_capacity" => p.replay.capacity.to_string(),
            "replay_batch" => p.replay.batch_size.to_string(),
            "runs" => self.num_runs.to_string(),
            "episodes" => self.num_episodes.to_string(),
            "seed" => self.base_seed.to_string(),
            "out" => self.out_dir.display().to_string(),
            _ => return None,
        })
    }

    /// Applies `key = value` lines on top of `self`.
    pub fn apply_str(&mut self, text: &str, origin: &Path) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: origin.to_path_buf(),
                message: format!("line {}: expected `key = value`", i + 1),
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Parse {
                    path: origin.to_path_buf(),
                    message: format!("line {}: {e}", i + 1),
                })?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.apply_str(text, Path::new("<config>"))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::default();
        cfg.apply_str(&text, path)?;
        Ok(cfg)
    }

    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key).expect("known key"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_published_values() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.params, ArbiterConfig::default());
        assert_eq!((cfg.num_runs, cfg.num_episodes), (100, 500));
    }

    #[test]
    fn parses_comments_and_overrides() {
        let cfg = RunConfig::parse(
            "# sweep\n\nagent = replay\nalpha=0.5  # slower\nvoi_threshold = inf\nreplay_batch = 0\n",
        )
        .unwrap();
        assert_eq!(cfg.agent, AgentKind::Replay);
        assert_eq!(cfg.params.alpha, 0.5);
        assert!(cfg.params.voi_threshold.is_infinite());
        assert_eq!(cfg.params.replay.batch_size, 0);
        assert_eq!(cfg.params.gamma, 0.9);
    }

    #[test]
    fn round_trip() {
        let mut cfg = RunConfig::default();
        cfg.set("epsilon", "0.000001").unwrap();
        cfg.set("voi_mult", "1.01").unwrap();
        cfg.set("out", "runs/a b").unwrap();
        let again = RunConfig::parse(&cfg.to_config_string()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_config_string(), cfg.to_config_string());
    }

    #[test]
    fn errors() {
        assert!(RunConfig::parse("alpha 0.5").is_err());
        assert!(RunConfig::parse("lr = 0.5").is_err());
        assert!(RunConfig::parse("alpha = fast").is_err());
        assert!(RunConfig::parse("agent = dqn").is_err());
        let mut cfg = RunConfig::default();
        cfg.set("alpha", "1.5").unwrap();
        assert!(cfg.validate().is_err());
        let err = RunConfig::load(Path::new("/nonexistent/run.cfg")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/run.cfg"));
    }
}
