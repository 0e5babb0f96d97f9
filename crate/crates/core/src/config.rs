//! Run configuration documents (TOML).
//!
//! Every key is optional; missing keys take the defaults below. Unknown keys
//! are rejected.
//!
//! ```toml
//! world = "small_analog"
//! # world_seed = 0        # defaults to `seed`
//! seed = 0
//! timesteps = 200000
//! agents = 16
//! reset_interval = 128
//! threshold_k = 1.0
//! goal_spacing = 5.0
//! heuristic = "mixed"     # visitation | goal | mixed | uniform | start-only
//! mix_weight = 0.5        # mixed only
//! power = 1.0
//! single_worker = false
//! # out = "runs/small"    # defaults to $REACHPROBE_OUT_ROOT/<world>-<heuristic>-seed<seed>
//! ```

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::environment::WorldName;
use crate::explorer::{ExplorerConfig, HeuristicKind, ResetHeuristic, DEFAULT_MIX_WEIGHT};

/// Output root used when neither `out` nor the environment says otherwise.
pub const DEFAULT_OUT_ROOT: &str = "runs";
pub const OUT_ROOT_ENV: &str = "REACHPROBE_OUT_ROOT";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

/// Heuristic names as written in documents and on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeuristicName {
    Visitation,
    Goal,
    Mixed,
    Uniform,
    StartOnly,
}

impl HeuristicName {
    pub const ALL: [HeuristicName; 5] = [
        HeuristicName::Visitation,
        HeuristicName::Goal,
        HeuristicName::Mixed,
        HeuristicName::Uniform,
        HeuristicName::StartOnly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HeuristicName::Visitation => "visitation",
            HeuristicName::Goal => "goal",
            HeuristicName::Mixed => "mixed",
            HeuristicName::Uniform => "uniform",
            HeuristicName::StartOnly => "start-only",
        }
    }

    pub fn kind(self, mix_weight: f64) -> HeuristicKind {
        match self {
            HeuristicName::Visitation => HeuristicKind::Visitation,
            HeuristicName::Goal => HeuristicKind::GoalGuided,
            HeuristicName::Mixed => HeuristicKind::Mixed { weight: mix_weight },
            HeuristicName::Uniform => HeuristicKind::Uniform,
            HeuristicName::StartOnly => HeuristicKind::StartOnly,
        }
    }
}

impl fmt::Display for HeuristicName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HeuristicName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|h| h.as_str() == s)
            .ok_or_else(|| format!("unknown heuristic {s:?} (expected visitation, goal, mixed, uniform or start-only)"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub world: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub world_seed: Option<u64>,
    pub seed: u64,
    pub timesteps: u64,
    pub agents: usize,
    pub reset_interval: u64,
    pub threshold_k: f64,
    pub goal_spacing: f64,
    pub heuristic: HeuristicName,
    pub mix_weight: f64,
    pub power: f64,
    pub single_worker: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let e = ExplorerConfig::default();
        Self {
            world: WorldName::SmallAnalog.as_str().to_string(),
            world_seed: None,
            seed: e.seed,
            timesteps: e.total_timesteps,
            agents: e.num_agents,
            reset_interval: e.reset_interval,
            threshold_k: e.threshold,
            goal_spacing: e.goal_spacing,
            heuristic: HeuristicName::Mixed,
            mix_weight: DEFAULT_MIX_WEIGHT,
            power: e.heuristic.power,
            single_worker: e.single_worker,
            out: None,
        }
    }
}

/// Command-line values that take precedence over the document.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub world: Option<String>,
    pub seed: Option<u64>,
    pub timesteps: Option<u64>,
    pub agents: Option<usize>,
    pub heuristic: Option<HeuristicName>,
    pub power: Option<f64>,
    pub threshold_k: Option<f64>,
    pub reset_interval: Option<u64>,
    pub out: Option<PathBuf>,
    pub single_worker: bool,
}

impl RunConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_path_buf(),
            message: e.message().to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Self::parse(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), ConfigError> {
        if let Some(w) = &o.world {
            self.world = w.clone();
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(t) = o.timesteps {
            self.timesteps = t;
        }
        if let Some(n) = o.agents {
            self.agents = n;
        }
        if let Some(h) = o.heuristic {
            self.heuristic = h;
        }
        if let Some(p) = o.power {
            self.power = p;
        }
        if let Some(k) = o.threshold_k {
            self.threshold_k = k;
        }
        if let Some(r) = o.reset_interval {
            self.reset_interval = r;
        }
        if let Some(out) = &o.out {
            self.out = Some(out.clone());
        }
        self.single_worker |= o.single_worker;
        self.validate()
    }

    pub fn world_name(&self) -> Result<WorldName, ConfigError> {
        self.world.parse().map_err(|e: crate::environment::EnvError| ConfigError::Invalid(e.to_string()))
    }

    /// The world seed; follows the run seed unless pinned.
    pub fn world_seed(&self) -> u64 {
        self.world_seed.unwrap_or(self.seed)
    }

    pub fn heuristic(&self) -> ResetHeuristic {
        ResetHeuristic::new(self.heuristic.kind(self.mix_weight)).with_power(self.power)
    }

    pub fn explorer_config(&self) -> ExplorerConfig {
        ExplorerConfig {
            total_timesteps: self.timesteps,
            reset_interval: self.reset_interval,
            threshold: self.threshold_k,
            num_agents: self.agents,
            goal_spacing: self.goal_spacing,
            heuristic: self.heuristic(),
            seed: self.seed,
            single_worker: self.single_worker,
            ..ExplorerConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.world_name()?;
        if !(0.0..=1.0).contains(&self.mix_weight) {
            return Err(ConfigError::Invalid(format!("mix_weight must be in [0, 1], got {}", self.mix_weight)));
        }
        self.explorer_config().validate().map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// `<world>-<heuristic>-seed<seed>`
    pub fn default_dir_name(&self) -> String {
        format!("{}-{}-seed{}", self.world, self.heuristic, self.seed)
    }

    /// Where the report goes: `out` if set, otherwise the default name
    /// under `root` (or [`DEFAULT_OUT_ROOT`]).
    pub fn output_dir(&self, root: Option<&Path>) -> PathBuf {
        match &self.out {
            Some(out) => out.clone(),
            None => root.unwrap_or(Path::new(DEFAULT_OUT_ROOT)).join(self.default_dir_name()),
        }
    }
}
