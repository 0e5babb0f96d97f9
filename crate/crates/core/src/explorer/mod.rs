//! The exploration loop.
//!
//! N agents share one archive and one goal set. Every agent counts its own
//! steps; on each multiple of the reset interval it restores a checkpoint
//! picked by the reset heuristic instead of acting, otherwise it takes a
//! uniformly random action. Every resulting position goes to the archive,
//! and each newly archived position drains the goals within reach.
//!
//! Agents advance round-robin, so global time `t` counts agent-steps summed
//! over all agents. Two schedulers implement this:
//!
//! * single-worker: one thread steps agent 0, 1, .., N-1, 0, .. and is
//!   bit-reproducible for a given config;
//! * concurrent: each tick steps all agents in parallel against the shared
//!   archive. Statistically equivalent, but insertion order between agents
//!   within a tick is not fixed.

mod heuristic;

pub use heuristic::{
    goal_priority, random_action, sample_index, select_reset, selection_weights, visitation_priority,
    HeuristicKind, ResetHeuristic, ResetSampler, ResetTarget, DEFAULT_MIX_WEIGHT, GOAL_DISTANCE_FLOOR,
};

use parking_lot::{Mutex, RwLock};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::environment::{Action, Checkpoint, EnvError, EnvFactory, Environment};
use crate::exec::Execution;
use crate::geometry::Position;
use crate::navmesh::{sample_goals, Goal, GoalSet, NavMeshError};
use crate::report::{RunReport, SeriesRow};
use crate::spatial_cache::{CacheError, EntrySnapshot, Observed, SpatialCache};

/// Metrics are sampled on multiples of this many global steps.
pub const METRIC_INTERVAL: u64 = 1_000;

#[derive(Debug, Error)]
pub enum ExplorerError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot select a reset state from an empty archive")]
    EmptyCache,
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    NavMesh(#[from] NavMeshError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExplorerConfig {
    pub total_timesteps: u64,
    pub reset_interval: u64,
    pub threshold: f64,
    pub num_agents: usize,
    pub goal_spacing: f64,
    pub heuristic: ResetHeuristic,
    pub seed: u64,
    pub single_worker: bool,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for ExplorerConfig {
    fn default() -> Self {
        Self {
            total_timesteps: 200_000,
            reset_interval: 128,
            threshold: 1.0,
            num_agents: 16,
            goal_spacing: 5.0,
            heuristic: ResetHeuristic::default(),
            seed: 0,
            single_worker: false,
            execution: Execution::default(),
        }
    }
}

impl ExplorerConfig {
    pub fn validate(&self) -> Result<(), ExplorerError> {
        let fail = |m: String| Err(ExplorerError::Config(m));
        if self.total_timesteps == 0 {
            return fail("total_timesteps must be positive".into());
        }
        if self.reset_interval == 0 || self.reset_interval > self.total_timesteps {
            return fail(format!(
                "reset_interval must be in 1..={}, got {}",
                self.total_timesteps, self.reset_interval
            ));
        }
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return fail(format!("threshold must be positive, got {}", self.threshold));
        }
        if self.num_agents == 0 {
            return fail("num_agents must be positive".into());
        }
        if !(self.goal_spacing.is_finite() && self.goal_spacing > 0.0) {
            return fail(format!("goal_spacing must be positive, got {}", self.goal_spacing));
        }
        self.heuristic.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepKind {
    Reset(ResetTarget),
    Act(Action),
}

/// One agent-step, as seen by a [`StepObserver`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepEvent {
    /// Global step index, 1-based.
    pub t: u64,
    pub agent: usize,
    /// The agent's own step index, 1-based.
    pub own_step: u64,
    pub kind: StepKind,
    pub position: Position,
    pub inserted: bool,
}

pub trait StepObserver: Sync {
    fn on_step(&self, event: &StepEvent);
}

struct NoObserver;

impl StepObserver for NoObserver {
    fn on_step(&self, _: &StepEvent) {}
}

/// Raw result of a run, before classification.
#[derive(Clone, Debug)]
pub struct Exploration {
    pub series: Vec<SeriesRow>,
    pub entries: Vec<EntrySnapshot>,
    pub goals: Vec<Goal>,
    pub resets: u64,
}

struct Agent<E> {
    env: E,
    rng: ChaCha8Rng,
    own_steps: u64,
}

struct Shared<'a> {
    config: &'a ExplorerConfig,
    cache: SpatialCache,
    goals: RwLock<GoalSet>,
    sampler: Mutex<ResetSampler>,
    spawn: Checkpoint,
    observer: &'a dyn StepObserver,
}

impl Shared<'_> {
    fn row(&self, t: u64) -> SeriesRow {
        let goals = self.goals.read();
        SeriesRow {
            t,
            goals_reached: goals.reached_count(),
            goals_total: goals.len(),
            unique_positions: self.cache.len(),
        }
    }

    /// Feeds a position to the archive; a new entry drains nearby goals.
    fn record<E: Environment>(&self, env: &E, p: Position, t: u64) -> Result<bool, ExplorerError> {
        let observed = self.cache.observe(p, || env.save(), t)?;
        let inserted = matches!(observed, Observed::Inserted(_));
        if inserted {
            self.goals.write().drain(&p, t);
        }
        Ok(inserted)
    }

    fn step<E: Environment>(&self, agent: &mut Agent<E>, index: usize, t: u64) -> Result<(), ExplorerError> {
        agent.own_steps += 1;
        let (kind, obs) = if agent.own_steps.is_multiple_of(self.config.reset_interval) {
            let target = {
                let mut sampler = self.sampler.lock();
                let goals = self.goals.read();
                let view = self.cache.view();
                sampler.select(&view, &goals, &self.config.heuristic, &mut agent.rng)?
            };
            let checkpoint = match target {
                ResetTarget::Spawn => self.spawn.clone(),
                ResetTarget::Entry(id) => self.cache.checkpoint(id).ok_or(ExplorerError::EmptyCache)?,
            };
            (StepKind::Reset(target), agent.env.restore(&checkpoint)?)
        } else {
            let action = random_action(&mut agent.rng);
            (StepKind::Act(action), agent.env.step(action)?)
        };
        let inserted = self.record(&agent.env, obs.position, t)?;
        self.observer.on_step(&StepEvent {
            t,
            agent: index,
            own_step: agent.own_steps,
            kind,
            position: obs.position,
            inserted,
        });
        Ok(())
    }
}

fn agent_seed(seed: u64, agent: usize) -> u64 {
    // splitmix64 finalizer, so neighbouring agents get unrelated streams.
    let mut z = seed ^ (agent as u64).wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn explore<F: EnvFactory>(factory: &F, config: &ExplorerConfig) -> Result<Exploration, ExplorerError> {
    explore_observed(factory, config, &NoObserver)
}

/// [`explore`] with a callback after every agent-step.
pub fn explore_observed<F: EnvFactory>(
    factory: &F,
    config: &ExplorerConfig,
    observer: &dyn StepObserver,
) -> Result<Exploration, ExplorerError> {
    config.validate()?;
    let goals = GoalSet::new(sample_goals(factory.navmesh(), config.goal_spacing)?);
    let mut agents: Vec<Agent<F::Env>> = (0..config.num_agents)
        .map(|i| Agent {
            env: factory.make_env(),
            rng: ChaCha8Rng::seed_from_u64(agent_seed(config.seed, i)),
            own_steps: 0,
        })
        .collect();
    let spawn = {
        let env = &mut agents[0].env;
        env.reset();
        env.save()
    };
    let shared = Shared {
        config,
        cache: SpatialCache::new(config.threshold)?,
        goals: RwLock::new(goals),
        sampler: Mutex::new(ResetSampler::new(config.execution)),
        spawn,
        observer,
    };

    for agent in &mut agents {
        let obs = agent.env.reset();
        shared.record(&agent.env, obs.position, 0)?;
    }
    let mut series = vec![shared.row(0)];
    let total = config.total_timesteps;

    if config.single_worker || !config.execution.is_parallel() {
        let mut t = 0;
        'outer: loop {
            for (i, agent) in agents.iter_mut().enumerate() {
                if t == total {
                    break 'outer;
                }
                t += 1;
                shared.step(agent, i, t)?;
                if t % METRIC_INTERVAL == 0 || t == total {
                    series.push(shared.row(t));
                }
            }
        }
    } else {
        let mut t = 0;
        while t < total {
            let active = (total - t).min(agents.len() as u64) as usize;
            let failure = Mutex::new(None);
            config.execution.for_each_mut(&mut agents[..active], |i, agent| {
                if let Err(e) = shared.step(agent, i, t + i as u64 + 1) {
                    failure.lock().get_or_insert(e);
                }
            });
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            let end = t + active as u64;
            // Rows land on tick boundaries, at the first tick end at or
            // past each multiple of the interval.
            if end / METRIC_INTERVAL > t / METRIC_INTERVAL || end == total {
                series.push(shared.row(end));
            }
            t = end;
        }
    }

    let resets = agents
        .iter()
        .map(|a| a.own_steps / config.reset_interval)
        .sum();
    let goals = shared.goals.into_inner().goals().to_vec();
    Ok(Exploration {
        series,
        entries: shared.cache.snapshot_entries(),
        goals,
        resets,
    })
}

/// Runs the exploration and builds the classified report.
pub fn run<F: EnvFactory>(factory: &F, config: &ExplorerConfig) -> Result<RunReport, ExplorerError> {
    let exploration = explore(factory, config)?;
    Ok(RunReport::build(&exploration, factory, config)?)
}
