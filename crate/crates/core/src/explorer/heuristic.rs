//! Reset priorities and weighted sampling over the archive.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ExplorerError;
use crate::environment::Action;
use crate::exec::Execution;
use crate::navmesh::GoalSet;
use crate::spatial_cache::{CacheView, EntryId};

pub const DEFAULT_MIX_WEIGHT: f64 = 0.5;
/// Goal distances below this are clamped before taking the reciprocal.
pub const GOAL_DISTANCE_FLOOR: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeuristicKind {
    Visitation,
    GoalGuided,
    Mixed { weight: f64 },
    Uniform,
    StartOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResetHeuristic {
    pub kind: HeuristicKind,
    pub power: f64,
}

impl Default for ResetHeuristic {
    fn default() -> Self {
        Self::new(HeuristicKind::Mixed { weight: DEFAULT_MIX_WEIGHT })
    }
}

impl ResetHeuristic {
    pub fn new(kind: HeuristicKind) -> Self {
        Self { kind, power: 1.0 }
    }

    pub fn with_power(self, power: f64) -> Self {
        Self { power, ..self }
    }

    pub fn validate(&self) -> Result<(), ExplorerError> {
        if !(self.power.is_finite() && self.power > 0.0) {
            return Err(ExplorerError::Config(format!("power must be positive, got {}", self.power)));
        }
        if let HeuristicKind::Mixed { weight } = self.kind {
            if !(0.0..=1.0).contains(&weight) {
                return Err(ExplorerError::Config(format!("mix weight must be in [0, 1], got {weight}")));
            }
        }
        Ok(())
    }

    /// Command-line spelling of the kind.
    pub fn name(&self) -> &'static str {
        match self.kind {
            HeuristicKind::Visitation => "visitation",
            HeuristicKind::GoalGuided => "goal",
            HeuristicKind::Mixed { .. } => "mixed",
            HeuristicKind::Uniform => "uniform",
            HeuristicKind::StartOnly => "start-only",
        }
    }

    fn uses_goals(&self) -> bool {
        matches!(self.kind, HeuristicKind::GoalGuided | HeuristicKind::Mixed { .. })
    }

    // Uniform reads the counts only for their length.
    fn uses_counts(&self) -> bool {
        matches!(self.kind, HeuristicKind::Visitation | HeuristicKind::Mixed { .. } | HeuristicKind::Uniform)
    }
}

impl fmt::Display for ResetHeuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            HeuristicKind::Mixed { weight } => write!(f, "mixed(w={weight})")?,
            _ => f.write_str(self.name())?,
        }
        if self.power != 1.0 {
            write!(f, " p={}", self.power)?;
        }
        Ok(())
    }
}

/// Parses the kind alone; the mix weight defaults to [`DEFAULT_MIX_WEIGHT`].
impl FromStr for HeuristicKind {
    type Err = ExplorerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "visitation" => HeuristicKind::Visitation,
            "goal" => HeuristicKind::GoalGuided,
            "mixed" => HeuristicKind::Mixed { weight: DEFAULT_MIX_WEIGHT },
            "uniform" => HeuristicKind::Uniform,
            "start-only" => HeuristicKind::StartOnly,
            other => {
                return Err(ExplorerError::Config(format!(
                    "unknown heuristic {other:?} (expected visitation, goal, mixed, uniform or start-only)"
                )))
            }
        })
    }
}

pub fn visitation_priority(visit_count: u64) -> f64 {
    1.0 / visit_count.max(1) as f64
}

/// `1 / max(d, 1)`; an infinite distance means every goal is reached, and
/// then all entries weigh the same.
pub fn goal_priority(distance: f64) -> f64 {
    if distance.is_finite() {
        1.0 / distance.max(GOAL_DISTANCE_FLOOR)
    } else {
        1.0
    }
}

fn powered(eta: f64, p: f64) -> f64 {
    if p == 1.0 {
        eta
    } else if p == 2.0 {
        eta * eta
    } else if p == 0.5 {
        eta.sqrt()
    } else {
        eta.powf(p)
    }
}

/// Sampling weights `η^p` for every entry of a snapshot.
///
/// `goal_distances[i]` is the distance from entry `i` to its nearest
/// unreached goal (`+inf` when none remain). Either slice may be empty when
/// the heuristic does not read it. StartOnly has no weights.
pub fn selection_weights(
    heuristic: &ResetHeuristic,
    visit_counts: &[u64],
    goal_distances: &[f64],
    exec: Execution,
    out: &mut Vec<f64>,
) {
    let n = visit_counts.len().max(goal_distances.len());
    out.clear();
    out.resize(n, 0.0);
    let p = heuristic.power;
    match heuristic.kind {
        HeuristicKind::StartOnly => out.clear(),
        HeuristicKind::Uniform => out.fill(1.0),
        HeuristicKind::Visitation => {
            exec.fill(out, |i| powered(visitation_priority(visit_counts[i]), p));
        }
        HeuristicKind::GoalGuided => {
            exec.fill(out, |i| powered(goal_priority(goal_distances[i]), p));
        }
        HeuristicKind::Mixed { weight } => {
            let v_total: f64 = visit_counts.iter().map(|&c| visitation_priority(c)).sum();
            let g_total: f64 = goal_distances.iter().map(|&d| goal_priority(d)).sum();
            let (a, b) = (weight / v_total, (1.0 - weight) / g_total);
            exec.fill(out, |i| {
                let eta = a * visitation_priority(visit_counts[i]) + b * goal_priority(goal_distances[i]);
                powered(eta, p)
            });
        }
    }
}

/// Index drawn with probability proportional to `weights[i]`.
pub fn sample_index(weights: &[f64], rng: &mut impl Rng) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return None;
    }
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = Some(i);
            if u < acc {
                return Some(i);
            }
        }
    }
    // Rounding left u at the very top of the range.
    last
}

/// Each component uniform over its range, independently.
pub fn random_action(rng: &mut impl Rng) -> Action {
    Action {
        forward: rng.gen_range(-1..=1),
        strafe: rng.gen_range(-1..=1),
        turn: rng.gen_range(-1..=1),
        jump: rng.gen_range(0..=1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResetTarget {
    Spawn,
    Entry(EntryId),
}

const NO_GOAL: usize = usize::MAX;

#[derive(Clone, Copy, Debug)]
struct GoalHint {
    goal: usize,
    distance: f64,
}

impl GoalHint {
    fn lookup(goals: &GoalSet, p: &crate::geometry::Position) -> Self {
        match goals.nearest_unreached(p) {
            Some((goal, distance)) => Self { goal, distance },
            None => Self { goal: NO_GOAL, distance: f64::INFINITY },
        }
    }
}

/// Reusable buffers for repeated reset selection over a growing archive.
///
/// Each entry remembers its nearest unreached goal. Goals only ever leave
/// the unreached set, so the remembered distance stays exact until that
/// particular goal is drained, and only then is it looked up again.
#[derive(Debug, Default)]
pub struct ResetSampler {
    exec: Execution,
    hints: Vec<GoalHint>,
    counts: Vec<u64>,
    distances: Vec<f64>,
    weights: Vec<f64>,
}

impl ResetSampler {
    pub fn new(exec: Execution) -> Self {
        Self { exec, ..Self::default() }
    }

    pub fn select(
        &mut self,
        view: &CacheView<'_>,
        goals: &GoalSet,
        heuristic: &ResetHeuristic,
        rng: &mut impl Rng,
    ) -> Result<ResetTarget, ExplorerError> {
        if heuristic.kind == HeuristicKind::StartOnly {
            return Ok(ResetTarget::Spawn);
        }
        let n = view.len();
        if n == 0 {
            return Err(ExplorerError::EmptyCache);
        }
        let positions = view.positions();
        self.counts.clear();
        if heuristic.uses_counts() {
            self.counts.extend((0..n).map(|i| view.visit_count(i)));
        }
        self.distances.clear();
        if heuristic.uses_goals() {
            let known = self.hints.len();
            self.hints.extend(positions[known..].iter().map(|p| GoalHint::lookup(goals, p)));
            self.exec.for_each_mut(&mut self.hints[..known], |i, h| {
                if h.goal != NO_GOAL && goals.is_reached(h.goal) {
                    *h = GoalHint::lookup(goals, &positions[i]);
                }
            });
            self.distances.extend(self.hints.iter().map(|h| h.distance));
        }
        selection_weights(heuristic, &self.counts, &self.distances, self.exec, &mut self.weights);
        let i = sample_index(&self.weights, rng).ok_or(ExplorerError::EmptyCache)?;
        Ok(ResetTarget::Entry(EntryId(i)))
    }
}

/// One-off selection against a snapshot. Equivalent to a fresh
/// [`ResetSampler`].
pub fn select_reset(
    view: &CacheView<'_>,
    goals: &GoalSet,
    heuristic: &ResetHeuristic,
    rng: &mut impl Rng,
) -> Result<ResetTarget, ExplorerError> {
    ResetSampler::new(Execution::Sequential).select(view, goals, heuristic, rng)
}
