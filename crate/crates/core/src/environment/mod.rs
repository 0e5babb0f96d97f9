//! Deterministic agent simulation over heightfield worlds.
//!
//! An agent is a point with a yaw. Each [`Environment::step`] advances one
//! fixed tick; see [`physics`] for the kinematics and the exact order of
//! floating-point operations.

mod checkpoint;
pub mod export;
pub mod physics;
pub mod trajectory;
mod worlds;

pub use checkpoint::Checkpoint;
pub use physics::{AgentState, Heightfield, Limits};
pub use worlds::{build_world, AgentEnv, BoxRegion, SeededBug, World, WorldName, WorldSpec};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Position;
use crate::navmesh::NavMesh;

#[derive(Debug, Error, PartialEq)]
pub enum EnvError {
    #[error("action component {component} = {value} is out of range")]
    InvalidAction { component: &'static str, value: i8 },
    #[error("checkpoint rejected: {0}")]
    BadCheckpoint(&'static str),
    #[error("unknown world {0:?} (expected small_analog, large_analog or traversal_analog)")]
    UnknownWorld(String),
    #[error("world {name} is invalid: {reason}")]
    InvalidWorld { name: String, reason: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// One controller input: three axes in {-1, 0, 1} and a jump button.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Action {
    pub forward: i8,
    pub strafe: i8,
    pub turn: i8,
    pub jump: i8,
}

impl Action {
    pub const IDLE: Action = Action { forward: 0, strafe: 0, turn: 0, jump: 0 };

    pub fn new(forward: i8, strafe: i8, turn: i8, jump: i8) -> Result<Self, EnvError> {
        let a = Action { forward, strafe, turn, jump };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        let axis = |component, value: i8| {
            if (-1..=1).contains(&value) {
                Ok(())
            } else {
                Err(EnvError::InvalidAction { component, value })
            }
        };
        axis("forward", self.forward)?;
        axis("strafe", self.strafe)?;
        axis("turn", self.turn)?;
        if !(0..=1).contains(&self.jump) {
            return Err(EnvError::InvalidAction { component: "jump", value: self.jump });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub position: Position,
    /// Radians in `[0, 2π)`.
    pub yaw: f64,
    pub grounded: bool,
}

/// What the explorer needs from a simulator.
pub trait Environment {
    /// Places the agent at the world's spawn.
    fn reset(&mut self) -> Observation;
    fn step(&mut self, action: Action) -> Result<Observation, EnvError>;
    fn observe(&self) -> Observation;
    fn save(&self) -> Checkpoint;
    fn restore(&mut self, checkpoint: &Checkpoint) -> Result<Observation, EnvError>;
}

/// A world that can hand out independent agent environments sharing the
/// same immutable geometry.
pub trait EnvFactory: Sync {
    type Env: Environment + Send;

    fn make_env(&self) -> Self::Env;
    fn navmesh(&self) -> &NavMesh;

    /// Name and seed of a built-in world, for report headers.
    fn world_id(&self) -> Option<(String, u64)> {
        None
    }
}
