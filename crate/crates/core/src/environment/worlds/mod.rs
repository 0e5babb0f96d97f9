//! Built-in worlds.
//!
//! Three desk-scale heightfield levels, each built deterministically from a
//! seed:
//!
//! * `small_analog` is a 50 m walled arena almost filled by two blocks,
//!   leaving a ring corridor and a cross corridor. Two planted bugs: a
//!   lowered stretch of the south wall that lets an agent jump onto the
//!   wall and drop off the map, and a floor hole hidden under a box that
//!   has no collision.
//! * `large_analog` is a 300 m city of four tall blocks split by wide
//!   streets, with lowered perimeter sections on the west and south edges.
//! * `traversal_analog` is a 150 m multi-storey course: platforms at 4, 8
//!   and 12 m joined by ramps, bridges and jump gaps over a ground level
//!   that the nav-mesh does not cover.

mod large;
pub(crate) mod layout;
mod small;
mod traversal;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::checkpoint::{fnv1a, Checkpoint};
use super::physics::{AgentState, Heightfield, Limits, FREEZE_DEPTH};
use super::{Action, EnvError, EnvFactory, Environment, Observation};
use crate::geometry::{Aabb, Position};
use crate::navmesh::NavMesh;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorldName {
    SmallAnalog,
    LargeAnalog,
    TraversalAnalog,
}

impl WorldName {
    pub const ALL: [WorldName; 3] = [
        WorldName::SmallAnalog,
        WorldName::LargeAnalog,
        WorldName::TraversalAnalog,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            WorldName::SmallAnalog => "small_analog",
            WorldName::LargeAnalog => "large_analog",
            WorldName::TraversalAnalog => "traversal_analog",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            WorldName::SmallAnalog => "50 m walled arena of corridors with a climbable wall section and a hidden floor hole",
            WorldName::LargeAnalog => "300 m city of four blocks and wide streets with two perimeter escape routes",
            WorldName::TraversalAnalog => "150 m multi-storey platforms joined by ramps, bridges and jump gaps",
        }
    }
}

impl fmt::Display for WorldName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WorldName {
    type Err = EnvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        WorldName::ALL
            .into_iter()
            .find(|w| w.as_str() == s)
            .ok_or_else(|| EnvError::UnknownWorld(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub label: String,
    pub bounds: Aabb,
    /// Decorative boxes are drawn but have no collision.
    pub solid: bool,
}

/// A planted bug and the region where discovered points prove it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeededBug {
    pub label: String,
    pub region: Aabb,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorldSpec {
    pub name: WorldName,
    pub seed: u64,
    pub heightfield: Heightfield,
    pub walls: Vec<BoxRegion>,
    pub bounds: Aabb,
    pub navmesh: NavMesh,
    pub spawn: Position,
    pub seeded_bugs: Vec<SeededBug>,
}

impl WorldSpec {
    pub fn freeze_z(&self) -> f64 {
        self.bounds.min.z - FREEZE_DEPTH
    }

    pub fn limits(&self) -> Limits {
        Limits::from_bounds(&self.bounds)
    }

    /// Identifies checkpoints produced by this world.
    pub fn fingerprint(&self) -> u64 {
        let mut bytes = self.name.as_str().as_bytes().to_vec();
        bytes.extend_from_slice(&self.seed.to_le_bytes());
        fnv1a(&bytes)
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        let fail = |reason: String| EnvError::InvalidWorld {
            name: self.name.to_string(),
            reason,
        };
        if !self.bounds.contains(&self.spawn) {
            return Err(fail(format!("spawn {} outside bounds", self.spawn)));
        }
        let g = self.heightfield.ground(self.spawn.x, self.spawn.y);
        if g != self.spawn.z {
            return Err(fail(format!("spawn {} is not on the ground (ground {g})", self.spawn)));
        }
        for (i, poly) in self.navmesh.polygons().iter().enumerate() {
            let c = poly.centroid();
            let g = self.heightfield.ground(c.x, c.y);
            if (g - c.z).abs() > 1e-9 {
                return Err(fail(format!("nav-mesh polygon {i} floats off the ground")));
            }
        }
        Ok(())
    }
}

/// A built world: shared geometry plus a factory for agent environments.
#[derive(Clone, Debug)]
pub struct World {
    spec: Arc<WorldSpec>,
}

impl World {
    pub fn new(spec: WorldSpec) -> Self {
        Self { spec: Arc::new(spec) }
    }

    pub fn spec(&self) -> &WorldSpec {
        &self.spec
    }
}

impl EnvFactory for World {
    type Env = AgentEnv;

    fn make_env(&self) -> AgentEnv {
        AgentEnv::new(Arc::clone(&self.spec))
    }

    fn navmesh(&self) -> &NavMesh {
        &self.spec.navmesh
    }

    fn world_id(&self) -> Option<(String, u64)> {
        Some((self.spec.name.to_string(), self.spec.seed))
    }
}

/// Builds one of the built-in worlds. Same `(name, seed)`, same world.
pub fn build_world(name: &str, seed: u64) -> Result<World, EnvError> {
    let name: WorldName = name.parse()?;
    let spec = match name {
        WorldName::SmallAnalog => small::build(seed),
        WorldName::LargeAnalog => large::build(seed),
        WorldName::TraversalAnalog => traversal::build(seed),
    };
    spec.validate()?;
    Ok(World::new(spec))
}

/// One agent in a world.
#[derive(Clone, Debug)]
pub struct AgentEnv {
    spec: Arc<WorldSpec>,
    fingerprint: u64,
    limits: Limits,
    state: AgentState,
}

impl AgentEnv {
    pub fn new(spec: Arc<WorldSpec>) -> Self {
        let state = AgentState::at_rest(spec.spawn);
        Self {
            fingerprint: spec.fingerprint(),
            limits: spec.limits(),
            spec,
            state,
        }
    }

    pub fn state(&self) -> &AgentState {
        &self.state
    }

    pub fn spec(&self) -> &WorldSpec {
        &self.spec
    }
}

impl Environment for AgentEnv {
    fn reset(&mut self) -> Observation {
        self.state = AgentState::at_rest(self.spec.spawn);
        self.state.observation()
    }

    fn step(&mut self, action: Action) -> Result<Observation, EnvError> {
        action.validate()?;
        self.state.tick(action, &self.spec.heightfield, &self.limits);
        Ok(self.state.observation())
    }

    fn observe(&self) -> Observation {
        self.state.observation()
    }

    fn save(&self) -> Checkpoint {
        Checkpoint::encode(&self.state, self.fingerprint)
    }

    fn restore(&mut self, checkpoint: &Checkpoint) -> Result<Observation, EnvError> {
        self.state = checkpoint.decode(self.fingerprint)?;
        Ok(self.state.observation())
    }
}
