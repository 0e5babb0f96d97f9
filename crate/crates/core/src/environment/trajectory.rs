//! Golden trajectories: an action sequence and the positions it produces.
//!
//! ```text
//! world small_analog
//! seed 0
//! # forward strafe turn jump x y z
//! 1 0 0 0 25.900000 25.500000 0.000000
//! ```
//!
//! Positions are written 6-decimal fixed; replay compares the formatted
//! text so a fixture either matches exactly or not at all.

use std::fmt::Write as _;

use super::{build_world, Action, EnvError, EnvFactory, Environment, WorldName};
use crate::geometry::Position;

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub world: WorldName,
    pub seed: u64,
    pub steps: Vec<(Action, Position)>,
}

/// First step whose replayed position differs from the recorded one.
#[derive(Clone, Debug, PartialEq)]
pub struct Divergence {
    pub step: usize,
    pub expected: String,
    pub actual: String,
}

impl Trajectory {
    /// Runs `actions` from spawn and records every resulting position.
    pub fn record(world: WorldName, seed: u64, actions: &[Action]) -> Result<Self, EnvError> {
        let w = build_world(world.as_str(), seed)?;
        let mut env = w.make_env();
        env.reset();
        let mut steps = Vec::with_capacity(actions.len());
        for a in actions {
            steps.push((*a, env.step(*a)?.position));
        }
        Ok(Self { world, seed, steps })
    }

    pub fn actions(&self) -> Vec<Action> {
        self.steps.iter().map(|(a, _)| *a).collect()
    }

    pub fn last_position(&self) -> Option<Position> {
        self.steps.last().map(|(_, p)| *p)
    }

    /// Replays the actions and compares positions at 6 decimals.
    pub fn verify(&self) -> Result<Option<Divergence>, EnvError> {
        let replay = Self::record(self.world, self.seed, &self.actions())?;
        Ok(self
            .steps
            .iter()
            .zip(&replay.steps)
            .enumerate()
            .find_map(|(step, ((_, want), (_, got)))| {
                let (expected, actual) = (want.to_string(), got.to_string());
                (expected != actual).then_some(Divergence { step, expected, actual })
            }))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("world {}\nseed {}\n# forward strafe turn jump x y z\n", self.world, self.seed);
        for (a, p) in &self.steps {
            let _ = writeln!(
                out,
                "{} {} {} {} {:.6} {:.6} {:.6}",
                a.forward, a.strafe, a.turn, a.jump, p.x, p.y, p.z
            );
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, EnvError> {
        let mut world = None;
        let mut seed = None;
        let mut steps = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let err = |message: String| EnvError::Parse { line: i + 1, message };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let words: Vec<&str> = body.split_whitespace().collect();
            match words[0] {
                "world" if words.len() == 2 => {
                    world = Some(words[1].parse::<WorldName>().map_err(|e| err(e.to_string()))?)
                }
                "seed" if words.len() == 2 => {
                    seed = Some(words[1].parse::<u64>().map_err(|e| err(e.to_string()))?)
                }
                _ if words.len() == 7 => {
                    let mut axis = [0i8; 4];
                    for (slot, w) in axis.iter_mut().zip(&words[..4]) {
                        *slot = w.parse().map_err(|_| err(format!("bad action component {w:?}")))?;
                    }
                    let action = Action::new(axis[0], axis[1], axis[2], axis[3]).map_err(|e| err(e.to_string()))?;
                    let mut xyz = [0.0; 3];
                    for (slot, w) in xyz.iter_mut().zip(&words[4..]) {
                        *slot = w.parse().map_err(|_| err(format!("bad coordinate {w:?}")))?;
                    }
                    steps.push((action, Position::from_array(xyz)));
                }
                _ => return Err(err(format!("unrecognized line {body:?}"))),
            }
        }
        let missing = |what: &str| EnvError::Parse { line: 0, message: format!("missing {what}") };
        Ok(Self {
            world: world.ok_or_else(|| missing("world"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
            steps,
        })
    }
}
