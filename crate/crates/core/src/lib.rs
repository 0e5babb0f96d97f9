//! Reachability testing by Go-Explore style exploration.
//!
//! Agents wander simulated heightfield worlds, archive every position that
//! is more than a threshold away from the ones already seen, and restart
//! from archived checkpoints chosen by a reset heuristic. Positions far
//! from the navigation mesh point at places players were never meant to
//! reach.

pub mod ablation;
pub mod config;
pub mod environment;
pub mod exec;
pub mod explorer;
pub mod geometry;
pub mod navmesh;
pub mod report;
pub mod runner;
pub mod spatial_cache;
