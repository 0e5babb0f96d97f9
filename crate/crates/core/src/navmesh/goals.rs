use std::collections::HashMap;

use rstar::primitives::GeomWithData;
use rstar::RTree;
use serde::{Deserialize, Serialize};

use super::{NavMesh, NavMeshError, Polygon};
use crate::geometry::Position;

/// A goal is drained once a discovered position comes this close (inclusive).
pub const DRAIN_RADIUS: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GoalStatus {
    Unreached,
    Reached(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Goal {
    pub position: Position,
    pub status: GoalStatus,
}

impl Goal {
    pub fn unreached(position: Position) -> Self {
        Self {
            position,
            status: GoalStatus::Unreached,
        }
    }

    pub fn is_reached(&self) -> bool {
        matches!(self.status, GoalStatus::Reached(_))
    }
}

/// Samples goal points from every polygon of `mesh`.
///
/// Each polygon gets an axis-aligned lattice in its own plane with cell size
/// `spacing`, centred on the polygon's bounding rectangle; lattice points
/// inside the polygon become goals. Polygons narrower than `spacing` along
/// both axes, or that catch no lattice point, contribute their centroid.
/// Candidates closer than `spacing / 2` to an earlier goal (for example on
/// an edge shared by two polygons) are dropped.
pub fn sample_goals(mesh: &NavMesh, spacing: f64) -> Result<Vec<Goal>, NavMeshError> {
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(NavMeshError::InvalidSpacing(spacing));
    }
    let min_gap = spacing / 2.0;
    let mut goals: Vec<Goal> = Vec::new();
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    let cell = |p: &Position| {
        (
            (p.x / min_gap).floor() as i64,
            (p.y / min_gap).floor() as i64,
            (p.z / min_gap).floor() as i64,
        )
    };

    for poly in mesh.polygons() {
        for candidate in polygon_candidates(poly, spacing) {
            let c = cell(&candidate);
            let crowded = (-1..=1).any(|dx| {
                (-1..=1).any(|dy| {
                    (-1..=1).any(|dz| {
                        grid.get(&(c.0 + dx, c.1 + dy, c.2 + dz)).is_some_and(|ids| {
                            ids.iter().any(|&g| goals[g].position.distance(&candidate) < min_gap)
                        })
                    })
                })
            });
            if !crowded {
                grid.entry(c).or_default().push(goals.len());
                goals.push(Goal::unreached(candidate));
            }
        }
    }
    Ok(goals)
}

fn polygon_candidates(poly: &Polygon, spacing: f64) -> Vec<Position> {
    let (amin, amax) = span(poly.local.iter().map(|l| l.0));
    let (bmin, bmax) = span(poly.local.iter().map(|l| l.1));
    let (ea, eb) = (amax - amin, bmax - bmin);
    if ea < spacing && eb < spacing {
        return vec![poly.centroid()];
    }
    let axis = |lo: f64, extent: f64| {
        let n = (extent / spacing + 1e-9).floor() as usize + 1;
        let start = lo + (extent - (n - 1) as f64 * spacing) / 2.0;
        (0..n).map(move |i| start + i as f64 * spacing)
    };
    let mut out = Vec::new();
    for b in axis(bmin, eb) {
        for a in axis(amin, ea) {
            if poly.contains_local(a, b, 1e-9) {
                out.push(poly.local_to_world(a, b));
            }
        }
    }
    if out.is_empty() {
        out.push(poly.centroid());
    }
    out
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

type GoalPoint = GeomWithData<[f64; 3], usize>;

/// The goal list plus a spatial index over the goals still unreached.
///
/// Mutating calls (`drain`) must be serialized by the owner; queries are
/// read-only.
#[derive(Clone, Debug)]
pub struct GoalSet {
    goals: Vec<Goal>,
    unreached: RTree<GoalPoint>,
    reached: usize,
}

impl GoalSet {
    pub fn new(goals: Vec<Goal>) -> Self {
        let unreached = RTree::bulk_load(
            goals
                .iter()
                .enumerate()
                .filter(|(_, g)| !g.is_reached())
                .map(|(i, g)| GoalPoint::new(g.position.to_array(), i))
                .collect(),
        );
        let reached = goals.iter().filter(|g| g.is_reached()).count();
        Self {
            goals,
            unreached,
            reached,
        }
    }

    pub fn goals(&self) -> &[Goal] {
        &self.goals
    }

    pub fn len(&self) -> usize {
        self.goals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.goals.is_empty()
    }

    pub fn reached_count(&self) -> usize {
        self.reached
    }

    pub fn all_reached(&self) -> bool {
        self.reached == self.goals.len()
    }

    pub fn is_reached(&self, index: usize) -> bool {
        self.goals[index].is_reached()
    }

    /// Marks every unreached goal within [`DRAIN_RADIUS`] of `p` as reached
    /// at `t`. Returns how many flipped.
    pub fn drain(&mut self, p: &Position, t: u64) -> usize {
        let r2 = DRAIN_RADIUS * DRAIN_RADIUS * (1.0 + 1e-9);
        let hits: Vec<GoalPoint> = self
            .unreached
            .locate_within_distance(p.to_array(), r2)
            .filter(|g| self.goals[g.data].position.distance(p) <= DRAIN_RADIUS)
            .copied()
            .collect();
        for hit in &hits {
            self.unreached.remove(hit);
            self.goals[hit.data].status = GoalStatus::Reached(t);
        }
        self.reached += hits.len();
        hits.len()
    }

    /// Nearest unreached goal and its distance.
    pub fn nearest_unreached(&self, p: &Position) -> Option<(usize, f64)> {
        let g = self.unreached.nearest_neighbor(&p.to_array())?;
        Some((g.data, self.goals[g.data].position.distance(p)))
    }

    /// Distance to the closest unreached goal, `+inf` once all are reached.
    pub fn distance_to_unreached(&self, p: &Position) -> f64 {
        self.nearest_unreached(p).map_or(f64::INFINITY, |(_, d)| d)
    }
}
