//! Run results: metric series, classified points, goals and a summary,
//! plus their on-disk form and a top-down map.

mod files;
mod svg;

pub use files::{
    read_goals, read_points, read_series, read_summary, render_dir, write_report_dir, ReportError,
    GOALS_FILE, MAP_FILE, NAVMESH_FILE, POINTS_FILE, SERIES_FILE, SUMMARY_FILE,
};
pub use svg::render_topdown;

use serde::{Deserialize, Serialize};

use crate::environment::EnvFactory;
use crate::exec::Execution;
use crate::explorer::{Exploration, ExplorerConfig};
use crate::geometry::Position;
use crate::navmesh::{Goal, NavMesh, NavMeshError, PointClass};
use crate::spatial_cache::EntrySnapshot;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: u64,
    pub goals_reached: usize,
    pub goals_total: usize,
    pub unique_positions: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointRecord {
    pub id: usize,
    pub position: Position,
    pub class: PointClass,
    pub visit_count: u64,
    pub first_seen: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub world: Option<String>,
    pub world_seed: Option<u64>,
    pub seed: u64,
    pub heuristic: String,
    pub total_timesteps: u64,
    pub timesteps_to_all_goals: Option<u64>,
    pub goals_reached: usize,
    pub goals_total: usize,
    pub final_goal_pct: f64,
    pub final_unique_positions: usize,
    pub near_mesh_points: usize,
    pub off_mesh_points: usize,
    pub resets: u64,
    pub config: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub series: Vec<SeriesRow>,
    pub points: Vec<PointRecord>,
    pub goals: Vec<Goal>,
    pub summary: Summary,
}

/// Labels every archived position by its distance to the mesh. With no
/// mesh at all, everything is off-mesh.
pub fn classify_all(
    entries: &[EntrySnapshot],
    mesh: &NavMesh,
    exec: Execution,
) -> Result<Vec<PointRecord>, NavMeshError> {
    let classes: Vec<Result<PointClass, NavMeshError>> = exec.map(entries, |e| {
        if mesh.is_empty() {
            Ok(PointClass::OffMesh)
        } else {
            mesh.classify_point(&e.position)
        }
    });
    entries
        .iter()
        .zip(classes)
        .map(|(e, class)| {
            Ok(PointRecord {
                id: e.id.0,
                position: e.position,
                class: class?,
                visit_count: e.visit_count,
                first_seen: e.first_seen,
            })
        })
        .collect()
}

/// Percentage rounded to 6 decimals; 100 when there is nothing to reach.
pub fn goal_pct(reached: usize, total: usize) -> f64 {
    if total == 0 {
        return 100.0;
    }
    let pct = 100.0 * reached as f64 / total as f64;
    format!("{pct:.6}").parse().unwrap_or(pct)
}

pub fn timesteps_to_all_goals(series: &[SeriesRow]) -> Option<u64> {
    series.iter().find(|r| r.goals_reached == r.goals_total).map(|r| r.t)
}

impl RunReport {
    pub fn build<F: EnvFactory>(
        exploration: &Exploration,
        factory: &F,
        config: &ExplorerConfig,
    ) -> Result<Self, NavMeshError> {
        let points = classify_all(&exploration.entries, factory.navmesh(), config.execution)?;
        let (world, world_seed) = match factory.world_id() {
            Some((name, seed)) => (Some(name), Some(seed)),
            None => (None, None),
        };
        let goals = exploration.goals.clone();
        let reached = goals.iter().filter(|g| g.is_reached()).count();
        let near = points.iter().filter(|p| p.class == PointClass::NearMesh).count();
        let summary = Summary {
            world,
            world_seed,
            seed: config.seed,
            heuristic: config.heuristic.to_string(),
            total_timesteps: config.total_timesteps,
            timesteps_to_all_goals: timesteps_to_all_goals(&exploration.series),
            goals_reached: reached,
            goals_total: goals.len(),
            final_goal_pct: goal_pct(reached, goals.len()),
            final_unique_positions: points.len(),
            near_mesh_points: near,
            off_mesh_points: points.len() - near,
            resets: exploration.resets,
            config: serde_json::to_value(config).unwrap_or_default(),
        };
        Ok(Self {
            series: exploration.series.clone(),
            points,
            goals,
            summary,
        })
    }

    pub fn render(&self, mesh: &NavMesh) -> String {
        render_topdown(&self.points, &self.goals, mesh)
    }
}

/// Checks that the summary can be recomputed from the series, points and
/// goals. Returns the first mismatch.
pub fn check_consistency(
    summary: &Summary,
    series: &[SeriesRow],
    points: &[PointRecord],
    goals: &[Goal],
) -> Result<(), String> {
    let expect = |what: &str, stated: String, actual: String| {
        if stated == actual {
            Ok(())
        } else {
            Err(format!("{what}: summary says {stated}, files say {actual}"))
        }
    };
    let near = points.iter().filter(|p| p.class == PointClass::NearMesh).count();
    let off = points.iter().filter(|p| p.class == PointClass::OffMesh).count();
    let reached = goals.iter().filter(|g| g.is_reached()).count();
    expect("final_unique_positions", summary.final_unique_positions.to_string(), points.len().to_string())?;
    expect("near_mesh_points", summary.near_mesh_points.to_string(), near.to_string())?;
    expect("off_mesh_points", summary.off_mesh_points.to_string(), off.to_string())?;
    expect("goals_total", summary.goals_total.to_string(), goals.len().to_string())?;
    expect("goals_reached", summary.goals_reached.to_string(), reached.to_string())?;
    expect(
        "final_goal_pct",
        summary.final_goal_pct.to_string(),
        goal_pct(reached, goals.len()).to_string(),
    )?;
    expect(
        "timesteps_to_all_goals",
        format!("{:?}", summary.timesteps_to_all_goals),
        format!("{:?}", timesteps_to_all_goals(series)),
    )?;
    let last = series.last().ok_or("empty series")?;
    expect("final series t", summary.total_timesteps.to_string(), last.t.to_string())?;
    expect("final series positions", last.unique_positions.to_string(), points.len().to_string())?;
    expect("final series goals", last.goals_reached.to_string(), reached.to_string())?;
    let mut ids: Vec<usize> = points.iter().map(|p| p.id).collect();
    ids.sort_unstable();
    ids.dedup();
    expect("distinct point ids", ids.len().to_string(), points.len().to_string())?;
    Ok(())
}
