use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{render_topdown, PointRecord, RunReport, SeriesRow, Summary};
use crate::geometry::Position;
use crate::navmesh::{parse_navmesh, write_navmesh, Goal, GoalStatus, NavMesh, PointClass};

pub const SERIES_FILE: &str = "series.csv";
pub const POINTS_FILE: &str = "points.csv";
pub const GOALS_FILE: &str = "goals.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const MAP_FILE: &str = "map.svg";
pub const NAVMESH_FILE: &str = "navmesh.txt";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
}

impl ReportError {
    /// Whether the error is a missing input file.
    pub fn is_not_found(&self) -> bool {
        matches!(self, ReportError::Io { source, .. } if source.kind() == io::ErrorKind::NotFound)
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ReportError + '_ {
    move |source| ReportError::Io { path: path.to_path_buf(), source }
}

fn format_err(path: &Path, message: impl ToString) -> ReportError {
    ReportError::Format { path: path.to_path_buf(), message: message.to_string() }
}

fn write(path: &Path, contents: &str) -> Result<(), ReportError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn read(path: &Path) -> Result<String, ReportError> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

fn csv_text(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii fields")
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, ReportError> {
    let text = read(path)?;
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| format_err(path, e))
}

pub fn series_csv(series: &[SeriesRow]) -> String {
    csv_text(
        &["t", "goals_reached", "goals_total", "unique_positions"],
        series.iter().map(|r| {
            vec![r.t.to_string(), r.goals_reached.to_string(), r.goals_total.to_string(), r.unique_positions.to_string()]
        }),
    )
}

pub fn points_csv(points: &[PointRecord]) -> String {
    csv_text(
        &["id", "x", "y", "z", "class", "visit_count", "first_seen"],
        points.iter().map(|p| {
            vec![
                p.id.to_string(),
                fixed(p.position.x),
                fixed(p.position.y),
                fixed(p.position.z),
                p.class.as_str().to_string(),
                p.visit_count.to_string(),
                p.first_seen.to_string(),
            ]
        }),
    )
}

pub fn goals_csv(goals: &[Goal]) -> String {
    csv_text(
        &["id", "x", "y", "z", "status", "reached_at"],
        goals.iter().enumerate().map(|(i, g)| {
            let (status, at) = match g.status {
                GoalStatus::Reached(t) => ("reached", t.to_string()),
                GoalStatus::Unreached => ("unreached", String::new()),
            };
            vec![i.to_string(), fixed(g.position.x), fixed(g.position.y), fixed(g.position.z), status.into(), at]
        }),
    )
}

pub fn summary_json(summary: &Summary) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
    s.push('\n');
    s
}

/// Writes the full report directory. `extra` holds additional
/// `(file name, contents)` pairs, such as the resolved config.
pub fn write_report_dir(
    dir: &Path,
    report: &RunReport,
    mesh: &NavMesh,
    extra: &[(&str, &str)],
) -> Result<(), ReportError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write(&dir.join(SERIES_FILE), &series_csv(&report.series))?;
    write(&dir.join(POINTS_FILE), &points_csv(&report.points))?;
    write(&dir.join(GOALS_FILE), &goals_csv(&report.goals))?;
    write(&dir.join(SUMMARY_FILE), &summary_json(&report.summary))?;
    write(&dir.join(NAVMESH_FILE), &write_navmesh(mesh))?;
    write(&dir.join(MAP_FILE), &report.render(mesh))?;
    for (name, contents) in extra {
        write(&dir.join(name), contents)?;
    }
    Ok(())
}

pub fn read_series(dir: &Path) -> Result<Vec<SeriesRow>, ReportError> {
    read_csv(&dir.join(SERIES_FILE))
}

#[derive(Serialize, Deserialize)]
struct PointRow {
    id: usize,
    x: f64,
    y: f64,
    z: f64,
    class: String,
    visit_count: u64,
    first_seen: u64,
}

pub fn read_points(dir: &Path) -> Result<Vec<PointRecord>, ReportError> {
    let path = dir.join(POINTS_FILE);
    read_csv::<PointRow>(&path)?
        .into_iter()
        .map(|r| {
            let class = PointClass::parse(&r.class)
                .ok_or_else(|| format_err(&path, format!("point {}: unknown class {:?}", r.id, r.class)))?;
            Ok(PointRecord {
                id: r.id,
                position: Position::new(r.x, r.y, r.z),
                class,
                visit_count: r.visit_count,
                first_seen: r.first_seen,
            })
        })
        .collect()
}

#[derive(Deserialize)]
struct GoalRow {
    x: f64,
    y: f64,
    z: f64,
    status: String,
    reached_at: Option<u64>,
}

pub fn read_goals(dir: &Path) -> Result<Vec<Goal>, ReportError> {
    let path = dir.join(GOALS_FILE);
    read_csv::<GoalRow>(&path)?
        .into_iter()
        .map(|r| {
            let status = match (r.status.as_str(), r.reached_at) {
                ("reached", Some(t)) => GoalStatus::Reached(t),
                ("unreached", None) => GoalStatus::Unreached,
                (s, _) => return Err(format_err(&path, format!("bad goal status {s:?}"))),
            };
            Ok(Goal { position: Position::new(r.x, r.y, r.z), status })
        })
        .collect()
}

pub fn read_summary(dir: &Path) -> Result<Summary, ReportError> {
    let path = dir.join(SUMMARY_FILE);
    serde_json::from_str(&read(&path)?).map_err(|e| format_err(&path, e))
}

/// Re-renders the map from a report directory's points, goals and mesh.
pub fn render_dir(dir: &Path) -> Result<String, ReportError> {
    let mesh_path = dir.join(NAVMESH_FILE);
    let points = read_points(dir)?;
    let goals = read_goals(dir)?;
    let mesh = parse_navmesh(&read(&mesh_path)?).map_err(|e| format_err(&mesh_path, e))?;
    Ok(render_topdown(&points, &goals, &mesh))
}
