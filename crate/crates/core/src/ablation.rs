//! Hyperparameter sweeps over the small world, aggregated per
//! configuration as mean ± sample standard deviation.
//!
//! A sweep is a list of variants (heuristic, threshold, power) run with
//! seeds `base, base + 1, ..`. Each run writes its own report directory
//! `<out>/<variant slug>/seed<seed>/`; the sweep writes `runs.csv` (one row
//! per run), `ablation.csv` (one row per variant) and `ablation.md`.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{HeuristicName, RunConfig};
use crate::exec::Execution;
use crate::runner::{execute, write_run, RunError};

pub const RUNS_FILE: &str = "runs.csv";
pub const TABLE_CSV_FILE: &str = "ablation.csv";
pub const TABLE_MD_FILE: &str = "ablation.md";
pub const DEFAULT_SEEDS: usize = 4;

#[derive(Debug, Error)]
pub enum AblationError {
    #[error("run {label} seed {seed}: {source}")]
    Run {
        label: String,
        seed: u64,
        #[source]
        source: RunError,
    },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Sweep(String),
}

/// One configuration of a sweep. Unset threshold or power fall back to the
/// base config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    #[serde(default)]
    pub label: Option<String>,
    pub heuristic: HeuristicName,
    #[serde(default)]
    pub threshold_k: Option<f64>,
    #[serde(default)]
    pub power: Option<f64>,
}

impl Variant {
    fn new(heuristic: HeuristicName, threshold_k: Option<f64>, power: Option<f64>) -> Self {
        Self { label: None, heuristic, threshold_k, power }
    }

    pub fn label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        let mut parts = Vec::new();
        if let Some(k) = self.threshold_k {
            parts.push(format!("K={k}"));
        }
        if let Some(p) = self.power {
            parts.push(format!("p={p}"));
        }
        if parts.is_empty() {
            format!("{}, default", self.heuristic)
        } else {
            format!("{}, {}", self.heuristic, parts.join(", "))
        }
    }

    /// Directory-safe form of the label.
    pub fn slug(&self) -> String {
        let mut out = String::new();
        for c in self.label().chars() {
            match c {
                'a'..='z' | 'A'..='Z' | '0'..='9' | '.' => out.push(c.to_ascii_lowercase()),
                _ if !out.ends_with('-') && !out.is_empty() => out.push('-'),
                _ => {}
            }
        }
        out.trim_end_matches('-').to_string()
    }

    fn resolve(&self, base: &RunConfig, seed: u64) -> RunConfig {
        RunConfig {
            heuristic: self.heuristic,
            threshold_k: self.threshold_k.unwrap_or(base.threshold_k),
            power: self.power.unwrap_or(base.power),
            seed,
            world_seed: base.world_seed,
            out: None,
            ..base.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    #[serde(rename = "variant")]
    pub variants: Vec<Variant>,
}

fn default_seeds() -> usize {
    DEFAULT_SEEDS
}

impl Default for Sweep {
    /// {goal, visitation} × {default, K=5, p=0.5, p=2}, four seeds each.
    fn default() -> Self {
        let mut variants = Vec::new();
        for h in [HeuristicName::Goal, HeuristicName::Visitation] {
            variants.push(Variant::new(h, None, None));
            variants.push(Variant::new(h, Some(5.0), None));
            variants.push(Variant::new(h, None, Some(0.5)));
            variants.push(Variant::new(h, None, Some(2.0)));
        }
        Self { seeds: DEFAULT_SEEDS, variants }
    }
}

impl Sweep {
    /// Parses a sweep document:
    ///
    /// ```toml
    /// seeds = 4
    /// [[variant]]
    /// heuristic = "goal"
    /// threshold_k = 5.0
    /// ```
    pub fn parse(text: &str) -> Result<Self, AblationError> {
        let sweep: Self = toml::from_str(text).map_err(|e| AblationError::Sweep(e.message().to_string()))?;
        sweep.validate()?;
        Ok(sweep)
    }

    pub fn validate(&self) -> Result<(), AblationError> {
        if self.seeds == 0 {
            return Err(AblationError::Sweep("seeds must be positive".into()));
        }
        if self.variants.is_empty() {
            return Err(AblationError::Sweep("a sweep needs at least one variant".into()));
        }
        let mut slugs: Vec<String> = self.variants.iter().map(Variant::slug).collect();
        slugs.sort();
        if slugs.windows(2).any(|w| w[0] == w[1]) {
            return Err(AblationError::Sweep("variant labels must be distinct".into()));
        }
        Ok(())
    }
}

/// Outcome of one sub-run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub label: String,
    pub heuristic: HeuristicName,
    pub threshold_k: f64,
    pub power: f64,
    pub seed: u64,
    pub world_seed: u64,
    pub timesteps_to_all_goals: Option<u64>,
    pub positions_found: usize,
    pub goals_reached: usize,
    pub goals_total: usize,
    pub final_goal_pct: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Mean and sample (n - 1) standard deviation; a single value has std 0.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Some(Self { mean, std })
    }
}

/// One table row.
#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub label: String,
    pub runs: usize,
    /// Runs that reached every goal; the timestep statistics cover these.
    pub reached_all: usize,
    pub timesteps_to_all_goals: Option<MeanStd>,
    pub positions_found: MeanStd,
    pub final_goal_pct: MeanStd,
}

pub fn aggregate(label: &str, runs: &[&RunRecord]) -> Aggregate {
    let tta: Vec<f64> = runs.iter().filter_map(|r| r.timesteps_to_all_goals).map(|t| t as f64).collect();
    let positions: Vec<f64> = runs.iter().map(|r| r.positions_found as f64).collect();
    let pct: Vec<f64> = runs.iter().map(|r| r.final_goal_pct).collect();
    Aggregate {
        label: label.to_string(),
        runs: runs.len(),
        reached_all: tta.len(),
        timesteps_to_all_goals: MeanStd::of(&tta),
        positions_found: MeanStd::of(&positions).unwrap_or(MeanStd { mean: 0.0, std: 0.0 }),
        final_goal_pct: MeanStd::of(&pct).unwrap_or(MeanStd { mean: 0.0, std: 0.0 }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AblationReport {
    pub runs: Vec<RunRecord>,
    pub rows: Vec<Aggregate>,
}

/// Runs the sweep. Sub-runs go through `exec` (in parallel by default).
/// On a failed sub-run the completed rows are still written to `runs.csv`
/// before the error is returned.
pub fn run_ablation(
    base: &RunConfig,
    sweep: &Sweep,
    out: &Path,
    exec: Execution,
) -> Result<AblationReport, AblationError> {
    sweep.validate()?;
    fs::create_dir_all(out).map_err(|source| AblationError::Io { path: out.to_path_buf(), source })?;
    let jobs: Vec<(usize, u64)> = (0..sweep.variants.len())
        .flat_map(|v| (0..sweep.seeds as u64).map(move |i| (v, base.seed + i)))
        .collect();
    let results = exec.map(&jobs, |&(v, seed)| {
        let variant = &sweep.variants[v];
        let config = variant.resolve(base, seed);
        let fail = |source: RunError| AblationError::Run { label: variant.label(), seed, source };
        let (world, report) = execute(&config).map_err(fail)?;
        let dir = out.join(variant.slug()).join(format!("seed{seed}"));
        write_run(&dir, &config, &world, &report).map_err(fail)?;
        let s = &report.summary;
        Ok(RunRecord {
            label: variant.label(),
            heuristic: variant.heuristic,
            threshold_k: config.threshold_k,
            power: config.power,
            seed,
            world_seed: config.world_seed(),
            timesteps_to_all_goals: s.timesteps_to_all_goals,
            positions_found: s.final_unique_positions,
            goals_reached: s.goals_reached,
            goals_total: s.goals_total,
            final_goal_pct: s.final_goal_pct,
        })
    });

    let mut runs = Vec::new();
    let mut first_error = None;
    for r in results {
        match r {
            Ok(record) => runs.push(record),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    write_file(&out.join(RUNS_FILE), &runs_csv(&runs))?;
    if let Some(e) = first_error {
        return Err(e);
    }

    let rows: Vec<Aggregate> = sweep
        .variants
        .iter()
        .map(|v| {
            let label = v.label();
            let mine: Vec<&RunRecord> = runs.iter().filter(|r| r.label == label).collect();
            aggregate(&label, &mine)
        })
        .collect();
    write_file(&out.join(TABLE_CSV_FILE), &table_csv(&rows))?;
    write_file(&out.join(TABLE_MD_FILE), &table_markdown(&rows))?;
    Ok(AblationReport { runs, rows })
}

fn write_file(path: &Path, contents: &str) -> Result<(), AblationError> {
    fs::write(path, contents).map_err(|source| AblationError::Io { path: path.to_path_buf(), source })
}

fn csv_string(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn runs_csv(runs: &[RunRecord]) -> String {
    csv_string(
        &[
            "label",
            "heuristic",
            "threshold_k",
            "power",
            "seed",
            "world_seed",
            "timesteps_to_all_goals",
            "positions_found",
            "goals_reached",
            "goals_total",
            "final_goal_pct",
        ],
        runs.iter().map(|r| {
            vec![
                r.label.clone(),
                r.heuristic.to_string(),
                r.threshold_k.to_string(),
                r.power.to_string(),
                r.seed.to_string(),
                r.world_seed.to_string(),
                opt(r.timesteps_to_all_goals),
                r.positions_found.to_string(),
                r.goals_reached.to_string(),
                r.goals_total.to_string(),
                format!("{:.6}", r.final_goal_pct),
            ]
        }),
    )
}

pub fn read_runs_csv(text: &str) -> Result<Vec<RunRecord>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

pub fn table_csv(rows: &[Aggregate]) -> String {
    csv_string(
        &[
            "label",
            "runs",
            "reached_all",
            "timesteps_to_all_goals_mean",
            "timesteps_to_all_goals_std",
            "positions_found_mean",
            "positions_found_std",
            "final_goal_pct_mean",
        ],
        rows.iter().map(|a| {
            vec![
                a.label.clone(),
                a.runs.to_string(),
                a.reached_all.to_string(),
                opt(a.timesteps_to_all_goals.map(|m| fixed(m.mean))),
                opt(a.timesteps_to_all_goals.map(|m| fixed(m.std))),
                fixed(a.positions_found.mean),
                fixed(a.positions_found.std),
                fixed(a.final_goal_pct.mean),
            ]
        }),
    )
}

/// Markdown table of timesteps to all goals and positions found. When only
/// some runs reached every goal, the timestep figure covers those runs and
/// says how many.
pub fn table_markdown(rows: &[Aggregate]) -> String {
    let mut out = String::from("| Configuration | Timesteps to All Goals | Positions Found |\n|---|---|---|\n");
    for a in rows {
        let tta = match a.timesteps_to_all_goals {
            None => format!("not reached (0/{})", a.runs),
            Some(m) if a.reached_all == a.runs => format!("{:.0} ± {:.0}", m.mean, m.std),
            Some(m) => format!("{:.0} ± {:.0} ({}/{})", m.mean, m.std, a.reached_all, a.runs),
        };
        let _ = writeln!(
            out,
            "| {} | {tta} | {:.0} ± {:.0} |",
            a.label, a.positions_found.mean, a.positions_found.std
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_sweep_mirrors_the_table() {
        let sweep = Sweep::default();
        assert_eq!((sweep.variants.len(), sweep.seeds), (8, 4));
        let labels: Vec<String> = sweep.variants.iter().map(Variant::label).collect();
        assert_eq!(labels[0], "goal, default");
        assert_eq!(labels[1], "goal, K=5");
        assert_eq!(labels[7], "visitation, p=2");
        assert_eq!(sweep.variants[2].slug(), "goal-p-0.5");
        sweep.validate().unwrap();
    }

    #[test]
    fn sweep_documents_parse() {
        let s = Sweep::parse("seeds = 2\n[[variant]]\nheuristic = \"visitation\"\npower = 2.0\n").unwrap();
        assert_eq!(s.seeds, 2);
        assert_eq!(s.variants[0].label(), "visitation, p=2");
        assert!(Sweep::parse("[[variant]]\nheuristic = \"goal\"\nspeed = 1\n").is_err());
        assert!(Sweep::parse("seeds = 4\n").is_err());
        assert!(Sweep::parse("[[variant]]\nheuristic = \"goal\"\n[[variant]]\nheuristic = \"goal\"\n").is_err());
    }

    #[test]
    fn sample_standard_deviation() {
        let m = MeanStd::of(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert_eq!(m.mean, 5.0);
        assert!((m.std - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert_eq!(MeanStd::of(&[3.0]).unwrap().std, 0.0);
        assert!(MeanStd::of(&[]).is_none());
    }

    #[test]
    fn partial_coverage_is_spelled_out() {
        let rec = |t| RunRecord {
            label: "x".into(),
            heuristic: HeuristicName::Goal,
            threshold_k: 1.0,
            power: 1.0,
            seed: 0,
            world_seed: 0,
            timesteps_to_all_goals: t,
            positions_found: 10,
            goals_reached: 1,
            goals_total: 2,
            final_goal_pct: 50.0,
        };
        let (a, b) = (rec(Some(1000)), rec(None));
        let md = table_markdown(&[aggregate("x", &[&a, &b]), aggregate("y", &[&b])]);
        assert!(md.contains("| x | 1000 ± 0 (1/2) | 10 ± 0 |"), "{md}");
        assert!(md.contains("| y | not reached (0/1) |"), "{md}");
        assert_eq!(read_runs_csv(&runs_csv(&[a.clone(), b.clone()])).unwrap(), vec![a, b]);
    }

    #[test]
    fn small_sweep_writes_every_file() {
        let base = RunConfig { timesteps: 3_000, agents: 2, single_worker: true, ..RunConfig::default() };
        let sweep = Sweep::parse("seeds = 2\n[[variant]]\nheuristic = \"goal\"\n").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let report = run_ablation(&base, &sweep, dir.path(), Execution::default()).unwrap();
        assert_eq!(report.runs.len(), 2);
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.runs.iter().map(|r| r.seed).collect::<Vec<_>>(), [0, 1]);
        for f in [RUNS_FILE, TABLE_CSV_FILE, TABLE_MD_FILE] {
            assert!(dir.path().join(f).is_file(), "{f}");
        }
        assert!(dir.path().join("goal-default/seed1/summary.json").is_file());
        let text = fs::read_to_string(dir.path().join(RUNS_FILE)).unwrap();
        assert_eq!(read_runs_csv(&text).unwrap(), report.runs);
    }
}
