//! One configured run, from document to report directory.

use std::path::Path;

use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::environment::{build_world, EnvError, World};
use crate::explorer::{run, ExplorerError};
use crate::report::{write_report_dir, ReportError, RunReport};

/// Name of the resolved config written next to the report.
pub const CONFIG_FILE: &str = "config.toml";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    World(#[from] EnvError),
    #[error(transparent)]
    Explore(#[from] ExplorerError),
    #[error(transparent)]
    Report(#[from] ReportError),
}

impl RunError {
    /// Whether the failure lies with the input rather than the run.
    pub fn is_input_error(&self) -> bool {
        matches!(self, RunError::Config(_) | RunError::World(EnvError::UnknownWorld(_)))
    }
}

pub fn execute(config: &RunConfig) -> Result<(World, RunReport), RunError> {
    config.validate()?;
    let world = build_world(&config.world, config.world_seed())?;
    let report = run(&world, &config.explorer_config())?;
    Ok((world, report))
}

/// Writes the report plus the resolved config.
pub fn write_run(dir: &Path, config: &RunConfig, world: &World, report: &RunReport) -> Result<(), RunError> {
    let resolved = config.to_toml();
    write_report_dir(dir, report, &world.spec().navmesh, &[(CONFIG_FILE, &resolved)])?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{read_summary, render_dir, MAP_FILE};

    #[test]
    fn run_writes_a_complete_directory() {
        let config = RunConfig { timesteps: 2_000, agents: 2, single_worker: true, ..RunConfig::default() };
        let (world, report) = execute(&config).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_run(dir.path(), &config, &world, &report).unwrap();
        let echoed = RunConfig::load(&dir.path().join(CONFIG_FILE)).unwrap();
        assert_eq!(echoed, config);
        let summary = read_summary(dir.path()).unwrap();
        assert_eq!(summary.world.as_deref(), Some("small_analog"));
        assert_eq!(summary.total_timesteps, 2_000);
        let map = std::fs::read_to_string(dir.path().join(MAP_FILE)).unwrap();
        assert_eq!(render_dir(dir.path()).unwrap(), map);
    }
}
