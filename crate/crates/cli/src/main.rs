use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reachprobe::ablation::{run_ablation, AblationError, Sweep, TABLE_MD_FILE};
use reachprobe::config::{HeuristicName, Overrides, RunConfig, OUT_ROOT_ENV};
use reachprobe::environment::{build_world, WorldName};
use reachprobe::exec::Execution;
use reachprobe::navmesh::PointClass;
use reachprobe::report::{render_dir, MAP_FILE};
use reachprobe::runner::{execute, write_run, RunError};

/// Configuration or input problem; nothing was written.
const EXIT_INPUT: u8 = 2;
/// The run itself failed.
const EXIT_RUNTIME: u8 = 1;

#[derive(Parser)]
#[command(name = "reachprobe", version, about = "Find out-of-bounds spots in game worlds by exploration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one exploration and write its report directory.
    Run(RunArgs),
    /// Run a hyperparameter sweep over several seeds and tabulate it.
    Ablate {
        #[command(flatten)]
        run: RunArgs,
        /// Sweep document; defaults to {goal, visitation} x {default, K=5, p=0.5, p=2}.
        #[arg(long, value_name = "PATH")]
        sweep: Option<PathBuf>,
        /// Seeds per configuration (overrides the sweep document).
        #[arg(long)]
        seeds: Option<usize>,
    },
    /// Regenerate the map of a report directory from its data files.
    Render {
        dir: PathBuf,
        /// Write the map here instead of back into the directory.
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// List the built-in worlds.
    Worlds,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    timesteps: Option<u64>,
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long, value_parser = parse_heuristic)]
    heuristic: Option<HeuristicName>,
    #[arg(long)]
    power: Option<f64>,
    #[arg(long)]
    threshold_k: Option<f64>,
    #[arg(long)]
    reset_interval: Option<u64>,
    #[arg(long)]
    world: Option<String>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Run agents round-robin on one thread; output is reproducible byte for byte.
    #[arg(long)]
    single_worker: bool,
}

fn parse_heuristic(s: &str) -> Result<HeuristicName, String> {
    s.parse()
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            world: self.world.clone(),
            seed: self.seed,
            timesteps: self.timesteps,
            agents: self.agents,
            heuristic: self.heuristic,
            power: self.power,
            threshold_k: self.threshold_k,
            reset_interval: self.reset_interval,
            out: self.out.clone(),
            single_worker: self.single_worker,
        }
    }

    fn resolve(&self) -> Result<RunConfig, String> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path).map_err(|e| e.to_string())?,
            None => RunConfig::default(),
        };
        config.apply(&self.overrides()).map_err(|e| e.to_string())?;
        Ok(config)
    }
}

fn out_root() -> Option<PathBuf> {
    env::var_os(OUT_ROOT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

struct Failure {
    code: u8,
    message: String,
}

fn input(message: impl ToString) -> Failure {
    Failure { code: EXIT_INPUT, message: message.to_string() }
}

fn runtime(message: impl ToString) -> Failure {
    Failure { code: EXIT_RUNTIME, message: message.to_string() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Ablate { run, sweep, seeds } => cmd_ablate(&run, sweep.as_deref(), seeds),
        Command::Render { dir, output } => cmd_render(&dir, output.as_deref()),
        Command::Worlds => cmd_worlds(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_run(args: &RunArgs) -> Result<(), Failure> {
    let config = args.resolve().map_err(input)?;
    let dir = config.output_dir(out_root().as_deref());
    let (world, report) = execute(&config).map_err(|e| classify(&e))?;
    write_run(&dir, &config, &world, &report).map_err(runtime)?;

    let s = &report.summary;
    println!("report: {}", dir.display());
    println!(
        "goals: {}/{} ({:.1}%)  positions: {}  off-mesh: {}",
        s.goals_reached, s.goals_total, s.final_goal_pct, s.final_unique_positions, s.off_mesh_points
    );
    match s.timesteps_to_all_goals {
        Some(t) => println!("all goals reached at t={t}"),
        None => println!("not every goal reached in {} steps", s.total_timesteps),
    }
    for bug in &world.spec().seeded_bugs {
        let hits = report
            .points
            .iter()
            .filter(|p| p.class == PointClass::OffMesh && bug.region.contains(&p.position))
            .count();
        println!("seeded bug {:?}: {hits} off-mesh points", bug.label);
    }
    Ok(())
}

fn classify(e: &RunError) -> Failure {
    if e.is_input_error() {
        input(e)
    } else {
        runtime(e)
    }
}

fn cmd_ablate(args: &RunArgs, sweep: Option<&Path>, seeds: Option<usize>) -> Result<(), Failure> {
    let base = args.resolve().map_err(input)?;
    let mut sweep = match sweep {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
            Sweep::parse(&text).map_err(|e| input(format!("{}: {e}", path.display())))?
        }
        None => Sweep::default(),
    };
    if let Some(n) = seeds {
        sweep.seeds = n;
    }
    sweep.validate().map_err(input)?;
    let dir = match &base.out {
        Some(out) => out.clone(),
        None => out_root()
            .unwrap_or_else(|| PathBuf::from(reachprobe::config::DEFAULT_OUT_ROOT))
            .join(format!("ablation-{}-seed{}", base.world, base.seed)),
    };

    let report = run_ablation(&base, &sweep, &dir, Execution::default()).map_err(|e| match &e {
        AblationError::Sweep(_) => input(&e),
        AblationError::Run { source, .. } if source.is_input_error() => input(&e),
        _ => runtime(&e),
    })?;
    println!("ablation: {} runs in {}", report.runs.len(), dir.display());
    let table = fs::read_to_string(dir.join(TABLE_MD_FILE)).map_err(runtime)?;
    print!("{table}");
    Ok(())
}

fn cmd_render(dir: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let map = render_dir(dir).map_err(|e| if e.is_not_found() { input(&e) } else { runtime(&e) })?;
    let target = output.map(Path::to_path_buf).unwrap_or_else(|| dir.join(MAP_FILE));
    fs::write(&target, map).map_err(|e| runtime(format!("{}: {e}", target.display())))?;
    println!("{}", target.display());
    Ok(())
}

fn cmd_worlds() -> Result<(), Failure> {
    for name in WorldName::ALL {
        let world = build_world(name.as_str(), 0).map_err(runtime)?;
        let spec = world.spec();
        let size = spec.bounds.max - spec.bounds.min;
        println!("{}", name.as_str());
        println!("  {}", name.description());
        println!(
            "  extent {:.0} x {:.0} m, nav-mesh {} polygons / {:.0} m2, {} seeded bugs",
            size.x,
            size.y,
            spec.navmesh.polygons().len(),
            spec.navmesh.surface_area(),
            spec.seeded_bugs.len()
        );
    }
    Ok(())
}
