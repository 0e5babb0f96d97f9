use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn reachprobe(args: &[&str], root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reachprobe"))
        .args(args)
        .env("REACHPROBE_OUT_ROOT", root)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("small.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const QUICK: &str = "timesteps = 4000\nagents = 4\nsingle_worker = true\n";

#[test]
fn run_writes_report_under_the_out_root() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), QUICK);
    let o = reachprobe(&["run", "--config", &cfg, "--seed", "0"], tmp.path());
    assert_eq!(code(&o), 0, "{}", text(&o));
    let dir = tmp.path().join("small_analog-mixed-seed0");
    for f in ["series.csv", "points.csv", "goals.csv", "summary.json", "map.svg", "navmesh.txt", "config.toml"] {
        assert!(dir.join(f).is_file(), "missing {f}");
    }
}

#[test]
fn flags_override_the_document_and_are_echoed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{QUICK}heuristic = \"goal\"\npower = 0.5\n"));
    let out = tmp.path().join("p2");
    let o = reachprobe(
        &["run", "--config", &cfg, "--heuristic", "visitation", "--power", "2", "--out", out.to_str().unwrap()],
        tmp.path(),
    );
    assert_eq!(code(&o), 0, "{}", text(&o));
    let echoed = fs::read_to_string(out.join("config.toml")).unwrap();
    assert!(echoed.contains("heuristic = \"visitation\""), "{echoed}");
    assert!(echoed.contains("power = 2.0"), "{echoed}");
    let summary = fs::read_to_string(out.join("summary.json")).unwrap();
    assert!(summary.contains("\"heuristic\": \"visitation p=2\""), "{summary}");
}

#[test]
fn config_errors_exit_2_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path().join("root");
    let cfg = write_config(tmp.path(), "timesteps = 4000\nreset_every = 3\n");
    let o = reachprobe(&["run", "--config", &cfg], &root);
    assert_eq!(code(&o), 2, "{}", text(&o));
    assert!(text(&o).contains("reset_every"));

    let missing = tmp.path().join("nope.toml");
    let o = reachprobe(&["run", "--config", missing.to_str().unwrap()], &root);
    assert_eq!(code(&o), 2, "{}", text(&o));

    let o = reachprobe(&["run", "--world", "moon", "--timesteps", "1000"], &root);
    assert_eq!(code(&o), 2, "{}", text(&o));

    let o = reachprobe(&["run", "--heuristic", "novelty"], &root);
    assert_eq!(code(&o), 2, "{}", text(&o));
    assert!(!root.exists());
}

#[test]
fn single_worker_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), QUICK);
    let [a, b] = ["a", "b"].map(|d| tmp.path().join(d));
    for dir in [&a, &b] {
        let o = reachprobe(&["run", "--config", &cfg, "--seed", "3", "--out", dir.to_str().unwrap()], tmp.path());
        assert_eq!(code(&o), 0, "{}", text(&o));
    }
    for f in ["series.csv", "points.csv", "goals.csv", "summary.json", "map.svg"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn render_reproduces_the_map() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), QUICK);
    let dir = tmp.path().join("r");
    let o = reachprobe(&["run", "--config", &cfg, "--out", dir.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 0, "{}", text(&o));
    let copy = tmp.path().join("again.svg");
    let o = reachprobe(&["render", dir.to_str().unwrap(), "--output", copy.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 0, "{}", text(&o));
    assert_eq!(fs::read(copy).unwrap(), fs::read(dir.join("map.svg")).unwrap());

    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let o = reachprobe(&["render", empty.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 2, "{}", text(&o));
}

#[test]
fn worlds_lists_the_builtins() {
    let tmp = tempfile::tempdir().unwrap();
    let o = reachprobe(&["worlds"], tmp.path());
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8(o.stdout).unwrap();
    let names: Vec<&str> = stdout.lines().filter(|l| !l.starts_with(' ')).collect();
    assert_eq!(names, ["small_analog", "large_analog", "traversal_analog"]);
}

#[test]
fn ablate_with_one_configuration() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), QUICK);
    let sweep = tmp.path().join("sweep.toml");
    fs::write(&sweep, "seeds = 2\n[[variant]]\nheuristic = \"goal\"\nthreshold_k = 5.0\n").unwrap();
    let out = tmp.path().join("ab");
    let o = reachprobe(
        &["ablate", "--config", &cfg, "--sweep", sweep.to_str().unwrap(), "--out", out.to_str().unwrap()],
        tmp.path(),
    );
    assert_eq!(code(&o), 0, "{}", text(&o));
    let table = fs::read_to_string(out.join("ablation.md")).unwrap();
    assert_eq!(table.lines().count(), 3, "{table}");
    assert!(table.contains("| goal, K=5 |"), "{table}");
    let runs = fs::read_to_string(out.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 3);
    assert!(out.join("goal-k-5/seed1/summary.json").is_file());
}

#[test]
fn ablate_rejects_a_bad_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let sweep = tmp.path().join("sweep.toml");
    fs::write(&sweep, "[[variant]]\nheuristic = \"goal\"\nspeed = 3\n").unwrap();
    let out = tmp.path().join("ab");
    let o = reachprobe(&["ablate", "--sweep", sweep.to_str().unwrap(), "--out", out.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 2, "{}", text(&o));
    assert!(!out.exists());
}
