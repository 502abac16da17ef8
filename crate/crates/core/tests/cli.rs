use std::fs;
use std::path::Path;

use qhd::cli::{main_with_args, EXIT_OK, EXIT_PARTIAL, EXIT_VALIDATION};

fn run(dir: &Path, command: &str, config: &str, extra: &[&str]) -> i32 {
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    let mut args = vec![
        "qhd".to_string(),
        command.to_string(),
        "--config".to_string(),
        cfg.display().to_string(),
        "--out".to_string(),
        out.display().to_string(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    main_with_args(args)
}

fn summary_value(dir: &Path, key: &str) -> String {
    let text = fs::read_to_string(dir.join("out/summary.txt")).unwrap();
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")).map(str::to_string))
        .unwrap_or_else(|| panic!("{key} missing from summary:\n{text}"))
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect();
    (header, rows)
}

const OSCILLATOR: &str = "\
potential.name = quadratic
potential.scale = 0.5
schedule.kind = exponential
schedule.c = 1
grid.N = 64
grid.R = 4
init.x0 = 0.5
evolve.T = 1
";

#[test]
fn free_particle_conserves_the_norm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "potential.name = free\nschedule.kind = exponential\ngrid.N = 32\nevolve.T = 2\n";
    assert_eq!(run(dir.path(), "simulate", cfg, &[]), EXIT_OK);
    let drift: f64 = summary_value(dir.path(), "norm_drift").parse().unwrap();
    assert!(drift < 1e-10, "drift {drift}");
    assert!(dir.path().join("out/series.csv").exists());
    let manifest = fs::read_to_string(dir.path().join("out/manifest.txt")).unwrap();
    assert!(manifest.contains("evolve.tol = 1e-6  # default"), "{manifest}");
}

#[test]
fn identical_runs_write_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{OSCILLATOR}evolve.record_every = 10\n");
    let mut series = Vec::new();
    for _ in 0..2 {
        assert_eq!(run(dir.path(), "simulate", &cfg, &["--seed", "9"]), EXIT_OK);
        series.push(fs::read(dir.path().join("out/series.csv")).unwrap());
    }
    assert_eq!(series[0], series[1]);
    let opt = "potential.name = abs_l1\noptimize.x0 = 0.2\noptimize.R = 1\noptimize.eps = 0.2\n\
               optimize.N = 32\noptimize.tol = 1e-2\noptimize.repeats = 2\n";
    let mut runs = Vec::new();
    for _ in 0..2 {
        assert_eq!(run(dir.path(), "optimize", opt, &["--seed", "4"]), EXIT_OK);
        runs.push(fs::read(dir.path().join("out/runs.csv")).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn validation_errors_are_reported_together() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "potential.name = quadratic\nschedule.kind = polynomial\nschedule.k = 2\ngrid.N = 16\n\
               evolve.T = 2\nbogus.key = 1\n";
    assert_eq!(run(dir.path(), "simulate", cfg, &[]), EXIT_VALIDATION);
    assert_eq!(run(dir.path(), "optimize", OSCILLATOR, &[]), EXIT_VALIDATION);
    assert_eq!(run(dir.path(), "simulate", OSCILLATOR, &["--set", "grid.N=auto"]), EXIT_VALIDATION);
    assert_eq!(run(dir.path(), "nonsense", OSCILLATOR, &[]), EXIT_VALIDATION);
}

#[test]
fn step_budget_gives_partial_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{OSCILLATOR}evolve.max_steps = 5\n");
    assert_eq!(run(dir.path(), "simulate", &cfg, &[]), EXIT_PARTIAL);
    assert!(dir.path().join("out/series.csv").exists());
    assert!(dir.path().join("out/summary.txt").exists());
}

#[test]
fn estimate_table_lists_every_method() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), "estimate", "", &[]), EXIT_OK);
    let (header, rows) = read_csv(&dir.path().join("out/table1.csv"));
    assert_eq!(header, ["method", "queries", "noise"]);
    let methods: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    for name in [
        "QHD simulation",
        "Simulated annealing",
        "Stochastic gradient estimator",
        "Quantum simulated annealing",
        "Quantum subgradient method",
    ] {
        assert!(methods.contains(&name), "{name} missing from {methods:?}");
    }
    assert_eq!(summary_value(dir.path(), "queries_binary"), "5262");
}

#[test]
fn baseline_table_shows_the_crossover() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), "baseline-table", "", &[]), EXIT_OK);
    assert_eq!(summary_value(dir.path(), "qhd_below_classical_baselines"), "true");
}

#[test]
fn empty_sweep_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{OSCILLATOR}sweep.key = evolve.dt\nsweep.values =\n");
    assert_eq!(run(dir.path(), "sweep", &cfg, &[]), EXIT_OK);
    let text = fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
    assert!(text.starts_with("evolve.dt,status"));
}

#[test]
fn dt_sweep_shows_second_order_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        "{OSCILLATOR}evolve.adaptive = false\nsweep.key = evolve.dt\nsweep.values = 0.01, 0.005, 0.0025\n"
    );
    assert_eq!(run(dir.path(), "sweep", &cfg, &[]), EXIT_OK);
    let (header, rows) = read_csv(&dir.path().join("out/sweep.csv"));
    let col = header.iter().position(|h| h == "step_error").unwrap();
    let errs: Vec<f64> = rows.iter().map(|r| r[col].parse().unwrap()).collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.3..=4.7).contains(&ratio), "ratio {ratio} from {errs:?}");
    }
}

#[test]
fn grid_sweep_reduces_interpolation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        "{}init.sigma = 0.3\nevolve.T = 0.1\nsweep.key = grid.N\nsweep.values = 16, 32, 64\n",
        OSCILLATOR.replace("evolve.T = 1\n", "")
    );
    assert_eq!(run(dir.path(), "sweep", &cfg, &[]), EXIT_OK);
    let (header, rows) = read_csv(&dir.path().join("out/sweep.csv"));
    assert_eq!(rows.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), ["16", "32", "64"]);
    let col = header.iter().position(|h| h == "interpolation_error").unwrap();
    let errs: Vec<f64> = rows.iter().map(|r| r[col].parse().unwrap()).collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn failing_sweep_rows_are_marked() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{OSCILLATOR}sweep.key = grid.N\nsweep.values = 24, 32\n");
    assert_eq!(run(dir.path(), "sweep", &cfg, &[]), EXIT_OK);
    let (_, rows) = read_csv(&dir.path().join("out/sweep.csv"));
    assert!(rows[0][1].starts_with("failed"), "{rows:?}");
    assert_eq!(rows[1][1], "ok");
}
