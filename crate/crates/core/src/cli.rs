//! Batch experiment runner behind the `qhd` binary.
//!
//! A run reads a flat config, applies command-line overrides, writes a
//! manifest of every resolved key and then the artifacts of its subcommand:
//! CSV series and a `key = value` summary. Outputs depend only on the config
//! and seed; the manifest timestamp sits on its own line.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use rayon::prelude::*;

use crate::config::{format_float, key_spec, parse_config_with, Command, ExperimentConfig, Kind};
use crate::diagnostics::{
    aliasing_bound, decay_power_fit, decay_rate_fit, interpolation_error_measured, select_n,
    select_n_gaussian, truncation_bound, DiagnosticRecorder, CONVENTION_NOTE,
};
use crate::error::{invalid, QhdError, Result};
use crate::grid::{GridSpec, WaveState};
use crate::optimizer::{initial_gaussian, optimize_with, plan, NoiseMode, OptimizeConfig};
use crate::potential::{Oracle, OracleMode, PotentialParams, PotentialSpec};
use crate::propagator::{evolve, EvolveConfig, Evolution, NoRecord};
use crate::resources::{
    baseline_label, baseline_queries, eps_f_budget, estimate, qhd_query_lower, qhd_query_upper,
    stochastic_queries, BASELINES,
};
use crate::schedule::{Schedule, ScheduleKind};

/// Exit statuses of the runner.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qhd", version, about = "Quantum Hamiltonian Descent simulator and estimators")]
pub struct Args {
    /// simulate | optimize | estimate | bounds | sweep | baseline-table
    pub command: String,
    /// Config file with `section.key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed (overrides `seed`).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Extra `key=value` override; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

/// Ordered `key = value` summary document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    /// Records `value`; decimal numbers are rewritten in exponent form when
    /// the plain text would be very long.
    pub fn put(&mut self, key: impl Into<String>, value: impl Display) {
        let mut text = value.to_string();
        if text.contains('.') {
            if let Ok(v) = text.parse::<f64>() {
                text = format_float(v);
            }
        }
        self.entries.push((key.into(), text));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    fn put_result<T: Display>(&mut self, key: &str, value: Result<T>) {
        match value {
            Ok(v) => self.put(key, v),
            Err(e) => self.put(key, format!("unavailable ({e})")),
        }
    }
}

/// Result of a completed or partially completed run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: Summary,
    /// The run stopped early but wrote what it had.
    pub partial: bool,
}

/// Exit status for a run result.
pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(o) if o.partial => EXIT_PARTIAL,
        Ok(_) => EXIT_OK,
        Err(e) => error_exit_code(e),
    }
}

fn error_exit_code(e: &QhdError) -> i32 {
    match e {
        QhdError::Config(_)
        | QhdError::InvalidParameter(_)
        | QhdError::InvalidInput(_)
        | QhdError::UnknownName(_) => EXIT_VALIDATION,
        QhdError::StepBudget { .. } => EXIT_PARTIAL,
        _ => EXIT_RUNTIME,
    }
}

/// Parses arguments, runs the experiment and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    let level = match args.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();

    let config = match load_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return error_exit_code(&e);
        }
    };
    let out = PathBuf::from(config.text("output.dir").unwrap_or("out"));
    let result = run(&config, &out);
    match &result {
        Ok(o) if o.partial => eprintln!("partial results written to {}", out.display()),
        Ok(_) => log::info!("results written to {}", out.display()),
        Err(e) => eprintln!("error: {e}"),
    }
    exit_code(&result)
}

/// Builds the config from the file and command-line overrides.
pub fn load_config(args: &Args) -> Result<ExperimentConfig> {
    if Command::parse(&args.command).is_none() {
        return Err(QhdError::UnknownName(format!("subcommand '{}'", args.command)));
    }
    let text = match &args.config {
        Some(p) => fs::read_to_string(p)?,
        None => String::new(),
    };
    let mut overrides = vec![format!("command={}", args.command)];
    if let Some(s) = args.seed {
        overrides.push(format!("seed={s}"));
    }
    if let Some(o) = &args.out {
        overrides.push(format!("output.dir={}", o.display()));
    }
    overrides.extend(args.set.iter().cloned());
    parse_config_with(&text, &overrides).map_err(QhdError::Config)
}

/// Manifest text: version, command, timestamp line, then every resolved key.
pub fn manifest_text(config: &ExperimentConfig, timestamp: u64) -> String {
    let mut s = format!("qhd {}\n", env!("CARGO_PKG_VERSION"));
    s.push_str(&format!(
        "command = {}\n",
        config.command.map_or("unset", |c| c.name())
    ));
    s.push_str(&format!("timestamp = {timestamp}\n"));
    for line in config.resolved_lines() {
        s.push_str(&line);
        s.push('\n');
    }
    s
}

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<()> {
    fs::write(dir.join(name), contents)?;
    Ok(())
}

/// Runs the configured subcommand, writing artifacts into `out`.
///
/// On a runtime error the summary is still written with the error message.
pub fn run(config: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let command = config
        .command
        .ok_or_else(|| invalid("no subcommand given"))?;
    fs::create_dir_all(out)?;
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    write_file(out, "manifest.txt", manifest_text(config, timestamp).as_bytes())?;
    let result = match command {
        Command::Simulate => run_simulate(config, out),
        Command::Optimize => run_optimize(config, out),
        Command::Estimate => run_estimate(config, out),
        Command::Bounds => run_bounds(config, out),
        Command::BaselineTable => run_baseline_table(config, out),
        Command::Sweep => run_sweep(config, out),
    };
    match result {
        Ok(outcome) => {
            write_file(out, "summary.txt", outcome.summary.to_text().as_bytes())?;
            Ok(outcome)
        }
        Err(e) => {
            let mut s = Summary::default();
            s.put("command", command.name());
            s.put("status", "error");
            s.put("error", e.to_string().replace('\n', "; "));
            write_file(out, "summary.txt", s.to_text().as_bytes())?;
            Err(e)
        }
    }
}

fn csv_error(e: csv::Error) -> QhdError {
    QhdError::Io(std::io::Error::other(e))
}

fn write_csv(dir: &Path, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(dir.join(name)).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    for r in rows {
        w.write_record(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn join(v: &[f64]) -> String {
    v.iter().map(|&x| format_float(x)).collect::<Vec<_>>().join(";")
}

fn vector_or(config: &ExperimentConfig, key: &str, d: usize, fill: f64) -> Result<Vec<f64>> {
    match config.floats(key)? {
        Some(v) if v.len() == d => Ok(v),
        Some(v) => Err(invalid(format!("{key} has {} entries, expected {d}", v.len()))),
        None => Ok(vec![fill; d]),
    }
}

/// Objective from the registry, or `f = 0` for `free`.
fn build_potential(
    config: &ExperimentConfig,
    name: &str,
    center: Vec<f64>,
    radius: f64,
) -> Result<PotentialSpec> {
    let d = config.usize("potential.dim")?;
    if name == "free" {
        let x = center.clone();
        return PotentialSpec::custom("free", d, |_| 0.0, 0.0, 2.0, 0.0, center, radius, Some((x, 0.0)));
    }
    let params = PotentialParams {
        scale: config.f64("potential.scale")?,
        shift: config.floats("potential.shift")?,
        delta: config.f64("potential.delta")?,
        kappa: config.f64("potential.kappa")?,
    };
    PotentialSpec::named(name, d, &params, center, radius)
}

fn build_schedule(config: &ExperimentConfig) -> Result<Schedule> {
    let m0 = config.f64("schedule.m0")?;
    let omega0 = config.f64("schedule.omega0")?;
    let lambda = config.f64("schedule.lambda")?;
    match config.text("schedule.kind")? {
        "exponential" => Schedule::exponential_scaled(config.f64("schedule.c")?, m0, omega0, lambda),
        _ => Schedule::polynomial_scaled(
            config.f64("schedule.k")?,
            config.f64("schedule.t0")?,
            m0,
            omega0,
            lambda,
        ),
    }
}

fn initial_state(config: &ExperimentConfig, grid: &GridSpec) -> Result<WaveState> {
    let d = grid.dim();
    match config.text("init.kind")? {
        "plane_wave" => {
            let mode = match config.ints("init.mode")? {
                Some(m) => m,
                None => vec![1; d],
            };
            WaveState::plane_wave(grid.clone(), &mode)
        }
        _ => {
            let x0 = match config.floats("init.x0")? {
                Some(v) => v,
                None => grid.center().to_vec(),
            };
            initial_gaussian(grid, &x0, config.f64("init.sigma")?).map(|(s, _)| s)
        }
    }
}

fn evolve_config(config: &ExperimentConfig) -> Result<EvolveConfig> {
    Ok(EvolveConfig {
        dt_initial: config.f64("evolve.dt")?,
        tol_step: config.f64("evolve.tol")?,
        max_steps: config.usize("evolve.max_steps")?,
        record_every: config.usize("evolve.record_every")?,
        seed: config.int("seed").unwrap_or(0) as u64,
        adaptive: config.bool("evolve.adaptive")?,
    })
}

fn l2_distance(a: &WaveState, b: &WaveState) -> f64 {
    let (a, b) = (a.to_position(), b.to_position());
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn run_simulate(config: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let d = config.usize("potential.dim")?;
    let center = vector_or(config, "grid.center", d, 0.0)?;
    let radius = config.f64("grid.R")?;
    let n = match config.usize_or_auto("grid.N")? {
        Some(n) => n,
        None => return Err(invalid("grid.N = auto is only supported by optimize")),
    };
    let grid = GridSpec::new(d, n, center.clone(), radius)?;
    let spec = build_potential(config, config.text("potential.name")?, center.clone(), radius)?;
    let oracle = Oracle::new(spec);
    let field = oracle.grid_potential(&grid, OracleMode::Exact)?;
    let schedule = build_schedule(config)?;
    let state = initial_state(config, &grid)?;
    let t0 = config
        .f64_or_auto("evolve.t_start")?
        .unwrap_or_else(|| schedule.t_start());
    let t1 = config.f64("evolve.T")?;
    let ecfg = evolve_config(config)?;
    let (x_star, f_star) = match &oracle.spec.minimizer {
        Some((x, f)) => (x.clone(), *f),
        None => (center.clone(), 0.0),
    };

    let mut rec = DiagnosticRecorder::new(&schedule, &field, x_star, f_star);
    rec.full = config.bool("diagnostics.full")?;
    rec.leakage_delta = config.f64("diagnostics.leakage_delta")?;
    log::info!("simulate: d = {d}, N = {n}, t in [{t0}, {t1}]");
    let (evolution, stopped): (Evolution, Option<String>) =
        match evolve(&state, &schedule, t0, t1, &ecfg, &field, &mut rec) {
            Ok(ev) => (ev, None),
            Err(QhdError::StepBudget { max_steps, t, partial }) => {
                (*partial, Some(format!("step budget of {max_steps} exhausted at t = {t}")))
            }
            Err(e) => return Err(e),
        };
    let report = rec.report;
    report.write_csv(fs::File::create(out.join("series.csv"))?)?;

    let mut s = Summary::default();
    s.put("command", "simulate");
    s.put("status", if stopped.is_some() { "partial" } else { "ok" });
    if let Some(msg) = &stopped {
        s.put("error", msg);
    }
    s.put("potential", oracle.spec.name());
    s.put("d", d);
    s.put("N", n);
    s.put("t_start", t0);
    s.put("t_final", evolution.t);
    s.put("accepted_steps", evolution.accepted);
    s.put("rejected_steps", evolution.rejected);
    s.put("min_dt", evolution.min_dt);
    s.put("max_dt", evolution.max_dt);
    s.put("norm_drift", evolution.norm_drift);
    if let Some(last) = report.rows.last() {
        s.put("final_norm", last.norm);
        s.put("final_f_mean", last.f_mean);
        s.put("final_energy", last.energy);
        s.put("final_leakage", last.leakage);
        s.put("final_tail_mass", last.tail_mass);
        s.put("final_bound", last.bound);
    }
    if rec.full {
        s.put("worst_energy_increase", report.worst_energy_increase(0.0));
        let excess = report
            .rows
            .iter()
            .map(|r| r.f_mean - r.bound)
            .fold(f64::NEG_INFINITY, f64::max);
        s.put("max_excess_over_bound", excess);
    }
    let window = match config.floats("fit.window")? {
        Some(w) => (w[0], w[1]),
        None => (t0 + (t1 - t0) / 3.0, t1),
    };
    let fit = match schedule.kind() {
        ScheduleKind::Polynomial => {
            s.put("fit_kind", "power");
            decay_power_fit(&report.times(), &report.f_means(), window)
        }
        _ => {
            s.put("fit_kind", "exponential");
            decay_rate_fit(&report.times(), &report.f_means(), window)
        }
    };
    s.put("fit_window", format!("{};{}", window.0, window.1));
    match fit {
        Ok(f) => {
            s.put("fit_slope", f.slope);
            s.put("fit_r_squared", f.r_squared);
            s.put("fit_points", f.points);
        }
        Err(e) => s.put("fit_slope", format!("unavailable ({e})")),
    }

    if !ecfg.adaptive && stopped.is_none() {
        let halved = EvolveConfig {
            dt_initial: ecfg.dt_initial / 2.0,
            max_steps: ecfg.max_steps.saturating_mul(2),
            ..ecfg.clone()
        };
        let step_error = evolve(&state, &schedule, t0, t1, &halved, &field, &mut NoRecord)
            .map(|fine| l2_distance(&evolution.state, &fine.state));
        s.put_result("step_error", step_error);
    }
    s.put_result("interpolation_error", initial_interpolation_error(config, &grid));

    let a_l1 = schedule.a_integral(t0, evolution.t)?;
    let b_l1 = schedule.b_integral(t0, evolution.t)?;
    s.put("a_l1", a_l1);
    s.put("b_l1", b_l1);
    match estimate(d, n, a_l1, oracle.spec.bound.max(f64::MIN_POSITIVE), b_l1, ecfg.tol_step) {
        Ok(r) => {
            s.put("queries_binary", r.queries_binary);
            s.put("queries_phase", r.queries_phase);
            s.put("qubits", r.qubits);
            s.put("gates", r.gates);
            s.put("eps_f_budget", r.eps_f);
        }
        Err(e) => s.put("resource_estimate", format!("unavailable ({e})")),
    }
    put_ledger(&mut s, &oracle);
    s.put("convention", CONVENTION_NOTE);
    Ok(Outcome {
        summary: s,
        partial: stopped.is_some(),
    })
}

/// `‖φ - I_N φ‖` for the initial state, measured on a grid four times finer.
fn initial_interpolation_error(config: &ExperimentConfig, grid: &GridSpec) -> Result<f64> {
    let fine_n = grid.half() * 4;
    if (2 * fine_n).pow(grid.dim() as u32) > 1 << 24 {
        return Err(invalid("refined grid exceeds the memory budget"));
    }
    let fine = GridSpec::new(grid.dim(), fine_n, grid.center().to_vec(), grid.radius())?;
    let state = initial_state(config, &fine)?;
    interpolation_error_measured(&state, grid.half())
}

fn put_ledger(s: &mut Summary, oracle: &Oracle) {
    let l = oracle.ledger.snapshot();
    s.put("ledger_exact_evals", l.exact_evals);
    s.put("ledger_noisy_evals", l.noisy_evals);
    s.put("ledger_stochastic_evals", l.stochastic_evals);
    s.put("ledger_grid_sweeps", l.grid_sweeps);
}

fn run_optimize(config: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let name = match config.opt_text("optimize.potential") {
        Some(n) => n,
        None => config.text("potential.name")?,
    };
    let d = config.usize("potential.dim")?;
    let x0 = config
        .floats("optimize.x0")?
        .ok_or_else(|| invalid("optimize.x0 is required"))?;
    if x0.len() != d {
        return Err(invalid(format!("optimize.x0 has {} entries, expected {d}", x0.len())));
    }
    let r = config.f64("optimize.R")?;
    let eps = config.f64("optimize.eps")?;
    let repeats = config.usize("optimize.repeats")?;
    let seed = match config.int("optimize.seed") {
        Ok(s) => s,
        Err(_) => config.int("seed")?,
    } as u64;
    let spec = build_potential(config, name, x0.clone(), r)?;
    let mut cfg = OptimizeConfig {
        evolve: EvolveConfig {
            dt_initial: config.f64("evolve.dt")?,
            tol_step: config.f64("optimize.tol")?,
            max_steps: config.usize("evolve.max_steps")?,
            record_every: config.usize("evolve.record_every")?,
            seed,
            adaptive: true,
        },
        memory_budget: config.usize("optimize.memory_budget")?,
        grid_n: config.usize_or_auto("optimize.N")?,
        sigma: config.f64_or_auto("optimize.sigma")?,
        record_energy: config.bool("diagnostics.full")?,
        ..OptimizeConfig::default()
    };
    let mut eps_f = None;
    if config.text("optimize.noise_mode")? == "binary" {
        let e = match config.f64_or_auto("optimize.eps_f")? {
            Some(e) => e,
            None => {
                let p = plan(&spec, r, eps, &cfg)?;
                eps_f_budget(eps, p.params.big_lambda_inf, p.b_l1)? / 2.0
            }
        };
        cfg.noise = NoiseMode::Binary { eps_f: e };
        eps_f = Some(e);
    }
    let oracle = Oracle::new(spec);
    log::info!("optimize: {name}, d = {d}, eps = {eps}, repeats = {repeats}");
    let report = optimize_with(&oracle, &x0, r, eps, repeats, &cfg, seed)?;

    let header = strings(&[
        "index", "seed", "candidate", "f_measured", "f_exact", "success", "mean_excess",
        "markov_bound", "accepted", "rejected", "norm_drift",
    ]);
    let opt = |v: Option<f64>| v.map_or("".to_string(), |x| format!("{x:.12e}"));
    let rows: Vec<Vec<String>> = report
        .runs
        .iter()
        .map(|run| {
            vec![
                run.index.to_string(),
                run.seed.to_string(),
                join(&run.candidate),
                format!("{:.12e}", run.f_measured),
                format!("{:.12e}", run.f_exact),
                run.success.map_or("".into(), |b| b.to_string()),
                opt(run.mean_excess),
                opt(run.markov_bound),
                run.accepted.to_string(),
                run.rejected.to_string(),
                format!("{:.12e}", run.norm_drift),
            ]
        })
        .collect();
    write_csv(out, "runs.csv", &header, &rows)?;
    if cfg.record_energy {
        report.energy.write_csv(fs::File::create(out.join("energy.csv"))?)?;
    }

    let mut s = Summary::default();
    s.put("command", "optimize");
    s.put("status", "ok");
    s.put("potential", name);
    s.put("d", d);
    s.put("eps", eps);
    s.put("repeats", repeats);
    s.put("seed", seed);
    s.put("noise_mode", config.text("optimize.noise_mode")?);
    if let Some(e) = eps_f {
        s.put("eps_f", e);
    }
    s.put("candidate", join(&report.candidate));
    s.put("f_candidate", report.f_candidate);
    s.put(
        "success",
        report.success.map_or("unknown".to_string(), |b| b.to_string()),
    );
    let successes = report.runs.iter().filter(|r| r.success == Some(true)).count();
    s.put("successful_repeats", successes);
    s.put("failure_bound", report.failure_bound);
    let p = &report.params;
    s.put("m0", p.m0);
    s.put("omega0", p.omega0);
    s.put("lambda", p.lambda);
    s.put("sigma", p.sigma);
    s.put("box_radius", p.box_radius);
    s.put("t_final", report.t_final);
    s.put("e0_bound", report.e0_bound);
    s.put("grid_n", report.grid_n);
    s.put("grid_n_rule", report.n_selection.n);
    s.put("grid_n_gaussian", report.n_selection.n_gaussian);
    s.put("grid_capped", report.grid_capped);
    for (i, w) in report.warnings.iter().enumerate() {
        s.put(format!("warning_{i}"), w);
    }
    let l = report.ledger;
    s.put("ledger_exact_evals", l.exact_evals);
    s.put("ledger_noisy_evals", l.noisy_evals);
    s.put("ledger_stochastic_evals", l.stochastic_evals);
    s.put("ledger_grid_sweeps", l.grid_sweeps);
    match qhd_query_upper(d, oracle.spec.lipschitz.max(f64::MIN_POSITIVE), r, eps) {
        Ok(q) => {
            s.put("query_upper_bound", q.queries);
            s.put("noise_tolerance", q.noise);
        }
        Err(e) => s.put("query_upper_bound", format!("unavailable ({e})")),
    }
    s.put("convention", CONVENTION_NOTE);
    Ok(Outcome {
        summary: s,
        partial: false,
    })
}

fn table1_rows(d: usize, g: f64, r: f64, eps: f64) -> Result<Vec<Vec<String>>> {
    let mut rows = Vec::new();
    let q = qhd_query_upper(d, g, r, eps)?;
    rows.push(vec![
        "QHD simulation".to_string(),
        format!("{:.6e}", q.queries),
        format!("{:.6e}", q.noise),
    ]);
    for name in BASELINES {
        let b = baseline_queries(name, d, g, r, eps)?;
        rows.push(vec![
            baseline_label(name).to_string(),
            format!("{:.6e}", b.queries),
            format!("{:.6e}", b.noise),
        ]);
    }
    Ok(rows)
}

fn run_estimate(config: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let d = config.usize("estimate.d")?;
    let n = config.usize("estimate.N")?;
    let a_l1 = config.f64("estimate.a_l1")?;
    let b_l1 = config.f64("estimate.b_l1")?;
    let lambda = config.f64("estimate.Lambda")?;
    let eps = config.f64("estimate.eps")?;
    let g = config.f64("estimate.G")?;
    let r = config.f64("estimate.R")?;
    let eps_opt = config.f64("estimate.eps_opt")?;
    let est = estimate(d, n, a_l1, lambda, b_l1, eps)?;

    let header = strings(&["quantity", "value"]);
    let quantities = [
        ("queries_binary", est.queries_binary),
        ("queries_phase", est.queries_phase),
        ("qubits", est.qubits),
        ("gates", est.gates),
        ("eps_f", est.eps_f),
    ];
    let rows: Vec<Vec<String>> = quantities
        .iter()
        .map(|(k, v)| vec![k.to_string(), format!("{v:.6e}")])
        .collect();
    write_csv(out, "estimate.csv", &header, &rows)?;
    let table = table1_rows(d, g, r, eps_opt)?;
    write_csv(out, "table1.csv", &strings(&["method", "queries", "noise"]), &table)?;

    let mut s = Summary::default();
    s.put("command", "estimate");
    s.put("status", "ok");
    for (k, v) in quantities {
        s.put(k, v);
    }
    for row in &table {
        s.put(format!("table1 {}", row[0]), format!("{} queries at noise {}", row[1], row[2]));
    }
    s.put("convention", est.convention_note);
    Ok(Outcome {
        summary: s,
        partial: false,
    })
}

fn run_bounds(config: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let d = config.usize("bounds.d")?;
    let n = config.usize("bounds.N")?;
    let m = config.usize("bounds.m")? as u32;
    let sob = config.f64("bounds.sobolev")?;
    let a_l1 = config.f64("bounds.a_l1")?;
    let b_l1 = config.f64("bounds.b_l1")?;
    let g = config.f64("bounds.G")?;
    let r = config.f64("bounds.R")?;
    let eps = config.f64("bounds.eps")?;
    let lambda_f = config
        .f64_or_auto("bounds.Lambda_f")?
        .unwrap_or_else(|| (d as f64).sqrt());

    let mut s = Summary::default();
    s.put("command", "bounds");
    s.put("status", "ok");
    s.put("truncation_bound", truncation_bound(sob, n, m));
    s.put_result("aliasing_bound", aliasing_bound(sob, n, m, d));
    match select_n(a_l1, b_l1, g, r, d, eps, sob, sob) {
        Ok(sel) => {
            s.put("select_n", sel.n);
            s.put("select_n_log2_required", sel.log2_required);
        }
        Err(e) => s.put("select_n", format!("unavailable ({e})")),
    }
    s.put_result("select_n_gaussian", select_n_gaussian(d, r, eps));
    let up = qhd_query_upper(d, g, r, eps)?;
    s.put("qhd_query_upper", up.queries);
    s.put("qhd_noise_tolerance", up.noise);
    let lo = qhd_query_lower(d, g, r, eps, lambda_f)?;
    s.put("qhd_query_lower", lo.general);
    s.put("qhd_query_lower_hypercube", lo.hypercube);
    s.put("stochastic_queries", stochastic_queries(d, g, r, eps)?);
    s.put("convention", CONVENTION_NOTE);

    let rows: Vec<Vec<String>> = s
        .entries()
        .iter()
        .filter(|(k, _)| !matches!(k.as_str(), "command" | "status" | "convention"))
        .map(|(k, v)| vec![k.clone(), v.clone()])
        .collect();
    write_csv(out, "bounds.csv", &strings(&["quantity", "value"]), &rows)?;
    Ok(Outcome {
        summary: s,
        partial: false,
    })
}

fn run_baseline_table(config: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let dims = config.ints("baseline.d")?.unwrap_or_default();
    let g = config.f64("baseline.G")?;
    let r = config.f64("baseline.R")?;
    let fixed_eps = config.f64_or_auto("baseline.eps")?;
    let mut rows = Vec::new();
    let mut crossover = true;
    for &d in &dims {
        let d = usize::try_from(d).map_err(|_| invalid("baseline.d entries must be positive"))?;
        if d == 0 {
            return Err(invalid("baseline.d entries must be positive"));
        }
        let eps = fixed_eps.unwrap_or(1.0 / (d as f64).sqrt());
        let table = table1_rows(d, g, r, eps)?;
        let qhd: f64 = table[0][1].parse().unwrap_or(f64::NAN);
        for name in ["risteski_li", "belloni"] {
            crossover &= qhd < baseline_queries(name, d, g, r, eps)?.queries;
        }
        for row in table {
            let mut full = vec![d.to_string(), format!("{eps:.6e}")];
            full.extend(row);
            rows.push(full);
        }
    }
    write_csv(
        out,
        "baselines.csv",
        &strings(&["d", "eps", "method", "queries", "noise"]),
        &rows,
    )?;
    let mut s = Summary::default();
    s.put("command", "baseline-table");
    s.put("status", "ok");
    s.put("rows", rows.len());
    s.put("qhd_below_classical_baselines", crossover);
    s.put("convention", CONVENTION_NOTE);
    Ok(Outcome {
        summary: s,
        partial: false,
    })
}

/// Config text value for a swept number: integer keys get an integer.
fn sweep_value_text(key: &str, v: f64) -> String {
    match key_spec(key).map(|s| s.kind) {
        Some(Kind::Int | Kind::IntOrAuto) if v.fract() == 0.0 => format!("{}", v as i64),
        _ => format_float(v),
    }
}

fn run_sweep(config: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let key = config.text("sweep.key")?.to_string();
    let values = config.floats("sweep.values")?.unwrap_or_default();
    let sub = config.text("sweep.command")?.to_string();
    log::info!("sweep over {key}: {} values", values.len());
    let results: Vec<(f64, std::result::Result<Summary, String>)> = values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let cfg = config
                .with_override(&key, &sweep_value_text(&key, v))
                .and_then(|c| c.with_override("command", &sub));
            let res = cfg
                .and_then(|c| run(&c, &out.join(format!("run_{i}"))))
                .map(|o| o.summary)
                .map_err(|e| e.to_string().replace('\n', "; "));
            (v, res)
        })
        .collect();

    let mut columns: Vec<String> = Vec::new();
    for (_, r) in &results {
        if let Ok(s) = r {
            for (k, _) in s.entries() {
                if k != "status" && !columns.contains(k) {
                    columns.push(k.clone());
                }
            }
        }
    }
    let mut header = vec![key.clone(), "status".to_string()];
    header.extend(columns.iter().cloned());
    let mut failed = 0usize;
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|(v, r)| {
            let mut row = vec![sweep_value_text(&key, *v)];
            match r {
                Ok(s) => {
                    row.push(s.get("status").unwrap_or("ok").to_string());
                    row.extend(columns.iter().map(|c| s.get(c).unwrap_or("").to_string()));
                }
                Err(e) => {
                    failed += 1;
                    row.push(format!("failed: {e}"));
                    row.extend(columns.iter().map(|_| String::new()));
                }
            }
            row
        })
        .collect();
    write_csv(out, "sweep.csv", &header, &rows)?;
    let mut s = Summary::default();
    s.put("command", "sweep");
    s.put("status", "ok");
    s.put("sweep_key", &key);
    s.put("sweep_command", &sub);
    s.put("rows", rows.len());
    s.put("failed_rows", failed);
    Ok(Outcome {
        summary: s,
        partial: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_keeps_order() {
        let mut s = Summary::default();
        s.put("b", 1);
        s.put("a", 2.5);
        assert_eq!(s.to_text(), "b = 1\na = 2.5\n");
        assert_eq!(s.get("a"), Some("2.5"));
    }

    #[test]
    fn sweep_values_follow_key_type() {
        assert_eq!(sweep_value_text("grid.N", 32.0), "32");
        assert_eq!(sweep_value_text("evolve.dt", 0.005), "0.005");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(error_exit_code(&QhdError::Config(vec![])), EXIT_VALIDATION);
        assert_eq!(error_exit_code(&QhdError::Numeric("x".into())), EXIT_RUNTIME);
    }
}
