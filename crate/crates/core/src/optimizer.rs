//! End-to-end convex optimization: parameter choice, Gaussian initial state,
//! evolution to the stopping time, measurement and best-of-K boosting.

use std::f64::consts::SQRT_2;

use log::{info, warn};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::erf::{erf, erfc};

use crate::diagnostics::{expected_f, select_n, DiagnosticRecorder, EnergyReport, NSelection};
use crate::error::{invalid, QhdError, Result};
use crate::grid::{sobolev_seminorm, GridSpec, Representation, WaveState};
use crate::potential::{eval_binary, eval_exact, LedgerSnapshot, Oracle, OracleMode, PotentialSpec};
use crate::propagator::{evolve, EvolveConfig, NoRecord, Recorder};
use crate::schedule::Schedule;

/// Schedule initials, Gaussian width and geometry of one optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct QHDParams {
    pub m0: f64,
    pub omega0: f64,
    pub lambda: f64,
    /// Initial Gaussian width in physical units.
    pub sigma: f64,
    pub r: f64,
    pub r_inf: f64,
    pub big_lambda: f64,
    pub big_lambda_inf: f64,
    pub eps: f64,
    /// Half-width of the simulation box, `4 R_∞`.
    pub box_radius: f64,
}

impl QHDParams {
    /// Replaces `R_∞` (and with it the box half-width).
    pub fn with_r_inf(mut self, r_inf: f64) -> Result<Self> {
        if !(r_inf > 0.0) {
            return Err(invalid("R_inf must be positive"));
        }
        self.r_inf = r_inf;
        self.box_radius = 4.0 * r_inf;
        Ok(self)
    }
}

/// `ω0 = 1`, `m0 = R⁻¹√(d/(GR+Λ))`, `λ = G⁻¹R⁻²(Λ+GR)^{3/2}`, `σ² = R²/d`,
/// with `R_∞ = R`.
pub fn choose_params(
    g: f64,
    r: f64,
    big_lambda: f64,
    big_lambda_inf: f64,
    d: usize,
    eps: f64,
) -> Result<QHDParams> {
    for (name, v) in [
        ("G", g),
        ("R", r),
        ("Lambda", big_lambda),
        ("Lambda_inf", big_lambda_inf),
        ("eps", eps),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(invalid(format!("{name} must be positive, got {v}")));
        }
    }
    if d == 0 {
        return Err(invalid("d must be at least 1"));
    }
    let df = d as f64;
    let gr = g * r;
    Ok(QHDParams {
        m0: (df / (gr + big_lambda)).sqrt() / r,
        omega0: 1.0,
        lambda: (big_lambda + gr).powf(1.5) / (g * r * r),
        sigma: r / df.sqrt(),
        r,
        r_inf: r,
        big_lambda,
        big_lambda_inf,
        eps,
        box_radius: 4.0 * r,
    })
}

/// Probability mass of `N(x0, σ²I)` outside the physical box of `grid`.
pub fn gaussian_mass_outside(grid: &GridSpec, x0: &[f64], sigma: f64) -> f64 {
    let s = sigma * std::f64::consts::SQRT_2;
    let inside: f64 = grid
        .center()
        .iter()
        .zip(x0)
        .map(|(&c, &x)| {
            let hi = (c + grid.radius() - x) / s;
            let lo = (c - grid.radius() - x) / s;
            0.5 * (erf(hi) - erf(lo))
        })
        .product();
    (1.0 - inside).max(0.0)
}

/// Discretized Gaussian `Φ0(x) ∝ e^{-(x-x0)²/(4σ²)}` renormalized to unit
/// norm. Also returns the analytic mass outside the box.
pub fn initial_gaussian(grid: &GridSpec, x0: &[f64], sigma: f64) -> Result<(WaveState, f64)> {
    if !(sigma > 0.0) {
        return Err(invalid("sigma must be positive"));
    }
    if x0.len() != grid.dim() {
        return Err(QhdError::GridMismatch(format!(
            "x0 has {} coordinates, grid has dimension {}",
            x0.len(),
            grid.dim()
        )));
    }
    let outside = gaussian_mass_outside(grid, x0, sigma);
    if outside >= 1e-6 {
        return Err(QhdError::Geometry(format!(
            "Gaussian of width {sigma} leaves mass {outside:e} outside the box of half-width {}",
            grid.radius()
        )));
    }
    let two_r = 2.0 * grid.radius();
    let c = grid.center().to_vec();
    let mut state = WaveState::from_fn(grid.clone(), |x| {
        let r2: f64 = x
            .iter()
            .zip(&c)
            .zip(x0)
            .map(|((&xi, &ci), &x0i)| {
                let y = two_r * xi + ci - x0i;
                y * y
            })
            .sum();
        Complex64::new((-r2 / (4.0 * sigma * sigma)).exp(), 0.0)
    });
    state.normalize()?;
    Ok((state, outside))
}

/// `d/(2 m0 σ)² + 2λ²(dσ² + R²) + ω0²(GR + Λ)`.
pub fn lyapunov_initial_bound(params: &QHDParams, g: f64, big_lambda: f64, d: usize) -> f64 {
    let df = d as f64;
    let p = params;
    df / (2.0 * p.m0 * p.sigma).powi(2)
        + 2.0 * p.lambda * p.lambda * (df * p.sigma * p.sigma + p.r * p.r)
        + p.omega0 * p.omega0 * (g * p.r + big_lambda)
}

/// Draws a grid index with probability `|Ψ_j|²` and returns it with the
/// matching physical point.
pub fn measure_sample<R: Rng + ?Sized>(state: &WaveState, rng: &mut R) -> Result<(usize, Vec<f64>)> {
    let pos = state.to_position();
    let amps = pos.amplitudes();
    let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(QhdError::Numeric("cannot sample from a zero state".into()));
    }
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut pick = None;
    for (j, a) in amps.iter().enumerate() {
        let p = a.norm_sqr();
        if p > 0.0 {
            pick = Some(j);
            acc += p;
            if u < acc {
                break;
            }
        }
    }
    let j = pick.expect("positive total mass");
    Ok((j, pos.grid().physical_point(j)))
}

/// Markov lower bound `1 - (E[f] - f⋆)/ε` on `P[f - f⋆ < ε]`, clamped to
/// `[0, 1]`. An excess of exactly `ε/3` returns the 2/3 guarantee.
pub fn markov_success_check(mean_excess: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(invalid("eps must be positive"));
    }
    if !(mean_excess >= 0.0) {
        return Err(QhdError::InvalidInput(format!(
            "mean excess must be nonnegative, got {mean_excess}"
        )));
    }
    if (3.0 * mean_excess - eps).abs() <= 4.0 * f64::EPSILON * eps {
        return Ok(2.0 / 3.0);
    }
    Ok((1.0 - mean_excess / eps).clamp(0.0, 1.0))
}

/// Failure bound `(1/3)^K` of best-of-K when each run succeeds w.p. ≥ 2/3.
pub fn amplify(repeats: u32) -> Result<f64> {
    if repeats == 0 {
        return Err(invalid("need at least one repeat"));
    }
    Ok(1.0 / 3f64.powi(repeats as i32))
}

/// How the optimizer queries the objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseMode {
    Exact,
    /// Binary oracle with absolute error at most `eps_f`; each repeat sees an
    /// independent noise realization.
    Binary { eps_f: f64 },
}

/// Optional overrides and budgets for [`optimize`].
#[derive(Debug, Clone)]
pub struct OptimizeConfig {
    pub noise: NoiseMode,
    pub evolve: EvolveConfig,
    /// Cap on `(2N)^d`.
    pub memory_budget: usize,
    /// Fixed `N` instead of the error-analysis rule.
    pub grid_n: Option<usize>,
    pub sigma: Option<f64>,
    pub big_lambda: Option<f64>,
    pub big_lambda_inf: Option<f64>,
    /// Collect the Lyapunov series of the first repeat.
    pub record_energy: bool,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            noise: NoiseMode::Exact,
            evolve: EvolveConfig::default(),
            memory_budget: 1 << 24,
            grid_n: None,
            sigma: None,
            big_lambda: None,
            big_lambda_inf: None,
            record_energy: false,
        }
    }
}

/// Outcome of a single evolve-and-measure repeat.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub index: usize,
    pub seed: u64,
    pub candidate: Vec<f64>,
    /// Objective at the candidate as seen through the oracle.
    pub f_measured: f64,
    pub f_exact: f64,
    pub success: Option<bool>,
    /// `⟨f⟩ - f⋆` of the final state on the grid (exact values).
    pub mean_excess: Option<f64>,
    pub markov_bound: Option<f64>,
    pub accepted: usize,
    pub rejected: usize,
    pub norm_drift: f64,
}

#[derive(Debug, Clone)]
pub struct OptimizeReport {
    pub candidate: Vec<f64>,
    pub f_candidate: f64,
    pub success: Option<bool>,
    pub runs: Vec<RunRecord>,
    pub ledger: LedgerSnapshot,
    pub energy: EnergyReport,
    pub params: QHDParams,
    pub schedule: Schedule,
    pub t_final: f64,
    pub e0_bound: f64,
    pub grid_n: usize,
    pub n_selection: NSelection,
    pub grid_capped: bool,
    pub failure_bound: f64,
    pub warnings: Vec<String>,
}

/// Parameters, schedule and stopping time for one optimization problem.
#[derive(Debug, Clone)]
pub struct Plan {
    pub params: QHDParams,
    pub schedule: Schedule,
    pub t_final: f64,
    pub e0_bound: f64,
    pub a_l1: f64,
    pub b_l1: f64,
    /// The default width was narrowed to fit the box (see [`plan`]).
    pub sigma_narrowed: bool,
}

/// Chooses parameters (with the config overrides), the schedule and the
/// stopping time for minimizing `potential` within distance `r` to accuracy
/// `eps`.
pub fn plan(potential: &PotentialSpec, r: f64, eps: f64, config: &OptimizeConfig) -> Result<Plan> {
    let d = potential.dim();
    let g = potential.lipschitz;
    let df = d as f64;
    let big_lambda = config.big_lambda.unwrap_or(g * r);
    let big_lambda_inf = config.big_lambda_inf.unwrap_or(g * r * df.sqrt());
    let mut params = choose_params(g, r, big_lambda, big_lambda_inf, d, eps)?;
    if let Some(s) = config.sigma {
        if !(s > 0.0) {
            return Err(invalid("sigma override must be positive"));
        }
        params.sigma = s;
    }
    // With σ = R/√d the box edge sits 4√d widths away, which in low
    // dimension leaves more than the admissible 1e-6 of mass outside. The
    // default width is then narrowed to a fifth of the box half-width.
    let mut sigma_narrowed = false;
    if config.sigma.is_none() {
        let axis_tail = erfc(params.box_radius / (params.sigma * SQRT_2));
        if df * axis_tail >= 1e-6 {
            params.sigma = params.box_radius / 5.0;
            sigma_narrowed = true;
        }
    }
    let e0_bound = lyapunov_initial_bound(&params, g, big_lambda, d);
    let schedule = Schedule::exponential_scaled(1.0, params.m0, params.omega0, params.lambda)?;
    let t_final = schedule.stopping_time(eps, e0_bound)?;
    let a_l1 = schedule.a_integral(0.0, t_final)?;
    let b_l1 = schedule.b_l1_closed_form(t_final)?;
    Ok(Plan {
        params,
        schedule,
        t_final,
        e0_bound,
        a_l1,
        b_l1,
        sigma_narrowed,
    })
}

fn repeat_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 step so neighbouring seeds give unrelated streams
    let mut z = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Everything a repeat needs besides its own seed.
struct Setup<'a> {
    oracle: &'a Oracle,
    grid: GridSpec,
    schedule: Schedule,
    t_final: f64,
    initial: WaveState,
    config: &'a OptimizeConfig,
    f_star: Option<f64>,
    eps: f64,
}

struct Evolved {
    state: WaveState,
    accepted: usize,
    rejected: usize,
    norm_drift: f64,
    energy: EnergyReport,
}

impl Setup<'_> {
    fn mode(&self, seed: u64) -> OracleMode {
        match self.config.noise {
            NoiseMode::Exact => OracleMode::Exact,
            NoiseMode::Binary { eps_f } => OracleMode::Binary { eps_f, seed },
        }
    }

    fn evolve(&self, seed: u64, record: bool) -> Result<Evolved> {
        let field = self.oracle.grid_potential(&self.grid, self.mode(seed))?;
        let x_star = self
            .oracle
            .spec
            .minimizer
            .as_ref()
            .map(|(x, _)| x.clone())
            .unwrap_or_else(|| self.grid.center().to_vec());
        let f_star = self.f_star.unwrap_or(0.0);
        let mut diag = DiagnosticRecorder::new(&self.schedule, &field, x_star, f_star);
        let mut none = NoRecord;
        let rec: &mut dyn Recorder = if record { &mut diag } else { &mut none };
        let mut cfg = self.config.evolve.clone();
        if !record {
            cfg.record_every = 0;
        }
        let ev = evolve(&self.initial, &self.schedule, 0.0, self.t_final, &cfg, &field, rec)?;
        Ok(Evolved {
            state: ev.state,
            accepted: ev.accepted,
            rejected: ev.rejected,
            norm_drift: ev.norm_drift,
            energy: diag.report,
        })
    }

    fn measure(&self, ev: &Evolved, index: usize, seed: u64) -> Result<RunRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, x) = measure_sample(&ev.state, &mut rng)?;
        let ledger = &self.oracle.ledger;
        let f_measured = match self.config.noise {
            NoiseMode::Exact => eval_exact(&self.oracle.spec, &x, ledger),
            NoiseMode::Binary { eps_f } => eval_binary(&self.oracle.spec, &x, eps_f, seed, ledger)?,
        };
        let f_exact = self.oracle.spec.value(&x);
        let (success, mean_excess, markov_bound) = match self.f_star {
            Some(fs) => {
                // The exact grid field gives the true excess even under noise.
                let exact = self.oracle.grid_potential(&self.grid, OracleMode::Exact)?;
                let excess = expected_f(&ev.state, &exact, fs)?.max(0.0);
                (
                    Some(f_exact - fs <= self.eps),
                    Some(excess),
                    Some(markov_success_check(excess, self.eps)?),
                )
            }
            None => (None, None, None),
        };
        Ok(RunRecord {
            index,
            seed,
            candidate: x,
            f_measured,
            f_exact,
            success,
            mean_excess,
            markov_bound,
            accepted: ev.accepted,
            rejected: ev.rejected,
            norm_drift: ev.norm_drift,
        })
    }
}

/// Runs `repeats` independent evolve-and-measure rounds on `potential`
/// around `x0` and returns the candidate with the smallest measured value.
///
/// With an exact oracle every repeat evolves the same initial state under
/// the same field, so the evolution is done once and only the measurement is
/// repeated.
pub fn optimize(
    potential: &PotentialSpec,
    x0: &[f64],
    r: f64,
    eps: f64,
    repeats: usize,
    config: &OptimizeConfig,
    seed: u64,
) -> Result<OptimizeReport> {
    let oracle = Oracle::new(potential.clone());
    optimize_with(&oracle, x0, r, eps, repeats, config, seed)
}

/// [`optimize`] against a caller-owned oracle (shared ledger and cache).
pub fn optimize_with(
    oracle: &Oracle,
    x0: &[f64],
    r: f64,
    eps: f64,
    repeats: usize,
    config: &OptimizeConfig,
    seed: u64,
) -> Result<OptimizeReport> {
    let potential = &oracle.spec;
    let d = potential.dim();
    if x0.len() != d {
        return Err(invalid(format!("x0 has {} coordinates, expected {d}", x0.len())));
    }
    if repeats == 0 {
        return Err(invalid("need at least one repeat"));
    }
    if !(eps > 0.0) || !(r > 0.0) {
        return Err(invalid("eps and R must be positive"));
    }
    if let NoiseMode::Binary { eps_f } = config.noise {
        if !(eps_f > 0.0) {
            return Err(invalid("eps_f must be positive"));
        }
    }
    let mut warnings = Vec::new();
    let g = potential.lipschitz;
    let Plan {
        params,
        schedule,
        t_final,
        e0_bound,
        a_l1,
        b_l1,
        sigma_narrowed,
    } = plan(potential, r, eps, config)?;
    if config.sigma.is_some() {
        info!("initial width sigma = {} (override)", params.sigma);
    } else if sigma_narrowed {
        let msg = format!(
            "initial width R/sqrt(d) leaves over 1e-6 of the Gaussian outside the box; using sigma = {}",
            params.sigma
        );
        warn!("{msg}");
        warnings.push(msg);
    } else {
        info!("initial width sigma = R/sqrt(d) = {}", params.sigma);
    }

    // Grid: the error-analysis rule, capped by the memory budget.
    let probe = GridSpec::new(d, 8, x0.to_vec(), params.box_radius)?;
    let (probe_state, _) = initial_gaussian(&probe, x0, params.sigma)?;
    let n_selection = select_n(
        a_l1.max(f64::MIN_POSITIVE),
        b_l1.max(f64::MIN_POSITIVE),
        g,
        r,
        d,
        eps,
        sobolev_seminorm(&probe_state, d as u32),
        sobolev_seminorm(&probe_state, 3),
    )?;
    let mut cap = 1usize;
    while (2 * cap * 2).checked_pow(d as u32).is_some_and(|v| v <= config.memory_budget) {
        cap *= 2;
    }
    let (n, grid_capped) = match config.grid_n {
        Some(n) => (n, false),
        None if n_selection.n > cap => {
            let msg = format!(
                "grid rule asks for N = 2^{:.1}; capped at N = {cap} by the memory budget of {} values",
                n_selection.log2_required, config.memory_budget
            );
            warn!("{msg}");
            warnings.push(msg);
            (cap, true)
        }
        None => (n_selection.n, false),
    };
    let grid = GridSpec::new(d, n, x0.to_vec(), params.box_radius)?;
    let (initial, outside) = initial_gaussian(&grid, x0, params.sigma)?;
    info!(
        "optimize: d={d} N={n} T={t_final:.4} m0={:.4} lambda={:.4} E0_bound={e0_bound:.4} outside_mass={outside:e}",
        params.m0, params.lambda
    );
    let setup = Setup {
        oracle,
        grid,
        schedule: schedule.clone(),
        t_final,
        initial,
        config,
        f_star: potential.f_star(),
        eps,
    };

    let seeds: Vec<u64> = (0..repeats).map(|k| repeat_seed(seed, k)).collect();
    let mut energy = EnergyReport::default();
    let runs: Vec<RunRecord> = match config.noise {
        NoiseMode::Exact => {
            let ev = setup.evolve(seeds[0], config.record_energy)?;
            let runs = seeds
                .iter()
                .enumerate()
                .map(|(k, &s)| setup.measure(&ev, k, s))
                .collect::<Result<Vec<_>>>()?;
            energy = ev.energy;
            runs
        }
        NoiseMode::Binary { .. } => {
            let out: Vec<Result<(RunRecord, EnergyReport)>> = seeds
                .par_iter()
                .enumerate()
                .map(|(k, &s)| {
                    let ev = setup.evolve(s, config.record_energy && k == 0)?;
                    let run = setup.measure(&ev, k, s)?;
                    Ok((run, ev.energy))
                })
                .collect();
            let mut runs = Vec::with_capacity(repeats);
            for (k, item) in out.into_iter().enumerate() {
                let (run, e) = item?;
                if k == 0 {
                    energy = e;
                }
                runs.push(run);
            }
            runs
        }
    };
    let best = runs
        .iter()
        .min_by(|a, b| a.f_measured.total_cmp(&b.f_measured).then(a.index.cmp(&b.index)))
        .expect("at least one repeat");
    Ok(OptimizeReport {
        candidate: best.candidate.clone(),
        f_candidate: best.f_measured,
        success: best.success,
        ledger: oracle.ledger.snapshot(),
        energy,
        params,
        schedule,
        t_final,
        e0_bound,
        grid_n: n,
        n_selection,
        grid_capped,
        failure_bound: amplify(repeats.min(u32::MAX as usize) as u32)?,
        warnings,
        runs: runs.clone(),
    })
}

/// Final state of the optimizer's evolution, for repeated measurement
/// experiments. Uses the same parameter and grid choices as [`optimize`].
pub fn final_state(
    oracle: &Oracle,
    x0: &[f64],
    r: f64,
    eps: f64,
    config: &OptimizeConfig,
    seed: u64,
) -> Result<(WaveState, Vec<f64>)> {
    let mut cfg = config.clone();
    cfg.record_energy = false;
    let d = oracle.spec.dim();
    let Plan {
        params,
        schedule,
        t_final,
        ..
    } = plan(&oracle.spec, r, eps, &cfg)?;
    let n = cfg
        .grid_n
        .ok_or_else(|| invalid("final_state needs an explicit grid size"))?;
    let grid = GridSpec::new(d, n, x0.to_vec(), params.box_radius)?;
    let (initial, _) = initial_gaussian(&grid, x0, params.sigma)?;
    let setup = Setup {
        oracle,
        grid,
        schedule,
        t_final,
        initial,
        config: &cfg,
        f_star: oracle.spec.f_star(),
        eps,
    };
    let mode = setup.mode(seed);
    let ev = setup.evolve(seed, false)?;
    let field = oracle.grid_potential(&setup.grid, mode)?;
    debug_assert_eq!(ev.state.representation(), Representation::Position);
    Ok((ev.state, field.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn param_examples() {
        let p = choose_params(1.0, 1.0, 1.0, 1.0, 1, 0.1).unwrap();
        assert_relative_eq!(p.m0, 1.0 / 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(p.lambda, 2f64.powf(1.5), max_relative = 1e-15);
        assert_eq!(p.sigma, 1.0);
        assert_eq!(p.omega0, 1.0);
        assert_eq!(p.box_radius, 4.0);
        let p4 = choose_params(1.0, 1.0, 1.0, 1.0, 4, 0.1).unwrap();
        assert_relative_eq!(p4.m0, 2f64.sqrt(), max_relative = 1e-15);
        assert_eq!(p4.sigma, 0.5);
        assert!(choose_params(0.0, 1.0, 1.0, 1.0, 1, 0.1).is_err());
    }

    #[test]
    fn initial_bound_example() {
        let mut p = choose_params(1.0, 1.0, 1.0, 1.0, 1, 0.1).unwrap();
        p.m0 = 1.0;
        p.sigma = 1.0;
        p.lambda = 1.0;
        assert_relative_eq!(lyapunov_initial_bound(&p, 1.0, 1.0, 1), 6.25, max_relative = 1e-15);
    }

    #[test]
    fn markov_and_amplify() {
        for eps in [0.1, 0.3, 1.0, 7.0] {
            assert_eq!(markov_success_check(eps / 3.0, eps).unwrap(), 2.0 / 3.0);
            assert_eq!(markov_success_check(0.0, eps).unwrap(), 1.0);
            assert_eq!(markov_success_check(eps, eps).unwrap(), 0.0);
        }
        assert!(markov_success_check(-1e-3, 0.1).is_err());
        assert_eq!(amplify(1).unwrap(), 1.0 / 3.0);
        assert_eq!(amplify(4).unwrap(), 1.0 / 81.0);
        assert!(amplify(0).is_err());
    }

    #[test]
    fn gaussian_moments() {
        let grid = GridSpec::new(1, 128, vec![0.2], 4.0).unwrap();
        let (s, outside) = initial_gaussian(&grid, &[0.2], 0.5).unwrap();
        assert!(outside < 1e-12);
        assert_relative_eq!(s.norm(), 1.0, max_relative = 1e-14);
        let pts = grid.physical_points();
        let mean: f64 = s.amplitudes().iter().zip(&pts).map(|(a, p)| a.norm_sqr() * p[0]).sum();
        let var: f64 = s
            .amplitudes()
            .iter()
            .zip(&pts)
            .map(|(a, p)| a.norm_sqr() * (p[0] - mean).powi(2))
            .sum();
        assert!((mean - 0.2).abs() < 1e-3 * 0.5);
        assert!((var / 0.25 - 1.0).abs() < 0.02);
        let tight = GridSpec::new(1, 16, vec![0.0], 1.0).unwrap();
        assert!(matches!(initial_gaussian(&tight, &[0.0], 0.5), Err(QhdError::Geometry(_))));
    }

    #[test]
    fn sampling_examples() {
        let grid = GridSpec::new(1, 2, vec![0.0], 1.0).unwrap();
        let mut amps = vec![Complex64::new(0.0, 0.0); 4];
        amps[3] = Complex64::new(0.0, 1.0);
        let delta = WaveState::from_amplitudes(grid.clone(), amps, Representation::Position).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert_eq!(measure_sample(&delta, &mut rng).unwrap().0, 3);
        }
        let uniform = WaveState::from_fn(grid, |_| Complex64::new(0.5, 0.0));
        let mut counts = [0usize; 4];
        for _ in 0..10_000 {
            counts[measure_sample(&uniform, &mut rng).unwrap().0] += 1;
        }
        for c in counts {
            assert!((c as f64 / 1e4 - 0.25).abs() < 0.02);
        }
        let a: Vec<usize> = {
            let mut r = ChaCha8Rng::seed_from_u64(9);
            (0..20).map(|_| measure_sample(&uniform, &mut r).unwrap().0).collect()
        };
        let b: Vec<usize> = {
            let mut r = ChaCha8Rng::seed_from_u64(9);
            (0..20).map(|_| measure_sample(&uniform, &mut r).unwrap().0).collect()
        };
        assert_eq!(a, b);
    }
}
