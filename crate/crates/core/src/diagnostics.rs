//! Lyapunov energy, expectation values, discretization error bounds, grid
//! size selection, boundary leakage and decay-rate fitting.
//!
//! Bounds whose published form hides a constant use the constant 1; outputs
//! that depend on this carry [`CONVENTION_NOTE`].

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{invalid, QhdError, Result};
use crate::grid::{FftEngine, GridSpec, Representation, WaveState};
use crate::potential::mollify;
use crate::propagator::Recorder;
use crate::schedule::Schedule;

pub const CONVENTION_NOTE: &str = "leading-order, constants = 1";

/// Mass on Fourier modes with some component equal to `-N` above which the
/// unpaired mode is reported.
pub const UNPAIRED_REPORT_LEVEL: f64 = 1e-8;

/// The pieces of the Lyapunov energy
/// `E = ½⟨(p/m + λ(x - x⋆))²⟩ + ω²⟨f - f⋆⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovTerms {
    /// `½⟨p²⟩/m²`.
    pub kinetic: f64,
    /// `½λ²⟨(x - x⋆)²⟩`.
    pub position: f64,
    /// `λ Re⟨pΨ, (x - x⋆)Ψ⟩ / m` (half the symmetrized cross term).
    pub cross: f64,
    /// `ω²⟨f - f⋆⟩`.
    pub potential: f64,
    pub total: f64,
    /// Probability on modes with a component equal to `-N`.
    pub unpaired_mass: f64,
}

/// Lyapunov energy of `state` at time `t`, with momentum realized as the
/// Fourier multiplier `2πn/(2R)` and position as the physical grid
/// coordinate.
pub fn lyapunov_terms(
    state: &WaveState,
    schedule: &Schedule,
    t: f64,
    x_star: &[f64],
    field: &[f64],
    f_star: f64,
) -> Result<LyapunovTerms> {
    let grid = state.grid();
    let d = grid.dim();
    if x_star.len() != d {
        return Err(invalid("minimizer length must equal the dimension"));
    }
    for (xs, c) in x_star.iter().zip(grid.center()) {
        if (xs - c).abs() > grid.radius() {
            return Err(QhdError::Domain(format!(
                "minimizer coordinate {xs} outside the simulation box"
            )));
        }
    }
    let m = schedule.m(t)?;
    let w = schedule.omega(t)?;
    let lambda = schedule.lambda();
    let pos = state.to_position();
    let coeffs = state.to_fourier();
    let psi = pos.amplitudes();
    let side = grid.side();
    let n_len = grid.len();
    let p_unit = 2.0 * PI / (2.0 * grid.radius());
    let coords = grid.axis_coords();

    let mut eng = FftEngine::new(grid);
    let mut buf = vec![Complex64::new(0.0, 0.0); n_len];
    let (mut kin, mut posn, mut cross) = (0.0, 0.0, 0.0);
    for a in 0..d {
        let stride = side.pow((d - 1 - a) as u32);
        // p_a Ψ in position space.
        for (flat, (b, c)) in buf.iter_mut().zip(coeffs.amplitudes()).enumerate() {
            let n = grid.slot_to_index((flat / stride) % side) as f64;
            *b = c * (p_unit * n);
        }
        eng.inverse_raw(&mut buf);
        let s = eng.unitary_scale();
        let shift = grid.center()[a] - x_star[a];
        for (flat, (pb, ps)) in buf.iter().zip(psi).enumerate() {
            let pb = pb * s;
            let dx = 2.0 * grid.radius() * coords[(flat / stride) % side] + shift;
            kin += pb.norm_sqr();
            posn += dx * dx * ps.norm_sqr();
            cross += (pb.conj() * ps).re * dx;
        }
    }
    let unpaired_mass: f64 = {
        let mut j = vec![0i64; d];
        let lo = -(grid.half() as i64);
        coeffs
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(flat, _)| {
                grid.multi_index(*flat, &mut j);
                j.contains(&lo)
            })
            .map(|(_, c)| c.norm_sqr())
            .sum()
    };
    let ef = expected_f(&pos, field, f_star)?;
    let kinetic = 0.5 * kin / (m * m);
    let position = 0.5 * lambda * lambda * posn;
    let cross = lambda * cross / m;
    let potential = w * w * ef;
    Ok(LyapunovTerms {
        kinetic,
        position,
        cross,
        potential,
        total: kinetic + position + cross + potential,
        unpaired_mass,
    })
}

/// Total Lyapunov energy; see [`lyapunov_terms`].
pub fn lyapunov_energy(
    state: &WaveState,
    schedule: &Schedule,
    t: f64,
    x_star: &[f64],
    field: &[f64],
    f_star: f64,
) -> Result<f64> {
    Ok(lyapunov_terms(state, schedule, t, x_star, field, f_star)?.total)
}

/// `Σ_j g(x_j)|Ψ_j|² - f⋆`.
pub fn expected_f(state: &WaveState, field: &[f64], f_star: f64) -> Result<f64> {
    if field.len() != state.grid().len() {
        return Err(QhdError::GridMismatch(format!(
            "field has {} values, grid has {} points",
            field.len(),
            state.grid().len()
        )));
    }
    let pos = state.to_position();
    let mass: f64 = pos.amplitudes().iter().map(|a| a.norm_sqr()).sum();
    let s: f64 = pos
        .amplitudes()
        .iter()
        .zip(field)
        .map(|(a, g)| a.norm_sqr() * g)
        .sum();
    Ok(s - f_star * mass)
}

/// `|φ|_{H^m} / N^m`.
pub fn truncation_bound(sobolev_m: f64, n: usize, m: u32) -> f64 {
    sobolev_m / (n as f64).powi(m as i32)
}

/// `(π/4)^{d/4} |φ|_{H^m} / (√((m - d/2) Γ(d/2)) N^m)`, constant = 1.
pub fn aliasing_bound(sobolev_m: f64, n: usize, m: u32, d: usize) -> Result<f64> {
    let half_d = d as f64 / 2.0;
    if !(m as f64 > half_d.max(2.0)) {
        return Err(QhdError::Hypothesis(format!(
            "aliasing bound needs m > max(d/2, 2), got m = {m}, d = {d}"
        )));
    }
    Ok((PI / 4.0).powf(d as f64 / 4.0) * sobolev_m
        / (((m as f64 - half_d) * gamma(half_d)).sqrt() * (n as f64).powi(m as i32)))
}

/// Grid sizes suggested by the simulation error analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct NSelection {
    /// Smallest power of two meeting the general rule.
    pub n: usize,
    /// Required value of `log₂ N`.
    pub log2_required: f64,
    /// Power of two for a Gaussian-enveloped state, `N ≥ d^{1.25} R/ε`.
    pub n_gaussian: usize,
    pub convention: &'static str,
}

fn pow2_at_least(x: f64) -> usize {
    if !(x > 1.0) {
        return 1;
    }
    let e = x.log2().ceil();
    if e >= 62.0 {
        usize::MAX
    } else {
        // Guard against log2 rounding just above an exact power.
        let mut n = 1usize << (e as u32);
        if n / 2 >= 1 && (n / 2) as f64 >= x {
            n /= 2;
        }
        n
    }
}

/// Smallest power of two `N` with
/// `log₂N ≥ d·log₂(‖a‖₁^{1/d} [max(|Φ|_{H^d}, |Φ|_{H^3})^{1/d} + ‖b‖₁ G R d] / ε)`.
#[allow(clippy::too_many_arguments)]
pub fn select_n(
    a_l1: f64,
    b_l1: f64,
    g: f64,
    r: f64,
    d: usize,
    eps: f64,
    sobolev_d: f64,
    sobolev_3: f64,
) -> Result<NSelection> {
    for (name, v) in [("a_l1", a_l1), ("b_l1", b_l1), ("G", g), ("R", r), ("eps", eps)] {
        if !(v > 0.0) {
            return Err(invalid(format!("{name} must be positive")));
        }
    }
    if d == 0 || !(sobolev_d >= 0.0) || !(sobolev_3 >= 0.0) {
        return Err(invalid("need d >= 1 and nonnegative Sobolev norms"));
    }
    let df = d as f64;
    let inner = a_l1.powf(1.0 / df) * (sobolev_d.max(sobolev_3).powf(1.0 / df) + b_l1 * g * r * df)
        / eps;
    let log2_required = df * inner.log2();
    let n = if log2_required <= 0.0 {
        1
    } else if log2_required >= 62.0 {
        usize::MAX
    } else {
        1usize << (log2_required - 1e-12).ceil().max(0.0) as u32
    };
    Ok(NSelection {
        n,
        log2_required,
        n_gaussian: select_n_gaussian(d, r, eps)?,
        convention: CONVENTION_NOTE,
    })
}

/// Power of two `N ≥ d^{1.25} R / ε` for Gaussian-enveloped states.
pub fn select_n_gaussian(d: usize, r: f64, eps: f64) -> Result<usize> {
    if d == 0 || !(r > 0.0) || !(eps > 0.0) {
        return Err(invalid("need d >= 1, R > 0, eps > 0"));
    }
    Ok(pow2_at_least((d as f64).powf(1.25) * r / eps))
}

/// Power of two `N ≥ ((2R)^{k/2} d^{5k/2 - 1/4} b + |Φ|_{H^d}^{1/d}) / ε`
/// for states with a polynomial envelope of degree `k` and size `b`.
pub fn select_n_polynomial(
    k: f64,
    envelope: f64,
    r: f64,
    d: usize,
    eps: f64,
    sobolev_d: f64,
) -> Result<usize> {
    if d == 0 || !(r > 0.0) || !(eps > 0.0) || !(k > 0.0) || !(envelope >= 0.0) {
        return Err(invalid("need d >= 1 and positive k, R, eps"));
    }
    let df = d as f64;
    let v = ((2.0 * r).powf(k / 2.0) * df.powf(2.5 * k - 0.25) * envelope
        + sobolev_d.max(0.0).powf(1.0 / df))
        / eps;
    Ok(pow2_at_least(v))
}

/// Probability outside the inner box `B_∞(1/2 - δ)` of the scaled domain.
pub fn leakage(state: &WaveState, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(invalid(format!("leakage margin must be in (0, 1/2), got {delta}")));
    }
    let pos = state.to_position();
    let grid = pos.grid();
    let coords = grid.axis_coords();
    let limit = 0.5 - delta;
    let side = grid.side();
    let d = grid.dim();
    Ok(pos
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(flat, _)| {
            let mut rem = *flat;
            (0..d).any(|_| {
                let x = coords[rem % side];
                rem /= side;
                x.abs() > limit
            })
        })
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

/// Least-squares fit of `log(values)` against a time axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> RateFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    RateFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: xs.len(),
    }
}

fn fit_window(
    times: &[f64],
    values: &[f64],
    window: (f64, f64),
    log_time: bool,
) -> Result<RateFit> {
    if times.len() != values.len() {
        return Err(invalid("times and values differ in length"));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (&t, &v) in times.iter().zip(values) {
        if t < window.0 || t > window.1 {
            continue;
        }
        if !(v > 0.0) {
            return Err(QhdError::Numeric(format!(
                "value {v} at t = {t} is not positive; cannot fit a rate"
            )));
        }
        if log_time && !(t > 0.0) {
            return Err(QhdError::Numeric("log-time fit needs positive times".into()));
        }
        xs.push(if log_time { t.ln() } else { t });
        ys.push(v.ln());
    }
    if xs.len() < 10 {
        return Err(QhdError::Numeric(format!(
            "only {} points in the fit window, need 10",
            xs.len()
        )));
    }
    Ok(linear_fit(&xs, &ys))
}

/// Exponential rate: slope of `log v` against `t` over `window`.
pub fn decay_rate_fit(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<RateFit> {
    fit_window(times, values, window, false)
}

/// Polynomial exponent: slope of `log v` against `log t` over `window`.
pub fn decay_power_fit(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<RateFit> {
    fit_window(times, values, window, true)
}

/// Measures `‖φ - I_N φ‖_{L2(S)}` from samples on a grid refined by a power
/// of two: the coarse interpolant is evaluated on the fine grid spectrally.
pub fn interpolation_error_measured(fine: &WaveState, n: usize) -> Result<f64> {
    let fine_grid = fine.grid();
    let nf = fine_grid.half();
    if n == 0 || n > nf || nf % n != 0 || !(nf / n).is_power_of_two() {
        return Err(invalid(format!(
            "fine half size {nf} is not a power-of-two refinement of {n}"
        )));
    }
    let d = fine_grid.dim();
    let coarse_grid = GridSpec::new(d, n, fine_grid.center().to_vec(), fine_grid.radius())?;
    let fine_pos = fine.to_position();
    let fine_samples = fine_pos.samples()?;
    let ratio = nf / n;
    // Coarse samples are the fine samples at every `ratio`-th index.
    let mut jc = vec![0i64; d];
    let coarse_samples: Vec<Complex64> = (0..coarse_grid.len())
        .map(|k| {
            coarse_grid.multi_index(k, &mut jc);
            let jf: Vec<i64> = jc.iter().map(|&v| v * ratio as i64).collect();
            fine_samples[fine_grid.flat_index(&jf)]
        })
        .collect();
    let coarse = WaveState::from_samples(coarse_grid.clone(), coarse_samples)?.to_fourier();
    // Zero-pad the coarse coefficients Ψ̂_n onto the fine mode set.
    let mut padded = vec![Complex64::new(0.0, 0.0); fine_grid.len()];
    let mut jm = vec![0i64; d];
    for (k, c) in coarse.amplitudes().iter().enumerate() {
        coarse_grid.multi_index(k, &mut jm);
        padded[fine_grid.flat_index(&jm)] = *c;
    }
    let interp = WaveState::from_amplitudes(fine_grid.clone(), padded, Representation::Fourier)?
        .to_position()
        .samples()?;
    let diff: f64 = fine_samples
        .iter()
        .zip(&interp)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>();
    // Riemann sum on the fine grid approximates the L2(S) integral.
    Ok((diff / fine_grid.len() as f64).sqrt())
}

/// One row of the evolution record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordRow {
    pub t: f64,
    pub norm: f64,
    /// `⟨f⟩ - f⋆`.
    pub f_mean: f64,
    pub energy: f64,
    pub leakage: f64,
    /// Norm of the coefficients outside `{-N/2..N/2-1}^d`.
    pub tail_mass: f64,
    /// `E_0 ω_t^{-2}` with `E_0` the first recorded energy.
    pub bound: f64,
    pub unpaired_mass: f64,
}

/// Series collected along an evolution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyReport {
    pub rows: Vec<RecordRow>,
}

impl EnergyReport {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }
    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.energy).collect()
    }
    pub fn f_means(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.f_mean).collect()
    }

    /// Largest relative increase `E_{i+1}/E_i - 1` between record points,
    /// ignoring increases below the absolute floor `abs_floor`.
    pub fn worst_energy_increase(&self, abs_floor: f64) -> f64 {
        self.rows
            .windows(2)
            .map(|w| {
                let inc = w[1].energy - w[0].energy;
                if inc <= abs_floor {
                    0.0
                } else {
                    inc / w[0].energy.abs().max(f64::MIN_POSITIVE)
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| QhdError::Io(std::io::Error::other(e));
        wr.write_record([
            "t", "norm", "f_mean", "energy", "leakage", "tail_mass", "bound", "unpaired_mass",
        ])
        .map_err(io)?;
        for r in &self.rows {
            wr.write_record(
                [r.t, r.norm, r.f_mean, r.energy, r.leakage, r.tail_mass, r.bound, r.unpaired_mass]
                    .iter()
                    .map(|v| format!("{v:.12e}")),
            )
            .map_err(io)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Recorder computing the diagnostic row at each record point.
pub struct DiagnosticRecorder<'a> {
    pub schedule: &'a Schedule,
    pub field: &'a [f64],
    pub x_star: Vec<f64>,
    pub f_star: f64,
    pub leakage_delta: f64,
    pub report: EnergyReport,
    /// When false only `t`, `norm` and `f_mean` are filled (cheaper).
    pub full: bool,
}

impl<'a> DiagnosticRecorder<'a> {
    pub fn new(schedule: &'a Schedule, field: &'a [f64], x_star: Vec<f64>, f_star: f64) -> Self {
        DiagnosticRecorder {
            schedule,
            field,
            x_star,
            f_star,
            leakage_delta: 0.05,
            report: EnergyReport::default(),
            full: true,
        }
    }
}

impl Recorder for DiagnosticRecorder<'_> {
    fn record(&mut self, t: f64, state: &WaveState) -> Result<()> {
        let f_mean = expected_f(state, self.field, self.f_star)?;
        let mut row = RecordRow {
            t,
            norm: state.norm(),
            f_mean,
            energy: f64::NAN,
            leakage: f64::NAN,
            tail_mass: f64::NAN,
            bound: f64::NAN,
            unpaired_mass: f64::NAN,
        };
        if self.full {
            let terms =
                lyapunov_terms(state, self.schedule, t, &self.x_star, self.field, self.f_star)?;
            row.energy = terms.total;
            row.unpaired_mass = terms.unpaired_mass;
            row.leakage = leakage(state, self.leakage_delta)?;
            let half = (state.grid().half() / 2).max(1);
            row.tail_mass = crate::grid::project_pm(state, half)?.1;
            let e0 = self.report.rows.first().map_or(terms.total, |r| r.energy);
            let w = self.schedule.omega(t)?;
            row.bound = e0 / (w * w);
        }
        self.report.rows.push(row);
        Ok(())
    }
}

/// Residual of the interpolated collocation equation at the middle of three
/// states sampled at `t - h`, `t`, `t + h`:
/// `‖i ∂_tΨ - a(-Δ)Ψ - b VΨ‖` with a centred difference in time, measured
/// as an `L2(S)` norm of the interpolant.
pub fn collocation_residual(
    prev: &WaveState,
    mid: &WaveState,
    next: &WaveState,
    schedule: &Schedule,
    t: f64,
    h: f64,
    field: &[f64],
) -> Result<f64> {
    let grid = mid.grid();
    prev.grid().check_same(grid)?;
    next.grid().check_same(grid)?;
    let (a, b) = schedule.ab_coeffs(t)?;
    let p0 = prev.to_position();
    let p2 = next.to_position();
    let mid_f = mid.to_fourier();
    let symbol = crate::propagator::kinetic_symbol(grid);
    let mut lap = mid_f.clone();
    for (c, s) in lap.amplitudes_mut().iter_mut().zip(&symbol) {
        *c *= a * s;
    }
    let kin = lap.to_position();
    let mid_p = mid.to_position();
    let i = Complex64::new(0.0, 1.0);
    let res: f64 = (0..grid.len())
        .map(|k| {
            let dt = (p2.amplitudes()[k] - p0.amplitudes()[k]) / (2.0 * h);
            let r = i * dt - kin.amplitudes()[k] - mid_p.amplitudes()[k] * (b * field[k]);
            r.norm_sqr()
        })
        .sum();
    Ok(res.sqrt())
}

/// Sup distance between `g` and its mollification on the inner box; thin
/// wrapper used by the bound experiments.
pub fn mollification_distance(grid: &GridSpec, g: &[f64], sigma: f64) -> Result<f64> {
    Ok(mollify(grid, g, sigma)?.sup_distance_inner)
}
