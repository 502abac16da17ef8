//! Strang split-step integration of `i ∂_t Ψ = [a(t) (-Δ) + b(t) V] Ψ` on
//! the grid, with step-doubling error control.
//!
//! Physical lengths are `2R` times scaled ones, so on the scaled box the
//! kinetic multiplier of mode `n` is `(2π‖n‖)² / (2R)²`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, QhdError, Result};
use crate::grid::{FftEngine, GridSpec, Representation, WaveState};
use crate::phase::{apply_diag_phase, cis, fill_diag_phase};
use crate::schedule::Schedule;

/// Integrator settings.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveConfig {
    pub dt_initial: f64,
    /// Local error tolerance per unit time.
    pub tol_step: f64,
    pub max_steps: usize,
    /// Record every this many accepted steps (0 records only the endpoints).
    pub record_every: usize,
    pub seed: u64,
    /// When false, take fixed steps of `dt_initial` (the last one shortened).
    pub adaptive: bool,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            dt_initial: 1e-3,
            tol_step: 1e-6,
            max_steps: 5_000_000,
            record_every: 100,
            seed: 0,
            adaptive: true,
        }
    }
}

impl EvolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_initial > 0.0) || !self.dt_initial.is_finite() {
            return Err(invalid("dt_initial must be positive"));
        }
        if !(self.tol_step > 0.0) {
            return Err(invalid("tol_step must be positive"));
        }
        if self.max_steps == 0 {
            return Err(invalid("max_steps must be at least 1"));
        }
        Ok(())
    }
}

/// Receives the state at record points.
pub trait Recorder {
    fn record(&mut self, t: f64, state: &WaveState) -> Result<()>;
}

/// Recorder that ignores everything.
pub struct NoRecord;

impl Recorder for NoRecord {
    fn record(&mut self, _t: f64, _state: &WaveState) -> Result<()> {
        Ok(())
    }
}

impl<F: FnMut(f64, &WaveState) -> Result<()>> Recorder for F {
    fn record(&mut self, t: f64, state: &WaveState) -> Result<()> {
        self(t, state)
    }
}

/// Outcome of [`evolve`] (also carried by a step-budget error).
#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: WaveState,
    /// Time reached.
    pub t: f64,
    pub accepted: usize,
    pub rejected: usize,
    /// `| ‖Ψ_end‖ - ‖Ψ_start‖ |`.
    pub norm_drift: f64,
    pub min_dt: f64,
    pub max_dt: f64,
}

/// `(2π‖n‖)² / (2R)²` for every stored mode, in storage order.
pub fn kinetic_symbol(grid: &GridSpec) -> Vec<f64> {
    let axis = axis_symbol(grid);
    let side = grid.side();
    (0..grid.len())
        .map(|flat| {
            let mut rem = flat;
            let mut s = 0.0;
            for _ in 0..grid.dim() {
                s += axis[rem % side];
                rem /= side;
            }
            s
        })
        .collect()
}

fn axis_symbol(grid: &GridSpec) -> Vec<f64> {
    let w = 2.0 * PI / (2.0 * grid.radius());
    (0..grid.side())
        .map(|k| {
            let n = grid.slot_to_index(k) as f64;
            (w * n) * (w * n)
        })
        .collect()
}

/// Multiplies Fourier coefficient `n` by `e^{-i (2π‖n‖)² θ}`; `θ` is the
/// accumulated kinetic coefficient in scaled-box units.
pub fn kinetic_phase(state: &WaveState, theta: f64) -> Result<WaveState> {
    if !theta.is_finite() {
        return Err(invalid("kinetic phase must be finite"));
    }
    let mut f = state.to_fourier();
    let grid = f.grid().clone();
    let mut j = vec![0i64; grid.dim()];
    for (flat, a) in f.amplitudes_mut().iter_mut().enumerate() {
        grid.multi_index(flat, &mut j);
        let n2: f64 = j.iter().map(|&v| (v * v) as f64).sum();
        *a *= cis(-4.0 * PI * PI * n2 * theta);
    }
    Ok(match state.representation() {
        Representation::Fourier => f,
        Representation::Position => f.to_position(),
    })
}

/// Multiplies position sample `j` by `e^{-i β g(x_j)}`.
pub fn potential_phase(state: &WaveState, beta: f64, field: &[f64]) -> Result<WaveState> {
    if field.len() != state.grid().len() {
        return Err(QhdError::GridMismatch(format!(
            "field has {} values, grid has {} points",
            field.len(),
            state.grid().len()
        )));
    }
    let mut p = state.to_position();
    apply_diag_phase(p.amplitudes_mut(), field, beta, 1.0);
    Ok(match state.representation() {
        Representation::Position => p,
        Representation::Fourier => p.to_fourier(),
    })
}

/// Reusable integrator for one grid and potential field.
pub struct Propagator<'a> {
    grid: GridSpec,
    field: &'a [f64],
    axis_k2: Vec<f64>,
    kin_axis: Vec<Complex64>,
    // Kinetic factors for the two half steps and their product.
    kin: [Vec<Complex64>; 3],
    // Potential factors for the four quarter steps.
    pot: [Vec<Complex64>; 4],
    fft: FftEngine,
    inv_len: f64,
}

impl<'a> Propagator<'a> {
    pub fn new(grid: &GridSpec, field: &'a [f64]) -> Result<Self> {
        if field.len() != grid.len() {
            return Err(QhdError::GridMismatch(format!(
                "field has {} values, grid has {} points",
                field.len(),
                grid.len()
            )));
        }
        if field.iter().any(|v| !v.is_finite()) {
            return Err(QhdError::Numeric("potential field has non-finite values".into()));
        }
        let fft = FftEngine::new(grid);
        let zeros = || vec![Complex64::new(0.0, 0.0); grid.len()];
        Ok(Propagator {
            grid: grid.clone(),
            field,
            axis_k2: axis_symbol(grid),
            kin_axis: vec![Complex64::new(0.0, 0.0); grid.side()],
            kin: [zeros(), zeros(), zeros()],
            pot: [zeros(), zeros(), zeros(), zeros()],
            fft,
            inv_len: 1.0 / grid.len() as f64,
        })
    }

    /// Fills `kin[slot]` with `e^{-i α k²(n)}` from per-axis factors.
    fn build_kinetic(&mut self, slot: usize, alpha: f64) {
        let side = self.grid.side();
        let d = self.grid.dim();
        fill_diag_phase(&mut self.kin_axis, &self.axis_k2, alpha);
        let kin = &mut self.kin[slot];
        kin[..side].copy_from_slice(&self.kin_axis);
        let mut len = side;
        for _ in 1..d {
            // Outer axes are slower: kin[i*len + r] = axis[i] * kin[r].
            for i in (0..side).rev() {
                let f = self.kin_axis[i];
                for r in 0..len {
                    kin[i * len + r] = kin[r] * f;
                }
            }
            len *= side;
        }
    }

    fn kinetic(&mut self, psi: &mut [Complex64], slot: usize) {
        self.fft.forward_raw(psi);
        let s = self.inv_len;
        for (a, k) in psi.iter_mut().zip(&self.kin[slot]) {
            *a = *a * k * s;
        }
        self.fft.inverse_raw(psi);
    }

    fn apply_pot(&self, psi: &mut [Complex64], slots: &[usize]) {
        match *slots {
            [a] => {
                for (x, p) in psi.iter_mut().zip(&self.pot[a]) {
                    *x *= p;
                }
            }
            [a, b] => {
                for ((x, p), q) in psi.iter_mut().zip(&self.pot[a]).zip(&self.pot[b]) {
                    *x *= p * q;
                }
            }
            _ => unreachable!("one or two quarter factors"),
        }
    }

    /// One Strang step on position amplitudes:
    /// `V(β₁) K(α) V(β₂)` with `β₁ = ∫_t^{t+dt/2} b`, `α = ∫_t^{t+dt} a`,
    /// `β₂ = ∫_{t+dt/2}^{t+dt} b`.
    pub fn strang(&mut self, psi: &mut [Complex64], s: &Schedule, t: f64, dt: f64) -> Result<()> {
        let mid = t + 0.5 * dt;
        let b1 = s.b_integral(t, mid)?;
        let b2 = s.b_integral(mid, t + dt)?;
        let a = s.a_integral(t, t + dt)?;
        apply_diag_phase(psi, self.field, b1, 1.0);
        self.build_kinetic(0, a);
        self.kinetic(psi, 0);
        apply_diag_phase(psi, self.field, b2, 1.0);
        Ok(())
    }

    /// A full step and two half steps from the same start. On return `full`
    /// holds the single-step result and `half` the two-half-step result.
    /// The quarter-step potential factors and half-step kinetic factors are
    /// shared between the two paths.
    fn doubled(
        &mut self,
        full: &mut [Complex64],
        half: &mut [Complex64],
        s: &Schedule,
        t: f64,
        dt: f64,
    ) -> Result<()> {
        let q = [t, t + 0.25 * dt, t + 0.5 * dt, t + 0.75 * dt, t + dt];
        for i in 0..4 {
            let b = s.b_integral(q[i], q[i + 1])?;
            fill_diag_phase(&mut self.pot[i], self.field, b);
        }
        self.build_kinetic(0, s.a_integral(q[0], q[2])?);
        self.build_kinetic(1, s.a_integral(q[2], q[4])?);
        {
            let [k0, k1, k2] = &mut self.kin;
            for ((c, a), b) in k2.iter_mut().zip(k0.iter()).zip(k1.iter()) {
                *c = a * b;
            }
        }
        self.apply_pot(full, &[0, 1]);
        self.kinetic(full, 2);
        self.apply_pot(full, &[2, 3]);

        self.apply_pot(half, &[0]);
        self.kinetic(half, 0);
        self.apply_pot(half, &[1, 2]);
        self.kinetic(half, 1);
        self.apply_pot(half, &[3]);
        Ok(())
    }
}

/// Single Strang step applied to a state (any representation; result in
/// position representation).
pub fn strang_step(
    state: &WaveState,
    t: f64,
    dt: f64,
    schedule: &Schedule,
    field: &[f64],
) -> Result<WaveState> {
    let mut out = state.to_position();
    let mut p = Propagator::new(state.grid(), field)?;
    p.strang(out.amplitudes_mut(), schedule, t, dt)?;
    Ok(out)
}

/// Advances `state` from `t0` to `t1`.
///
/// Adaptive mode compares one step of size `dt` against two of size `dt/2`
/// and uses the Richardson estimate `‖Ψ_full - Ψ_half‖ / 3` of the local
/// error of the half-step result, which is kept when the estimate is below
/// `tol_step · dt`.
pub fn evolve(
    state: &WaveState,
    schedule: &Schedule,
    t0: f64,
    t1: f64,
    config: &EvolveConfig,
    field: &[f64],
    recorder: &mut dyn Recorder,
) -> Result<Evolution> {
    config.validate()?;
    if !(t1 >= t0) {
        return Err(invalid(format!("need t0 <= t1, got {t0} > {t1}")));
    }
    schedule.check(t0)?;
    schedule.check(t1)?;
    let grid = state.grid().clone();
    let mut prop = Propagator::new(&grid, field)?;
    let start = state.to_position();
    let norm0 = start.norm();
    let mut psi = start.clone().into_amplitudes();
    let mut trial = psi.clone();
    let mut half = psi.clone();
    let mut t = t0;
    let mut dt = config.dt_initial;
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let (mut min_dt, mut max_dt) = (f64::INFINITY, 0.0f64);
    let as_state = |amps: &[Complex64]| {
        WaveState::from_amplitudes(grid.clone(), amps.to_vec(), Representation::Position)
            .expect("length preserved")
    };
    recorder.record(t, &start)?;
    let finish_eps = 1e-14 * (1.0 + t1.abs());
    while t1 - t > finish_eps {
        if accepted + rejected >= config.max_steps {
            let st = as_state(&psi);
            let drift = (st.norm() - norm0).abs();
            return Err(QhdError::StepBudget {
                max_steps: config.max_steps,
                t,
                partial: Box::new(Evolution {
                    state: st,
                    t,
                    accepted,
                    rejected,
                    norm_drift: drift,
                    min_dt,
                    max_dt,
                }),
            });
        }
        let last = t + dt >= t1 - finish_eps;
        let h = if last { t1 - t } else { dt };
        let norm_sq;
        if config.adaptive {
            trial.copy_from_slice(&psi);
            half.copy_from_slice(&psi);
            prop.doubled(&mut trial, &mut half, schedule, t, h)?;
            let mut diff = 0.0;
            let mut nsq = 0.0;
            for (a, b) in trial.iter().zip(&half) {
                diff += (a - b).norm_sqr();
                nsq += b.norm_sqr();
            }
            let est = diff.sqrt() / 3.0;
            // below the FFT round-off level shrinking h cannot lower est any further
            let floor = 2.0 * f64::EPSILON * nsq.sqrt();
            let target = (config.tol_step * h).max(floor);
            let factor = if est > 0.0 {
                (0.9 * (target / est).sqrt()).clamp(0.2, 2.0)
            } else {
                2.0
            };
            if est > target {
                rejected += 1;
                dt = h * factor;
                continue;
            }
            std::mem::swap(&mut psi, &mut half);
            norm_sq = nsq;
            if !last {
                dt = h * factor;
            }
        } else {
            prop.strang(&mut psi, schedule, t, h)?;
            norm_sq = psi.iter().map(|a| a.norm_sqr()).sum();
        }
        t = if last { t1 } else { t + h };
        accepted += 1;
        min_dt = min_dt.min(h);
        max_dt = max_dt.max(h);
        let drift = (norm_sq.sqrt() - norm0).abs();
        if drift > 1e-8 {
            return Err(QhdError::Instability { drift, t });
        }
        if t >= t1 || (config.record_every > 0 && accepted % config.record_every == 0) {
            recorder.record(t, &as_state(&psi))?;
        }
    }
    if accepted == 0 {
        min_dt = 0.0;
    }
    let state = as_state(&psi);
    let norm_drift = (state.norm() - norm0).abs();
    Ok(Evolution {
        state,
        t,
        accepted,
        rejected,
        norm_drift,
        min_dt,
        max_dt,
    })
}
