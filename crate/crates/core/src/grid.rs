//! Uniform grids on the scaled box `S = [-1/2, 1/2)^d`, discrete Fourier
//! transforms and Fourier interpolation.
//!
//! Every axis holds `2N` points `x_j = j / (2N)` with `j ∈ {-N, ..., N-1}`.
//! Both position samples and Fourier coefficients are stored row-major
//! (axis 0 slowest) in FFT order: storage slot `k` holds index `k` when
//! `k < N` and index `k - 2N` otherwise.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, QhdError, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    d: usize,
    n: usize,
    center: Vec<f64>,
    radius: f64,
}

impl GridSpec {
    /// Builds a grid with half size `n` (a power of two) per axis.
    pub fn new(d: usize, n: usize, center: Vec<f64>, radius: f64) -> Result<Self> {
        if d == 0 || d > MAX_DIM {
            return Err(invalid(format!("dimension must be in 1..={MAX_DIM}, got {d}")));
        }
        if n == 0 || !n.is_power_of_two() {
            return Err(invalid(format!("N must be a positive power of two, got {n}")));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid(format!("radius must be positive, got {radius}")));
        }
        if center.len() != d {
            return Err(invalid(format!(
                "center has length {}, expected {d}",
                center.len()
            )));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(invalid("center must be finite"));
        }
        let total = (2 * n).checked_pow(d as u32).unwrap_or(usize::MAX);
        if total > (1usize << 30) {
            return Err(invalid(format!("grid with (2N)^d = {total} points is too large")));
        }
        Ok(GridSpec { d, n, center, radius })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Half size `N`.
    pub fn half(&self) -> usize {
        self.n
    }

    /// Points per axis, `2N`.
    pub fn side(&self) -> usize {
        2 * self.n
    }

    /// Total number of points, `(2N)^d`.
    pub fn len(&self) -> usize {
        self.side().pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Physical grid spacing `2R / (2N)`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.radius / self.side() as f64
    }

    /// Signed index in `{-N, ..., N-1}` stored at slot `k` of an axis.
    pub fn slot_to_index(&self, k: usize) -> i64 {
        slot_to_index(k, self.n)
    }

    /// Storage slot of a signed index; indices outside `{-N..N-1}` wrap.
    pub fn index_to_slot(&self, j: i64) -> usize {
        j.rem_euclid(self.side() as i64) as usize
    }

    /// Signed multi-index of the flat storage position `flat`.
    pub fn multi_index(&self, flat: usize, out: &mut [i64]) {
        let side = self.side();
        let mut rem = flat;
        for a in (0..self.d).rev() {
            out[a] = self.slot_to_index(rem % side);
            rem /= side;
        }
    }

    /// Flat storage position of a signed multi-index (wrapping modulo `2N`).
    pub fn flat_index(&self, j: &[i64]) -> usize {
        let side = self.side();
        j.iter().fold(0, |acc, &ji| acc * side + self.index_to_slot(ji))
    }

    /// Scaled coordinate `j/(2N)` for every slot along one axis.
    pub fn axis_coords(&self) -> Vec<f64> {
        let side = self.side() as f64;
        (0..self.side())
            .map(|k| self.slot_to_index(k) as f64 / side)
            .collect()
    }

    /// Scaled point `x_j ∈ S` at a flat storage position.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut j = vec![0i64; self.d];
        self.multi_index(flat, &mut j);
        let side = self.side() as f64;
        j.iter().map(|&ji| ji as f64 / side).collect()
    }

    /// Physical point `2R x_j + x0` at a flat storage position.
    pub fn physical_point(&self, flat: usize) -> Vec<f64> {
        let mut p = self.point(flat);
        for (pi, c) in p.iter_mut().zip(&self.center) {
            *pi = self.to_physical_coord(*pi, *c);
        }
        p
    }

    fn to_physical_coord(&self, x: f64, c: f64) -> f64 {
        2.0 * self.radius * x + c
    }

    /// Maps a scaled point to physical coordinates.
    pub fn to_physical(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.center)
            .map(|(&xi, &c)| self.to_physical_coord(xi, c))
            .collect()
    }

    /// Maps a physical point to scaled coordinates.
    pub fn to_scaled(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(&self.center)
            .map(|(&yi, &c)| (yi - c) / (2.0 * self.radius))
            .collect()
    }

    /// All scaled points in storage order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// All physical points in storage order.
    pub fn physical_points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|k| self.physical_point(k)).collect()
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(QhdError::GridMismatch(format!(
                "d={} N={} vs d={} N={} (or differing geometry)",
                self.d, self.n, other.d, other.n
            )))
        }
    }
}

/// Signed index at slot `k` for half size `n`.
pub(crate) fn slot_to_index(k: usize, n: usize) -> i64 {
    if k < n {
        k as i64
    } else {
        k as i64 - 2 * n as i64
    }
}

/// Alias kept for readers who think in terms of the grid constructor.
pub fn make_grid(d: usize, n: usize, x0: Vec<f64>, r: f64) -> Result<GridSpec> {
    GridSpec::new(d, n, x0, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Amplitudes are `Ψ(x_j)/√((2N)^d)`.
    Position,
    /// Amplitudes are the Fourier coefficients `Ψ̂_n`.
    Fourier,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Position => "position",
            Representation::Fourier => "fourier",
        }
    }
}

/// Discrete wavefunction on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    grid: GridSpec,
    amps: Vec<Complex64>,
    repr: Representation,
}

impl WaveState {
    pub fn from_amplitudes(
        grid: GridSpec,
        amps: Vec<Complex64>,
        repr: Representation,
    ) -> Result<Self> {
        if amps.len() != grid.len() {
            return Err(invalid(format!(
                "{} amplitudes for a grid of {} points",
                amps.len(),
                grid.len()
            )));
        }
        Ok(WaveState { grid, amps, repr })
    }

    /// Position state from function values `F(x_j)` in storage order.
    pub fn from_samples(grid: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        let s = 1.0 / (grid.len() as f64).sqrt();
        let amps = samples.into_iter().map(|v| v * s).collect();
        Self::from_amplitudes(grid, amps, Representation::Position)
    }

    /// Position state sampling `f` at the scaled grid points.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let samples = (0..grid.len()).map(|k| f(&grid.point(k))).collect();
        Self::from_samples(grid, samples).expect("length matches by construction")
    }

    /// Unit-norm samples of the plane wave `χ_n(x) = e^{2πi n·x}`.
    pub fn plane_wave(grid: GridSpec, n: &[i64]) -> Result<Self> {
        let samples = plane_wave_samples(&grid, n)?;
        Self::from_samples(grid, samples)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescales to unit norm; errors on the zero state.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(QhdError::Numeric("cannot normalize a zero state".into()));
        }
        let s = 1.0 / n;
        self.amps.iter_mut().for_each(|a| *a *= s);
        Ok(())
    }

    /// Function values `F(x_j) = √((2N)^d) · amplitude_j` (position only).
    pub fn samples(&self) -> Result<Vec<Complex64>> {
        self.expect(Representation::Position)?;
        let s = (self.grid.len() as f64).sqrt();
        Ok(self.amps.iter().map(|a| a * s).collect())
    }

    /// Copy of the state in position representation.
    pub fn to_position(&self) -> WaveState {
        match self.repr {
            Representation::Position => self.clone(),
            Representation::Fourier => dft_inverse(self).expect("representation checked"),
        }
    }

    /// Copy of the state in Fourier representation.
    pub fn to_fourier(&self) -> WaveState {
        match self.repr {
            Representation::Fourier => self.clone(),
            Representation::Position => dft_forward(self).expect("representation checked"),
        }
    }

    pub(crate) fn expect(&self, r: Representation) -> Result<()> {
        if self.repr == r {
            Ok(())
        } else {
            Err(QhdError::Representation {
                expected: r.name(),
                found: self.repr.name(),
            })
        }
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Reusable transform plans and scratch space for one grid shape.
pub(crate) struct FftEngine {
    d: usize,
    side: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    block: Vec<Complex64>,
}

impl FftEngine {
    pub(crate) fn new(grid: &GridSpec) -> Self {
        let side = grid.side();
        let (fwd, inv) = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            (p.plan_fft_forward(side), p.plan_fft_inverse(side))
        });
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        FftEngine {
            d: grid.dim(),
            side,
            fwd,
            inv,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            block: Vec::new(),
        }
    }

    /// `Σ_j e^{-2πi n·j/(2N)} a_j` along every axis, without normalization.
    pub(crate) fn forward_raw(&mut self, data: &mut [Complex64]) {
        let f = Arc::clone(&self.fwd);
        self.apply(data, f.as_ref());
    }

    /// `Σ_n e^{+2πi n·j/(2N)} a_n` along every axis, without normalization.
    pub(crate) fn inverse_raw(&mut self, data: &mut [Complex64]) {
        let f = Arc::clone(&self.inv);
        self.apply(data, f.as_ref());
    }

    /// Factor that makes a raw transform unitary.
    pub(crate) fn unitary_scale(&self) -> f64 {
        1.0 / (self.side as f64).powf(self.d as f64 / 2.0)
    }

    fn apply(&mut self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let side = self.side;
        let total = data.len();
        for axis in 0..self.d {
            let stride = side.pow((self.d - 1 - axis) as u32);
            if stride == 1 {
                fft.process_with_scratch(data, &mut self.scratch);
                continue;
            }
            // Gather all lines of one outer block contiguously, transform, scatter back.
            let block_len = side * stride;
            self.block.resize(block_len, Complex64::new(0.0, 0.0));
            for base in (0..total).step_by(block_len) {
                let chunk = &data[base..base + block_len];
                for i in 0..side {
                    for inner in 0..stride {
                        self.block[inner * side + i] = chunk[i * stride + inner];
                    }
                }
                fft.process_with_scratch(&mut self.block, &mut self.scratch);
                let chunk = &mut data[base..base + block_len];
                for i in 0..side {
                    for inner in 0..stride {
                        chunk[i * stride + inner] = self.block[inner * side + i];
                    }
                }
            }
        }
    }
}

/// Unitary transform from position samples to Fourier coefficients.
pub fn dft_forward(state: &WaveState) -> Result<WaveState> {
    state.expect(Representation::Position)?;
    let mut out = state.clone();
    let mut eng = FftEngine::new(&state.grid);
    eng.forward_raw(&mut out.amps);
    let s = eng.unitary_scale();
    out.amps.iter_mut().for_each(|a| *a *= s);
    out.repr = Representation::Fourier;
    Ok(out)
}

/// Unitary transform from Fourier coefficients back to position samples.
pub fn dft_inverse(state: &WaveState) -> Result<WaveState> {
    state.expect(Representation::Fourier)?;
    let mut out = state.clone();
    let mut eng = FftEngine::new(&state.grid);
    eng.inverse_raw(&mut out.amps);
    let s = eng.unitary_scale();
    out.amps.iter_mut().for_each(|a| *a *= s);
    out.repr = Representation::Position;
    Ok(out)
}

/// Samples of `χ_n(x) = e^{2πi n·x}` on the grid, in storage order. Any
/// integer mode is accepted, including ones outside `{-N..N-1}^d`.
pub fn plane_wave_samples(grid: &GridSpec, n: &[i64]) -> Result<Vec<Complex64>> {
    if n.len() != grid.dim() {
        return Err(invalid(format!(
            "mode has {} components, grid dimension is {}",
            n.len(),
            grid.dim()
        )));
    }
    let side = grid.side() as i64;
    let mut j = vec![0i64; grid.dim()];
    Ok((0..grid.len())
        .map(|k| {
            grid.multi_index(k, &mut j);
            // Reduce n·j modulo 2N exactly before taking the angle.
            let r: i64 = n
                .iter()
                .zip(&j)
                .map(|(&ni, &ji)| (ni * ji).rem_euclid(side))
                .sum::<i64>()
                .rem_euclid(side);
            Complex64::from_polar(1.0, 2.0 * PI * r as f64 / side as f64)
        })
        .collect())
}

/// `(2N)^{-d} Σ_j conj(φ(x_j)) ψ(x_j)` for sampled functions in storage order.
pub fn discrete_inner_samples(
    grid: &GridSpec,
    phi: &[Complex64],
    psi: &[Complex64],
) -> Result<Complex64> {
    if phi.len() != grid.len() || psi.len() != grid.len() {
        return Err(QhdError::GridMismatch(format!(
            "sample lengths {} and {} on a grid of {} points",
            phi.len(),
            psi.len(),
            grid.len()
        )));
    }
    let s: Complex64 = phi.iter().zip(psi).map(|(a, b)| a.conj() * b).sum();
    Ok(s / grid.len() as f64)
}

/// Discrete inner product of two states on the same grid.
///
/// For position states this is `⟨Φ, Ψ⟩_Γ` of the underlying functions scaled
/// by `(2N)^{-d}`, i.e. `Σ_j conj(φ_j) ψ_j` over amplitudes; by unitarity the
/// same value is obtained in the Fourier representation.
pub fn discrete_inner(phi: &WaveState, psi: &WaveState) -> Result<Complex64> {
    phi.grid.check_same(&psi.grid)?;
    let psi_conv;
    let psi_ref = if phi.repr == psi.repr {
        psi
    } else {
        psi_conv = match phi.repr {
            Representation::Position => psi.to_position(),
            Representation::Fourier => psi.to_fourier(),
        };
        &psi_conv
    };
    Ok(phi
        .amps
        .iter()
        .zip(&psi_ref.amps)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Evaluates the Fourier interpolant `Σ_n Ψ̂_n χ_n(x)` at a scaled point.
pub fn interpolant_eval(state: &WaveState, x: &[f64]) -> Result<Complex64> {
    let grid = &state.grid;
    if x.len() != grid.dim() {
        return Err(invalid(format!(
            "point has {} components, grid dimension is {}",
            x.len(),
            grid.dim()
        )));
    }
    if let Some(bad) = x.iter().find(|&&xi| !(-0.5..0.5).contains(&xi)) {
        return Err(QhdError::Domain(format!(
            "coordinate {bad} outside [-1/2, 1/2)"
        )));
    }
    let coeffs = state.to_fourier();
    let side = grid.side();
    // Per-axis factors e^{2πi n x_a} in slot order; n·x is reduced mod 1 so
    // grid points hit exact dyadic angles.
    let factors: Vec<Vec<Complex64>> = x
        .iter()
        .map(|&xa| {
            (0..side)
                .map(|k| {
                    let n = grid.slot_to_index(k) as f64;
                    let frac = (n * xa).rem_euclid(1.0);
                    Complex64::from_polar(1.0, 2.0 * PI * frac)
                })
                .collect()
        })
        .collect();
    let d = grid.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut slots = vec![0usize; d];
    for (flat, c) in coeffs.amps.iter().enumerate() {
        let mut rem = flat;
        for a in (0..d).rev() {
            slots[a] = rem % side;
            rem /= side;
        }
        let mut w = *c;
        for a in 0..d {
            w *= factors[a][slots[a]];
        }
        acc += w;
    }
    Ok(acc)
}

/// `sqrt(Σ_n (2π‖n‖₂)^{2k} |Ψ̂_n|²)` over the stored modes.
pub fn sobolev_seminorm(state: &WaveState, k: u32) -> f64 {
    let coeffs = state.to_fourier();
    let grid = &state.grid;
    let mut j = vec![0i64; grid.dim()];
    let mut s = 0.0;
    for (flat, c) in coeffs.amps.iter().enumerate() {
        grid.multi_index(flat, &mut j);
        let n2: f64 = j.iter().map(|&v| (v * v) as f64).sum();
        let w = (4.0 * PI * PI * n2).powi(k as i32);
        s += w * c.norm_sqr();
    }
    s.sqrt()
}

/// Projects onto modes `{-M..M-1}^d`. Returns the projected state in the
/// input representation and the norm of the removed tail; no renormalization.
pub fn project_pm(state: &WaveState, m: usize) -> Result<(WaveState, f64)> {
    let grid = &state.grid;
    if m > grid.half() {
        return Err(invalid(format!(
            "projection size M = {m} exceeds N = {}",
            grid.half()
        )));
    }
    let mut coeffs = state.to_fourier();
    let lo = -(m as i64);
    let hi = m as i64 - 1;
    let mut j = vec![0i64; grid.dim()];
    let mut tail = 0.0;
    for (flat, c) in coeffs.amps.iter_mut().enumerate() {
        grid.multi_index(flat, &mut j);
        if j.iter().any(|&v| v < lo || v > hi) {
            tail += c.norm_sqr();
            *c = Complex64::new(0.0, 0.0);
        }
    }
    let out = match state.repr {
        Representation::Fourier => coeffs,
        Representation::Position => coeffs.to_position(),
    };
    Ok((out, tail.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid1(n: usize) -> GridSpec {
        GridSpec::new(1, n, vec![0.0], 1.0).unwrap()
    }

    #[test]
    fn points_of_small_grids() {
        let mut pts: Vec<f64> = grid1(2).points().into_iter().map(|p| p[0]).collect();
        pts.sort_by(f64::total_cmp);
        assert_eq!(pts, vec![-0.5, -0.25, 0.0, 0.25]);

        let g = GridSpec::new(2, 1, vec![0.0, 0.0], 1.0).unwrap();
        let mut pts = g.points();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(
            pts,
            vec![vec![-0.5, -0.5], vec![-0.5, 0.0], vec![0.0, -0.5], vec![0.0, 0.0]]
        );

        let g = GridSpec::new(1, 1, vec![3.0], 2.0).unwrap();
        let mut phys: Vec<f64> = g.physical_points().into_iter().map(|p| p[0]).collect();
        phys.sort_by(f64::total_cmp);
        assert_eq!(phys, vec![1.0, 3.0]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(GridSpec::new(1, 0, vec![0.0], 1.0).is_err());
        assert!(GridSpec::new(1, 3, vec![0.0], 1.0).is_err());
        assert!(GridSpec::new(1, 2, vec![0.0], 0.0).is_err());
        assert!(GridSpec::new(2, 2, vec![0.0], 1.0).is_err());
        assert!(GridSpec::new(5, 1, vec![0.0; 5], 1.0).is_err());
    }

    #[test]
    fn slot_bijection() {
        let g = grid1(4);
        for k in 0..8 {
            assert_eq!(g.index_to_slot(g.slot_to_index(k)), k);
        }
        assert_eq!(g.slot_to_index(4), -4);
        assert_eq!(g.slot_to_index(7), -1);
    }

    #[test]
    fn constant_state_maps_to_dc() {
        let g = GridSpec::new(2, 2, vec![0.0, 0.0], 1.0).unwrap();
        let s = WaveState::from_fn(g, |_| Complex64::new(1.0, 0.0));
        let f = dft_forward(&s).unwrap();
        assert_abs_diff_eq!(f.amplitudes()[0].re, 1.0, epsilon = 1e-14);
        for a in &f.amplitudes()[1..] {
            assert!(a.norm() < 1e-14);
        }
    }

    #[test]
    fn plane_wave_maps_to_delta() {
        let s = WaveState::plane_wave(grid1(2), &[1]).unwrap();
        let f = dft_forward(&s).unwrap();
        for (k, a) in f.amplitudes().iter().enumerate() {
            let want = if k == 1 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(a.re, want, epsilon = 1e-14);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-14);
        }
        assert!(dft_inverse(&s).is_err());
        assert!(dft_forward(&f).is_err());
    }

    #[test]
    fn inner_products_of_plane_waves() {
        let g = grid1(2);
        let chi = |n: i64| plane_wave_samples(&g, &[n]).unwrap();
        let ip = |a, b| discrete_inner_samples(&g, &chi(a), &chi(b)).unwrap();
        assert_abs_diff_eq!(ip(0, 0).re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ip(1, -3).re, 1.0, epsilon = 1e-14);
        assert!(ip(1, 2).norm() < 1e-14);
    }

    #[test]
    fn interpolant_examples() {
        let s = WaveState::plane_wave(grid1(2), &[1]).unwrap();
        let v = interpolant_eval(&s, &[0.125]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(v.re, h, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, h, epsilon = 1e-14);
        assert!(interpolant_eval(&s, &[0.5]).is_err());

        let c = WaveState::from_fn(grid1(4), |_| Complex64::new(1.0, 0.0));
        let v = interpolant_eval(&c, &[0.3]).unwrap();
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn sobolev_examples() {
        let g = grid1(4);
        let c = WaveState::plane_wave(g.clone(), &[0]).unwrap();
        assert!(sobolev_seminorm(&c, 1) < 1e-12);
        let s1 = WaveState::plane_wave(g.clone(), &[1]).unwrap();
        assert_abs_diff_eq!(sobolev_seminorm(&s1, 1), 2.0 * PI, epsilon = 1e-12);
        let mut sup = WaveState::from_fn(g, |x| {
            Complex64::from_polar(1.0, 2.0 * PI * x[0]) + Complex64::from_polar(1.0, -2.0 * PI * x[0])
        });
        sup.normalize().unwrap();
        assert_abs_diff_eq!(sobolev_seminorm(&sup, 2), 4.0 * PI * PI, epsilon = 1e-10);
    }

    #[test]
    fn projection_examples() {
        let g = grid1(4);
        let s2 = WaveState::plane_wave(g.clone(), &[2]).unwrap();
        let (p, tail) = project_pm(&s2, 1).unwrap();
        assert_abs_diff_eq!(tail, 1.0, epsilon = 1e-14);
        assert!(p.norm() < 1e-14);
        assert!(project_pm(&s2, 5).is_err());

        let mixed = WaveState::from_fn(g, |x| {
            Complex64::new(0.5, 0.0) + Complex64::from_polar(3f64.sqrt() / 2.0, 4.0 * PI * x[0])
        });
        let (p, tail) = project_pm(&mixed, 1).unwrap();
        assert_abs_diff_eq!(tail, 3f64.sqrt() / 2.0, epsilon = 1e-14);
        let f = p.to_fourier();
        assert_abs_diff_eq!(f.amplitudes()[0].re, 0.5, epsilon = 1e-14);
        assert_eq!(p.representation(), Representation::Position);

        let (same, tail) = project_pm(&f, 1).unwrap();
        assert!(tail < 1e-14);
        for (a, b) in same.amplitudes().iter().zip(f.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
