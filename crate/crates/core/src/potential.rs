//! Objective functions, oracle access with query accounting, the
//! R-restriction map, the rectangular mollifier and a classical mean
//! estimator.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, QhdError, Result};
use crate::grid::{FftEngine, GridSpec};

/// Names accepted by [`PotentialSpec::named`].
pub const REGISTRY: [&str; 5] = [
    "quadratic",
    "abs_l1",
    "max_abs",
    "huber",
    "rosenbrock_convexified",
];

type Objective = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Tunables for the registry functions. Unused fields are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialParams {
    /// Overall multiplier `a`.
    pub scale: f64,
    /// Location of the minimizer; defaults to the origin.
    pub shift: Option<Vec<f64>>,
    /// Huber transition width.
    pub delta: f64,
    /// Valley stiffness for `rosenbrock_convexified`.
    pub kappa: f64,
}

impl Default for PotentialParams {
    fn default() -> Self {
        PotentialParams {
            scale: 1.0,
            shift: None,
            delta: 0.1,
            kappa: 4.0,
        }
    }
}

/// An objective with its declared constants.
///
/// `lipschitz` is measured in the `p`-norm on the box `B_∞(box_center,
/// box_radius)`, and `bound` is a promised bound on `|f|` over that box.
#[derive(Clone)]
pub struct PotentialSpec {
    name: String,
    d: usize,
    f: Objective,
    pub lipschitz: f64,
    pub p: f64,
    pub bound: f64,
    pub box_center: Vec<f64>,
    pub box_radius: f64,
    pub minimizer: Option<(Vec<f64>, f64)>,
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialSpec")
            .field("name", &self.name)
            .field("d", &self.d)
            .field("lipschitz", &self.lipschitz)
            .field("p", &self.p)
            .field("bound", &self.bound)
            .field("box_center", &self.box_center)
            .field("box_radius", &self.box_radius)
            .field("minimizer", &self.minimizer)
            .finish()
    }
}

impl PotentialSpec {
    /// Wraps an arbitrary function with caller-declared constants.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        name: impl Into<String>,
        d: usize,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        lipschitz: f64,
        p: f64,
        bound: f64,
        box_center: Vec<f64>,
        box_radius: f64,
        minimizer: Option<(Vec<f64>, f64)>,
    ) -> Result<Self> {
        if d == 0 || box_center.len() != d {
            return Err(invalid("box center length must equal the dimension"));
        }
        if !(lipschitz >= 0.0) || !(p >= 1.0) || !(bound >= 0.0) || !(box_radius > 0.0) {
            return Err(invalid(
                "need lipschitz >= 0, p >= 1, bound >= 0 and box_radius > 0",
            ));
        }
        if let Some((x, _)) = &minimizer {
            if x.len() != d {
                return Err(invalid("minimizer length must equal the dimension"));
            }
        }
        Ok(PotentialSpec {
            name: name.into(),
            d,
            f: Arc::new(f),
            lipschitz,
            p,
            bound,
            box_center,
            box_radius,
            minimizer,
        })
    }

    /// Registry function with constants computed for the box
    /// `B_∞(box_center, box_radius)`. Lipschitz constants are Euclidean
    /// (`p = 2`). Every registry function has minimum value 0 at `shift`.
    pub fn named(
        name: &str,
        d: usize,
        params: &PotentialParams,
        box_center: Vec<f64>,
        box_radius: f64,
    ) -> Result<Self> {
        if d == 0 || box_center.len() != d {
            return Err(invalid("box center length must equal the dimension"));
        }
        if !(box_radius > 0.0) {
            return Err(invalid("box radius must be positive"));
        }
        let a = params.scale;
        if !(a > 0.0) {
            return Err(invalid("potential scale must be positive"));
        }
        let s = params.shift.clone().unwrap_or_else(|| vec![0.0; d]);
        if s.len() != d {
            return Err(invalid("potential shift length must equal the dimension"));
        }
        // Largest |x_i - s_i| over the box, per axis.
        let far: Vec<f64> = box_center
            .iter()
            .zip(&s)
            .map(|(c, si)| (c - si).abs() + box_radius)
            .collect();
        let far_l2 = far.iter().map(|v| v * v).sum::<f64>().sqrt();
        let sqrt_d = (d as f64).sqrt();
        let sc = s.clone();
        let (f, g, lam): (Objective, f64, f64) = match name {
            "quadratic" => (
                Arc::new(move |x: &[f64]| {
                    a * x.iter().zip(&sc).map(|(xi, si)| (xi - si) * (xi - si)).sum::<f64>()
                }),
                2.0 * a * far_l2,
                a * far_l2 * far_l2,
            ),
            "abs_l1" => (
                Arc::new(move |x: &[f64]| {
                    a * x.iter().zip(&sc).map(|(xi, si)| (xi - si).abs()).sum::<f64>()
                }),
                a * sqrt_d,
                a * far.iter().sum::<f64>(),
            ),
            "max_abs" => (
                Arc::new(move |x: &[f64]| {
                    a * x
                        .iter()
                        .zip(&sc)
                        .map(|(xi, si)| (xi - si).abs())
                        .fold(0.0, f64::max)
                }),
                a,
                a * far.iter().cloned().fold(0.0, f64::max),
            ),
            "huber" => {
                let delta = params.delta;
                if !(delta > 0.0) {
                    return Err(invalid("huber delta must be positive"));
                }
                (
                    Arc::new(move |x: &[f64]| {
                        a * x
                            .iter()
                            .zip(&sc)
                            .map(|(xi, si)| huber(xi - si, delta))
                            .sum::<f64>()
                    }),
                    a * sqrt_d,
                    a * far.iter().map(|&u| huber(u, delta)).sum::<f64>(),
                )
            }
            "rosenbrock_convexified" => {
                let kappa = params.kappa;
                if !(kappa >= 0.0) {
                    return Err(invalid("kappa must be nonnegative"));
                }
                // Hessian 2a(I + κL) with L the path Laplacian, ‖L‖ ≤ 4.
                let top = 1.0 + 4.0 * kappa;
                (
                    Arc::new(move |x: &[f64]| {
                        let y: Vec<f64> = x.iter().zip(&sc).map(|(xi, si)| xi - si).collect();
                        let base: f64 = y.iter().map(|v| v * v).sum();
                        let valley: f64 = y.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
                        a * (base + kappa * valley)
                    }),
                    2.0 * a * top * far_l2,
                    a * top * far_l2 * far_l2,
                )
            }
            other => return Err(QhdError::UnknownName(format!("potential '{other}'"))),
        };
        Ok(PotentialSpec {
            name: name.to_string(),
            d,
            f,
            lipschitz: g,
            p: 2.0,
            bound: lam,
            box_center,
            box_radius,
            minimizer: Some((s, 0.0)),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Exact value without query accounting.
    pub fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    /// Known minimum value, if declared.
    pub fn f_star(&self) -> Option<f64> {
        self.minimizer.as_ref().map(|m| m.1)
    }

    /// Overrides the declared Lipschitz constant.
    pub fn with_lipschitz(mut self, g: f64) -> Self {
        self.lipschitz = g;
        self
    }

    /// Worst ratio `|f(x)-f(y)| / (G‖x-y‖_p)` over random pairs in the box.
    pub fn lipschitz_spot_check(&self, pairs: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            self.box_center
                .iter()
                .map(|c| c + self.box_radius * (2.0 * rng.random::<f64>() - 1.0))
                .collect()
        };
        for _ in 0..pairs {
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            let dist = p_norm_diff(&x, &y, self.p);
            if dist > 0.0 && self.lipschitz > 0.0 {
                let r = (self.value(&x) - self.value(&y)).abs() / (self.lipschitz * dist);
                worst = worst.max(r);
            }
        }
        worst
    }
}

fn huber(u: f64, delta: f64) -> f64 {
    let a = u.abs();
    if a <= delta {
        a * a / (2.0 * delta)
    } else {
        a - delta / 2.0
    }
}

fn p_norm_diff(x: &[f64], y: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        x.iter()
            .zip(y)
            .map(|(a, b)| (a - b).abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

/// `g(x) = f(2R x + x0)` on the scaled box.
#[derive(Debug, Clone)]
pub struct Restricted {
    pub spec: PotentialSpec,
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Restricted {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let y: Vec<f64> = x
            .iter()
            .zip(&self.center)
            .map(|(xi, c)| 2.0 * self.radius * xi + c)
            .collect();
        self.spec.value(&y)
    }

    /// Lipschitz constant of `g` on `S`, `2RG`.
    pub fn lipschitz(&self) -> f64 {
        2.0 * self.radius * self.spec.lipschitz
    }

    pub fn bound(&self) -> f64 {
        self.spec.bound
    }
}

/// R-restriction of `spec` around `x0`.
pub fn restrict(spec: &PotentialSpec, x0: &[f64], r: f64) -> Result<Restricted> {
    if !(r > 0.0) {
        return Err(invalid("restriction radius must be positive"));
    }
    if x0.len() != spec.dim() {
        return Err(invalid("center length must equal the dimension"));
    }
    Ok(Restricted {
        spec: spec.clone(),
        center: x0.to_vec(),
        radius: r,
    })
}

/// Shared, thread-safe query counters.
#[derive(Debug, Clone, Default)]
pub struct QueryLedger {
    inner: Arc<Counters>,
}

#[derive(Debug, Default)]
struct Counters {
    exact: AtomicU64,
    noisy: AtomicU64,
    stochastic: AtomicU64,
    sweeps: AtomicU64,
}

/// Point-in-time copy of a [`QueryLedger`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LedgerSnapshot {
    pub exact_evals: u64,
    pub noisy_evals: u64,
    pub stochastic_evals: u64,
    pub grid_sweeps: u64,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn snapshot(&self) -> LedgerSnapshot {
        LedgerSnapshot {
            exact_evals: self.inner.exact.load(Ordering::Relaxed),
            noisy_evals: self.inner.noisy.load(Ordering::Relaxed),
            stochastic_evals: self.inner.stochastic.load(Ordering::Relaxed),
            grid_sweeps: self.inner.sweeps.load(Ordering::Relaxed),
        }
    }

    fn add_exact(&self, n: u64) {
        self.inner.exact.fetch_add(n, Ordering::Relaxed);
    }
    fn add_noisy(&self, n: u64) {
        self.inner.noisy.fetch_add(n, Ordering::Relaxed);
    }
    fn add_stochastic(&self, n: u64) {
        self.inner.stochastic.fetch_add(n, Ordering::Relaxed);
    }
    fn add_sweep(&self) {
        self.inner.sweeps.fetch_add(1, Ordering::Relaxed);
    }
}

/// Exact evaluation, charged to the ledger.
pub fn eval_exact(spec: &PotentialSpec, x: &[f64], ledger: &QueryLedger) -> f64 {
    ledger.add_exact(1);
    spec.value(x)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic value in the open interval (0, 1) keyed on `(x, seed)`.
fn hash_unit(x: &[f64], seed: u64) -> f64 {
    let mut h = splitmix64(seed);
    for xi in x {
        // Normalize -0.0 so that equal points hash equally.
        let bits = if *xi == 0.0 { 0 } else { xi.to_bits() };
        h = splitmix64(h ^ bits);
    }
    ((h >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

/// Noisy value `f̃(x)` with `|f̃(x) - f(x)| < 2 eps_f`, fixed per `(x, seed)`.
pub fn binary_value(spec: &PotentialSpec, x: &[f64], eps_f: f64, seed: u64) -> f64 {
    let v = spec.value(x);
    let step = 2.0 * eps_f;
    let q = v / step;
    let rounded = if q.abs() < 4.5e15 { q.round() * step } else { v };
    let offset = eps_f * (2.0 * hash_unit(x, seed) - 1.0);
    let out = rounded + offset;
    debug_assert!(
        (out - v).abs() < 2.0 * eps_f || (out - v).abs() <= 4.0 * f64::EPSILON * v.abs(),
        "binary oracle envelope violated"
    );
    out
}

/// Binary-oracle evaluation, charged to `noisy_evals`.
pub fn eval_binary(
    spec: &PotentialSpec,
    x: &[f64],
    eps_f: f64,
    seed: u64,
    ledger: &QueryLedger,
) -> Result<f64> {
    if !(eps_f > 0.0) {
        return Err(invalid("eps_f must be positive"));
    }
    ledger.add_noisy(1);
    Ok(binary_value(spec, x, eps_f, seed))
}

/// `f(x) + σξ` with standard normal `ξ`, charged to `stochastic_evals`.
pub fn eval_stochastic<R: Rng + ?Sized>(
    spec: &PotentialSpec,
    x: &[f64],
    sigma: f64,
    rng: &mut R,
    ledger: &QueryLedger,
) -> Result<f64> {
    if !(sigma >= 0.0) {
        return Err(invalid("sigma must be nonnegative"));
    }
    ledger.add_stochastic(1);
    let xi: f64 = StandardNormal.sample(rng);
    Ok(spec.value(x) + sigma * xi)
}

/// Sample count `max(1, ceil(2σ² ln(2/δ) / ε²))` of the Hoeffding-style
/// mean estimator.
pub fn mean_estimate_samples(sigma: f64, eps_f: f64, delta: f64) -> u64 {
    let k = (2.0 * sigma * sigma * (2.0 / delta).ln() / (eps_f * eps_f)).ceil();
    if k.is_finite() && k >= 1.0 {
        k as u64
    } else {
        1
    }
}

/// Averages stochastic evaluations so that `|mean - f(x)| ≤ eps_f` with
/// probability at least `1 - delta`.
pub fn mean_estimate<R: Rng + ?Sized>(
    spec: &PotentialSpec,
    x: &[f64],
    sigma: f64,
    eps_f: f64,
    delta: f64,
    rng: &mut R,
    ledger: &QueryLedger,
) -> Result<f64> {
    if !(eps_f > 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("need eps_f > 0 and 0 < delta < 1"));
    }
    let k = mean_estimate_samples(sigma, eps_f, delta);
    let mut sum = 0.0;
    for _ in 0..k {
        sum += eval_stochastic(spec, x, sigma, rng, ledger)?;
    }
    Ok(sum / k as f64)
}

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// `∫_{-1}^{1} exp(-1/(1-u²)) du`, the per-axis mollifier normalization.
pub fn mollifier_norm_constant() -> f64 {
    static THETA: OnceLock<f64> = OnceLock::new();
    *THETA.get_or_init(|| quadrature::integrate(bump, -1.0, 1.0, 1e-14).integral)
}

/// Rectangular mollifier `M_{σ,d}(x) = (ϑσ)^{-d} Π exp(-1/(1 - x_i²/σ²))`.
pub fn mollifier_value(sigma: f64, d: usize, x: &[f64]) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 0.5) {
        return Err(invalid(format!("mollifier width must be in (0, 1/2), got {sigma}")));
    }
    if x.len() != d {
        return Err(invalid("point length must equal the dimension"));
    }
    let norm = (mollifier_norm_constant() * sigma).powi(d as i32);
    Ok(x.iter().map(|&xi| bump(xi / sigma)).product::<f64>() / norm)
}

/// Result of [`mollify`].
#[derive(Debug, Clone)]
pub struct Mollified {
    pub values: Vec<f64>,
    /// `max |g_σ - g|` over grid points in the inner box `B_∞(1/2 - σ)`.
    pub sup_distance_inner: f64,
}

/// Periodic convolution of grid samples with `M_{σ,d}`.
///
/// The kernel is sampled on the same grid and its weights are normalized to
/// sum to one, so constants are reproduced exactly and convexity of
/// the samples survives (the result is a convex combination of shifts).
pub fn mollify(grid: &GridSpec, g: &[f64], sigma: f64) -> Result<Mollified> {
    if !(sigma > 0.0 && sigma < 0.5) {
        return Err(invalid(format!("mollifier width must be in (0, 1/2), got {sigma}")));
    }
    if g.len() != grid.len() {
        return Err(QhdError::GridMismatch("field length differs from grid size".into()));
    }
    let per_sigma = sigma * grid.side() as f64;
    if per_sigma < 8.0 {
        return Err(QhdError::Resolution(format!(
            "{per_sigma:.2} points per sigma, need at least 8 (use N >= {})",
            (4.0 / sigma).ceil()
        )));
    }
    let mut kernel: Vec<Complex64> = (0..grid.len())
        .map(|k| {
            let x = grid.point(k);
            Complex64::new(x.iter().map(|&xi| bump(xi / sigma)).product(), 0.0)
        })
        .collect();
    let mass: f64 = kernel.iter().map(|c| c.re).sum();
    kernel.iter_mut().for_each(|c| *c /= mass);
    let mut field: Vec<Complex64> = g.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut eng = FftEngine::new(grid);
    eng.forward_raw(&mut kernel);
    eng.forward_raw(&mut field);
    for (f, k) in field.iter_mut().zip(&kernel) {
        *f *= k;
    }
    eng.inverse_raw(&mut field);
    let inv = 1.0 / grid.len() as f64;
    let values: Vec<f64> = field.iter().map(|c| c.re * inv).collect();
    let limit = 0.5 - sigma;
    let mut sup: f64 = 0.0;
    for k in 0..grid.len() {
        let x = grid.point(k);
        if x.iter().all(|xi| xi.abs() <= limit) {
            sup = sup.max((values[k] - g[k]).abs());
        }
    }
    Ok(Mollified {
        values,
        sup_distance_inner: sup,
    })
}

/// How grid values are obtained from the objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleMode {
    Exact,
    Binary { eps_f: f64, seed: u64 },
    Stochastic { sigma: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct FieldKey {
    d: usize,
    n: usize,
    center: Vec<u64>,
    radius: u64,
    mode: (u8, u64, u64),
}

impl FieldKey {
    fn new(grid: &GridSpec, mode: OracleMode) -> Self {
        let mode = match mode {
            OracleMode::Exact => (0, 0, 0),
            OracleMode::Binary { eps_f, seed } => (1, eps_f.to_bits(), seed),
            OracleMode::Stochastic { sigma, seed } => (2, sigma.to_bits(), seed),
        };
        FieldKey {
            d: grid.dim(),
            n: grid.half(),
            center: grid.center().iter().map(|c| c.to_bits()).collect(),
            radius: grid.radius().to_bits(),
            mode,
        }
    }
}

/// An objective bundled with its query ledger and a cache of grid fields.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub spec: PotentialSpec,
    pub ledger: QueryLedger,
    cache: Arc<Mutex<HashMap<FieldKey, Arc<Vec<f64>>>>>,
}

impl Oracle {
    pub fn new(spec: PotentialSpec) -> Self {
        Self::with_ledger(spec, QueryLedger::new())
    }

    pub fn with_ledger(spec: PotentialSpec, ledger: QueryLedger) -> Self {
        Oracle {
            spec,
            ledger,
            cache: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    /// Values of `g(x_j) = f(2R x_j + x0)` over the grid. The first request
    /// for a `(grid, mode)` pair costs one sweep plus one query per point;
    /// later requests hit the cache.
    pub fn grid_potential(&self, grid: &GridSpec, mode: OracleMode) -> Result<Arc<Vec<f64>>> {
        if grid.dim() != self.spec.dim() {
            return Err(QhdError::GridMismatch(format!(
                "grid dimension {} vs potential dimension {}",
                grid.dim(),
                self.spec.dim()
            )));
        }
        let key = FieldKey::new(grid, mode);
        let mut cache = self.cache.lock().expect("field cache poisoned");
        if let Some(v) = cache.get(&key) {
            return Ok(Arc::clone(v));
        }
        let pts = grid.physical_points();
        let count = pts.len() as u64;
        let values: Vec<f64> = match mode {
            OracleMode::Exact => {
                self.ledger.add_exact(count);
                pts.iter().map(|y| self.spec.value(y)).collect()
            }
            OracleMode::Binary { eps_f, seed } => {
                if !(eps_f > 0.0) {
                    return Err(invalid("eps_f must be positive"));
                }
                self.ledger.add_noisy(count);
                pts.iter()
                    .map(|y| binary_value(&self.spec, y, eps_f, seed))
                    .collect()
            }
            OracleMode::Stochastic { sigma, seed } => {
                if !(sigma >= 0.0) {
                    return Err(invalid("sigma must be nonnegative"));
                }
                self.ledger.add_stochastic(count);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                pts.iter()
                    .map(|y| {
                        let xi: f64 = StandardNormal.sample(&mut rng);
                        self.spec.value(y) + sigma * xi
                    })
                    .collect()
            }
        };
        self.ledger.add_sweep();
        let arc = Arc::new(values);
        cache.insert(key, Arc::clone(&arc));
        Ok(arc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quad(d: usize) -> PotentialSpec {
        PotentialSpec::named("quadratic", d, &PotentialParams::default(), vec![0.0; d], 2.0)
            .unwrap()
    }

    #[test]
    fn restriction_examples() {
        let g = restrict(&quad(1), &[0.0], 1.0).unwrap();
        assert_eq!(g.eval(&[0.5]), 1.0);
        assert_eq!(g.eval(&[0.0]), 0.0);
        let l1 = PotentialSpec::named("abs_l1", 2, &PotentialParams::default(), vec![0.0; 2], 4.0)
            .unwrap();
        let g = restrict(&l1, &[0.0, 0.0], 2.0).unwrap();
        assert_eq!(g.eval(&[0.25, -0.25]), 2.0);
        let shifted = restrict(&l1, &[0.3, -0.4], 1.0).unwrap();
        assert_relative_eq!(shifted.eval(&[0.0, 0.0]), 0.7, epsilon = 1e-15);
        assert!(restrict(&l1, &[0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn registry_lipschitz_constants_hold() {
        for name in REGISTRY {
            for d in 1..=3 {
                let p = PotentialParams {
                    shift: Some(vec![0.2; d]),
                    ..Default::default()
                };
                let spec = PotentialSpec::named(name, d, &p, vec![0.1; d], 1.5).unwrap();
                let r = spec.lipschitz_spot_check(1000, 7);
                assert!(r <= 1.0 + 1e-12, "{name} d={d} ratio {r}");
                assert_eq!(spec.value(&[0.2; 3][..d]), 0.0);
            }
        }
        assert!(PotentialSpec::named("nope", 1, &PotentialParams::default(), vec![0.0], 1.0)
            .is_err());
    }

    #[test]
    fn binary_oracle_examples() {
        let spec = quad(1);
        let ledger = QueryLedger::new();
        let v = eval_binary(&spec, &[0.0], 0.01, 3, &ledger).unwrap();
        assert!(v.abs() < 0.02);
        let a = eval_binary(&spec, &[0.5], 0.01, 3, &ledger).unwrap();
        let b = eval_binary(&spec, &[0.5], 0.01, 3, &ledger).unwrap();
        assert_eq!(a, b);
        assert!((a - 0.25).abs() < 0.02);
        let tiny = eval_binary(&spec, &[0.5], 1e-14, 3, &ledger).unwrap();
        assert!((tiny - 0.25).abs() < 1e-13);
        assert_eq!(ledger.snapshot().noisy_evals, 4);
        assert!(eval_binary(&spec, &[0.5], 0.0, 3, &ledger).is_err());
    }

    #[test]
    fn mean_estimate_sample_count() {
        assert_eq!(mean_estimate_samples(1.0, 0.1, 0.05), 738);
        assert_eq!(mean_estimate_samples(0.0, 0.1, 0.05), 1);
        let spec = quad(1);
        let ledger = QueryLedger::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = mean_estimate(&spec, &[0.5], 0.0, 0.1, 0.05, &mut rng, &ledger).unwrap();
        assert_eq!(v, 0.25);
        assert_eq!(ledger.snapshot().stochastic_evals, 1);
    }

    #[test]
    fn mollifier_support_and_symmetry() {
        assert_eq!(mollifier_value(0.1, 2, &[0.1, 0.0]).unwrap(), 0.0);
        assert_eq!(
            mollifier_value(0.1, 2, &[0.03, -0.05]).unwrap(),
            mollifier_value(0.1, 2, &[-0.03, 0.05]).unwrap()
        );
        assert!(mollifier_value(0.5, 1, &[0.0]).is_err());
        assert_relative_eq!(mollifier_norm_constant(), 0.443_993_816_168_079_4, max_relative = 1e-12);
    }

    #[test]
    fn mollify_constant_and_resolution() {
        let g = GridSpec::new(1, 64, vec![0.0], 1.0).unwrap();
        let c = vec![2.5; g.len()];
        let m = mollify(&g, &c, 0.1).unwrap();
        assert!(m.values.iter().all(|v| (v - 2.5).abs() < 1e-10));
        assert!(matches!(mollify(&g, &c, 0.05), Err(QhdError::Resolution(_))));
    }

    #[test]
    fn grid_potential_caches() {
        let oracle = Oracle::new(quad(1));
        let g = GridSpec::new(1, 2, vec![0.0], 1.0).unwrap();
        let f = oracle.grid_potential(&g, OracleMode::Exact).unwrap();
        // Storage order: j = 0, 1, -2, -1 → physical 0, 0.5, -1, -0.5.
        assert_eq!(f.as_slice(), &[0.0, 0.25, 1.0, 0.25]);
        let again = oracle.grid_potential(&g, OracleMode::Exact).unwrap();
        assert!(Arc::ptr_eq(&f, &again));
        let s = oracle.ledger.snapshot();
        assert_eq!((s.grid_sweeps, s.exact_evals), (1, 4));

        let noisy = oracle
            .grid_potential(&g, OracleMode::Binary { eps_f: 1e-6, seed: 9 })
            .unwrap();
        for (a, b) in noisy.iter().zip(f.iter()) {
            assert!((a - b).abs() < 2e-6);
        }
        assert_eq!(oracle.ledger.snapshot().grid_sweeps, 2);
    }
}
