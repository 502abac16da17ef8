//! Ideal-scaling schedules `(c_t, m_t, ω_t)` and the Schrödinger
//! coefficients `a(t) = c_t / (2 m_t)`, `b(t) = c_t m_t ω_t²` they induce.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, QhdError, Result};

type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Exponential,
    Polynomial,
    Custom,
}

#[derive(Clone)]
enum Form {
    Exp { c: f64 },
    Poly { k: f64, t0: f64 },
    Custom(Arc<CustomFns>),
}

struct CustomFns {
    c: TimeFn,
    m: TimeFn,
    omega: TimeFn,
    dm: Option<TimeFn>,
    domega: Option<TimeFn>,
}

/// A schedule on the time domain `[t_start, t_end]`.
#[derive(Clone)]
pub struct Schedule {
    form: Form,
    lambda: f64,
    theta: f64,
    t_start: f64,
    t_end: f64,
    m0: f64,
    omega0: f64,
}

impl fmt::Debug for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("Schedule");
        s.field("kind", &self.kind());
        match &self.form {
            Form::Exp { c } => {
                s.field("c", c);
            }
            Form::Poly { k, t0 } => {
                s.field("k", k).field("t0", t0);
            }
            Form::Custom(_) => {}
        }
        s.field("lambda", &self.lambda)
            .field("theta", &self.theta)
            .field("t_start", &self.t_start)
            .field("t_end", &self.t_end)
            .field("m0", &self.m0)
            .field("omega0", &self.omega0)
            .finish()
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Maximum residuals of the two ideal-scaling conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingReport {
    /// `max |ṁ - λ c m| / (λ c m)` over the sampled times.
    pub first_residual: f64,
    /// `max (ω̇ - (λ/2) c ω) / ((λ/2) c ω)`, clamped below at 0.
    pub second_excess: f64,
    /// `max |ω̇ - ϑ (λ/2) c ω| / ((λ/2) c ω)`: distance from the equality form.
    pub equality_residual: f64,
    pub passed: bool,
}

/// Builder for schedules given by arbitrary functions.
pub struct CustomScheduleBuilder {
    t_start: f64,
    t_end: f64,
    lambda: f64,
    theta: f64,
    fns: CustomFns,
}

impl CustomScheduleBuilder {
    pub fn theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    /// Analytic derivatives of `m` and `ω`; central differences otherwise.
    pub fn derivatives(
        mut self,
        dm: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domega: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.fns.dm = Some(Arc::new(dm));
        self.fns.domega = Some(Arc::new(domega));
        self
    }

    pub fn build(self) -> Result<Schedule> {
        positive("lambda", self.lambda)?;
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(invalid(format!("theta must be in (0, 1], got {}", self.theta)));
        }
        if !self.t_start.is_finite() || !(self.t_end > self.t_start) {
            return Err(invalid("need a finite t_start below t_end"));
        }
        let m0 = (self.fns.m)(self.t_start);
        let omega0 = (self.fns.omega)(self.t_start);
        positive("m(t_start)", m0)?;
        positive("omega(t_start)", omega0)?;
        positive("c(t_start)", (self.fns.c)(self.t_start))?;
        Ok(Schedule {
            form: Form::Custom(Arc::new(self.fns)),
            lambda: self.lambda,
            theta: self.theta,
            t_start: self.t_start,
            t_end: self.t_end,
            m0,
            omega0,
        })
    }
}

// Five-point Gauss–Legendre nodes and weights on [-1, 1].
const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

fn gauss5(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    h * GAUSS5.iter().map(|&(x, w)| w * f(mid + h * x)).sum::<f64>()
}

impl Schedule {
    /// `c_t = c`, `m_t = m0 e^{ct}`, `ω_t = ω0 e^{ct/2}` with `λ = 1`.
    pub fn exponential(c: f64, m0: f64, omega0: f64) -> Result<Self> {
        Self::exponential_scaled(c, m0, omega0, 1.0)
    }

    /// Exponential family with rate `λ`: `m_t = m0 e^{λct}`,
    /// `ω_t = ω0 e^{λct/2}`.
    pub fn exponential_scaled(c: f64, m0: f64, omega0: f64, lambda: f64) -> Result<Self> {
        positive("c", c)?;
        positive("m0", m0)?;
        positive("omega0", omega0)?;
        positive("lambda", lambda)?;
        Ok(Schedule {
            form: Form::Exp { c },
            lambda,
            theta: 1.0,
            t_start: 0.0,
            t_end: f64::INFINITY,
            m0,
            omega0,
        })
    }

    /// `c_t = k/t`, `m_t = m0 (t/t0)^k`, `ω_t = ω0 (t/t0)^{k/2}` with `λ = 1`.
    pub fn polynomial(k: f64, t0: f64, m0: f64, omega0: f64) -> Result<Self> {
        Self::polynomial_scaled(k, t0, m0, omega0, 1.0)
    }

    /// Polynomial family with rate `λ`: `m_t = m0 (t/t0)^{λk}`,
    /// `ω_t = ω0 (t/t0)^{λk/2}`.
    pub fn polynomial_scaled(k: f64, t0: f64, m0: f64, omega0: f64, lambda: f64) -> Result<Self> {
        positive("k", k)?;
        positive("t0", t0)?;
        positive("m0", m0)?;
        positive("omega0", omega0)?;
        positive("lambda", lambda)?;
        Ok(Schedule {
            form: Form::Poly { k, t0 },
            lambda,
            theta: 1.0,
            t_start: t0,
            t_end: f64::INFINITY,
            m0,
            omega0,
        })
    }

    /// Starts a schedule from arbitrary positive functions.
    pub fn custom(
        t_start: f64,
        lambda: f64,
        c: impl Fn(f64) -> f64 + Send + Sync + 'static,
        m: impl Fn(f64) -> f64 + Send + Sync + 'static,
        omega: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> CustomScheduleBuilder {
        CustomScheduleBuilder {
            t_start,
            t_end: f64::INFINITY,
            lambda,
            theta: 1.0,
            fns: CustomFns {
                c: Arc::new(c),
                m: Arc::new(m),
                omega: Arc::new(omega),
                dm: None,
                domega: None,
            },
        }
    }

    /// The schedule `s ↦ H(t0 + t1 - s)` on `[t0, t1]`, used to run an
    /// evolution backwards. It is not an ideal-scaling schedule.
    pub fn reversed(&self, t0: f64, t1: f64) -> Result<Schedule> {
        self.check(t0)?;
        self.check(t1)?;
        let (fa, fb, fc) = (self.clone(), self.clone(), self.clone());
        let flip = move |s: f64| t0 + t1 - s;
        Schedule::custom(
            t0,
            self.lambda,
            move |s| fa.c_unchecked(flip(s)),
            move |s| fb.m_unchecked(flip(s)),
            move |s| fc.omega_unchecked(flip(s)),
        )
        .end(t1)
        .build()
    }

    pub fn kind(&self) -> ScheduleKind {
        match self.form {
            Form::Exp { .. } => ScheduleKind::Exponential,
            Form::Poly { .. } => ScheduleKind::Polynomial,
            Form::Custom(_) => ScheduleKind::Custom,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub(crate) fn check(&self, t: f64) -> Result<()> {
        // A little slack absorbs rounding in accumulated step times.
        let slack = 1e-12 * (1.0 + self.t_start.abs().max(t.abs()));
        if !t.is_finite() || t < self.t_start - slack || t > self.t_end + slack {
            return Err(QhdError::Domain(format!(
                "time {t} outside the schedule domain [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        Ok(())
    }

    fn c_unchecked(&self, t: f64) -> f64 {
        match &self.form {
            Form::Exp { c } => *c,
            Form::Poly { k, .. } => k / t,
            Form::Custom(f) => (f.c)(t),
        }
    }

    fn m_unchecked(&self, t: f64) -> f64 {
        match &self.form {
            Form::Exp { c } => self.m0 * (self.lambda * c * t).exp(),
            Form::Poly { k, t0 } => self.m0 * (t / t0).powf(self.lambda * k),
            Form::Custom(f) => (f.m)(t),
        }
    }

    fn omega_unchecked(&self, t: f64) -> f64 {
        match &self.form {
            Form::Exp { c } => self.omega0 * (0.5 * self.lambda * c * t).exp(),
            Form::Poly { k, t0 } => self.omega0 * (t / t0).powf(0.5 * self.lambda * k),
            Form::Custom(f) => (f.omega)(t),
        }
    }

    fn central_diff(&self, f: impl Fn(f64) -> f64, t: f64) -> f64 {
        let h = 1e-5 * (1.0 + t.abs());
        let lo = (t - h).max(self.t_start);
        let hi = (t + h).min(self.t_end);
        (f(hi) - f(lo)) / (hi - lo)
    }

    pub fn c(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.c_unchecked(t))
    }

    pub fn m(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.m_unchecked(t))
    }

    pub fn omega(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.omega_unchecked(t))
    }

    /// `dm/dt`.
    pub fn dm(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(match &self.form {
            Form::Exp { .. } | Form::Poly { .. } => {
                self.lambda * self.c_unchecked(t) * self.m_unchecked(t)
            }
            Form::Custom(f) => match &f.dm {
                Some(dm) => dm(t),
                None => self.central_diff(|s| self.m_unchecked(s), t),
            },
        })
    }

    /// `dω/dt`.
    pub fn domega(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(match &self.form {
            Form::Exp { .. } | Form::Poly { .. } => {
                0.5 * self.lambda * self.c_unchecked(t) * self.omega_unchecked(t)
            }
            Form::Custom(f) => match &f.domega {
                Some(dw) => dw(t),
                None => self.central_diff(|s| self.omega_unchecked(s), t),
            },
        })
    }

    /// `(a, b) = (c/(2m), c m ω²)` at time `t`.
    pub fn ab_coeffs(&self, t: f64) -> Result<(f64, f64)> {
        self.check(t)?;
        let (c, m, w) = (
            self.c_unchecked(t),
            self.m_unchecked(t),
            self.omega_unchecked(t),
        );
        Ok((c / (2.0 * m), c * m * w * w))
    }

    fn a_unchecked(&self, t: f64) -> f64 {
        self.c_unchecked(t) / (2.0 * self.m_unchecked(t))
    }

    fn b_unchecked(&self, t: f64) -> f64 {
        let w = self.omega_unchecked(t);
        self.c_unchecked(t) * self.m_unchecked(t) * w * w
    }

    /// `∫_{t1}^{t2} a(t) dt`: closed form for the named families, 5-point
    /// Gauss otherwise.
    pub fn a_integral(&self, t1: f64, t2: f64) -> Result<f64> {
        self.check(t1)?;
        self.check(t2)?;
        let l = self.lambda;
        Ok(match &self.form {
            Form::Exp { c } => {
                -(-l * c * t1).exp() * (-l * c * (t2 - t1)).exp_m1() / (2.0 * self.m0 * l)
            }
            Form::Poly { k, t0 } => {
                let p = l * k;
                -(t0 / t1).powf(p) * (-p * ((t2 - t1) / t1).ln_1p()).exp_m1() / (2.0 * self.m0 * l)
            }
            Form::Custom(_) => gauss5(|t| self.a_unchecked(t), t1, t2),
        })
    }

    /// `∫_{t1}^{t2} b(t) dt`, same strategy as [`Schedule::a_integral`].
    pub fn b_integral(&self, t1: f64, t2: f64) -> Result<f64> {
        self.check(t1)?;
        self.check(t2)?;
        let l = self.lambda;
        let scale = self.m0 * self.omega0 * self.omega0 / (2.0 * l);
        Ok(match &self.form {
            Form::Exp { c } => scale * (2.0 * l * c * t1).exp() * (2.0 * l * c * (t2 - t1)).exp_m1(),
            Form::Poly { k, t0 } => {
                let p = 2.0 * l * k;
                scale * (t1 / t0).powf(p) * (p * ((t2 - t1) / t1).ln_1p()).exp_m1()
            }
            Form::Custom(_) => gauss5(|t| self.b_unchecked(t), t1, t2),
        })
    }

    /// `‖b‖_{L1[t_start, T]} = m0 ω0² / ((1+ϑ)λ) · [(ω_T/ω0)^{2(1+ϑ)/ϑ} - 1]`.
    ///
    /// Valid when `ṁ = λcm` and `ω̇ = ϑ(λ/2)cω` hold with equality; custom
    /// schedules are checked numerically and rejected otherwise.
    pub fn b_l1_closed_form(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        if let Form::Custom(_) = self.form {
            let rep = self.validate_ideal_scaling(64);
            if rep.first_residual > 1e-6 || rep.equality_residual > 1e-6 {
                return Err(QhdError::UnsupportedSchedule(format!(
                    "closed form needs the equality structure (residuals {:.2e}, {:.2e}); use quadrature",
                    rep.first_residual, rep.equality_residual
                )));
            }
        }
        let th = self.theta;
        let ratio = self.omega_unchecked(t) / self.omega0;
        let expo = 2.0 * (1.0 + th) / th;
        Ok(self.m0 * self.omega0 * self.omega0 / ((1.0 + th) * self.lambda)
            * (expo * ratio.ln()).exp_m1())
    }

    /// Adaptive quadrature of `∫_{t_start}^{T} b(t) dt` to about 1e-10
    /// relative accuracy.
    pub fn b_l1_quadrature(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        if t <= self.t_start {
            return Ok(0.0);
        }
        let pieces = 32;
        let h = (t - self.t_start) / pieces as f64;
        let f = |s: f64| self.b_unchecked(s);
        let mut total = 0.0;
        let mut err = 0.0;
        for i in 0..pieces {
            let a = self.t_start + i as f64 * h;
            let b = if i + 1 == pieces { t } else { a + h };
            // Scale the absolute target to the piece's magnitude.
            let rough = gauss5(f, a, b).abs();
            let out = quadrature::integrate(f, a, b, 1e-13 * rough.max(f64::MIN_POSITIVE));
            total += out.integral;
            err += out.error_estimate;
        }
        if !total.is_finite() || err > 1e-9 * total.abs().max(f64::MIN_POSITIVE) {
            return Err(QhdError::Numeric(format!(
                "quadrature did not converge (estimate {total:e}, error {err:e})"
            )));
        }
        Ok(total)
    }

    fn sample_times(&self, samples: usize) -> Vec<f64> {
        let span = if self.t_end.is_finite() {
            self.t_end - self.t_start
        } else {
            10.0
        };
        let n = samples.max(2);
        (0..n)
            .map(|i| {
                let e = -3.0 + 3.0 * i as f64 / (n - 1) as f64;
                self.t_start + span * 10f64.powf(e)
            })
            .collect()
    }

    /// Checks `ṁ = λcm` and `ω̇ ≤ (λ/2)cω` at log-spaced times.
    pub fn validate_ideal_scaling(&self, samples: usize) -> ScalingReport {
        let mut first: f64 = 0.0;
        let mut second: f64 = 0.0;
        let mut equality: f64 = 0.0;
        for t in self.sample_times(samples) {
            let (Ok(c), Ok(m), Ok(w), Ok(dm), Ok(dw)) = (
                self.c(t),
                self.m(t),
                self.omega(t),
                self.dm(t),
                self.domega(t),
            ) else {
                continue;
            };
            let target_m = self.lambda * c * m;
            let target_w = 0.5 * self.lambda * c * w;
            first = first.max((dm - target_m).abs() / target_m.abs().max(f64::MIN_POSITIVE));
            second = second.max((dw - target_w) / target_w.abs().max(f64::MIN_POSITIVE));
            equality = equality
                .max((dw - self.theta * target_w).abs() / target_w.abs().max(f64::MIN_POSITIVE));
        }
        let second = second.max(0.0);
        ScalingReport {
            first_residual: first,
            second_excess: second,
            equality_residual: equality,
            passed: first <= 1e-6 && second <= 1e-6,
        }
    }

    /// Smallest `T ≥ t_start` with `E0 ω_T^{-2} ≤ eps/24`.
    pub fn stopping_time(&self, eps: f64, e0: f64) -> Result<f64> {
        positive("eps", eps)?;
        positive("E0", e0)?;
        let target = 24.0 * e0 / eps; // needed value of ω_T²
        let x = target / (self.omega0 * self.omega0);
        if x <= 1.0 {
            return Ok(self.t_start);
        }
        match &self.form {
            Form::Exp { c } => Ok(x.ln() / (self.lambda * c)),
            Form::Poly { k, t0 } => Ok(t0 * x.powf(1.0 / (self.lambda * k))),
            Form::Custom(_) => {
                let reached = |t: f64| {
                    let w = self.omega_unchecked(t);
                    w * w >= target
                };
                let mut lo = self.t_start;
                let mut step = 1.0;
                let mut hi = lo + step;
                loop {
                    if hi > self.t_end {
                        hi = self.t_end;
                        if !reached(hi) {
                            return Err(QhdError::Unreachable(format!(
                                "omega^2 stays below {target:e} on the schedule domain"
                            )));
                        }
                        break;
                    }
                    if reached(hi) {
                        break;
                    }
                    lo = hi;
                    step *= 2.0;
                    hi = lo + step;
                    if step > 1e12 {
                        return Err(QhdError::Unreachable(format!(
                            "omega^2 does not reach {target:e}"
                        )));
                    }
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if reached(mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Ok(hi)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn constructor_examples() {
        let s = Schedule::exponential(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(s.m(LN_2).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(s.omega(LN_2).unwrap(), 2f64.sqrt(), max_relative = 1e-15);
        assert_eq!((s.m(0.0).unwrap(), s.omega(0.0).unwrap()), (1.0, 1.0));
        assert!(Schedule::exponential(0.0, 1.0, 1.0).is_err());

        let p = Schedule::polynomial(2.0, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(p.m(4.0).unwrap(), 16.0);
        assert_relative_eq!(p.omega(4.0).unwrap(), 4.0);
        assert!(p.m(0.5).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let s = Schedule::exponential(1.0, 1.0, 1.0).unwrap();
        assert_eq!(s.ab_coeffs(0.0).unwrap(), (0.5, 1.0));
        let (a, b) = s.ab_coeffs(LN_2).unwrap();
        assert_relative_eq!(a, 0.25, max_relative = 1e-15);
        assert_relative_eq!(b, 4.0, max_relative = 1e-15);
        let p = Schedule::polynomial(2.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.ab_coeffs(1.0).unwrap(), (1.0, 2.0));
    }

    #[test]
    fn b_l1_examples() {
        let s = Schedule::exponential(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(s.b_l1_closed_form(LN_2).unwrap(), 1.5, max_relative = 1e-12);
        assert_relative_eq!(s.b_l1_quadrature(LN_2).unwrap(), 1.5, max_relative = 1e-10);
        assert_eq!(s.b_l1_closed_form(0.0).unwrap(), 0.0);
        // ω_T/ω0 = 2 at T = 2 ln 2.
        assert_relative_eq!(s.b_l1_closed_form(2.0 * LN_2).unwrap(), 7.5, max_relative = 1e-12);

        let flat = Schedule::custom(0.5, 1.0, |_| 2.0, |_| 1.5, |_| 1.0).build().unwrap();
        assert_relative_eq!(flat.b_l1_quadrature(2.5).unwrap(), 2.0 * 3.0, max_relative = 1e-12);
        assert!(matches!(
            flat.b_l1_closed_form(2.5),
            Err(QhdError::UnsupportedSchedule(_))
        ));
    }

    #[test]
    fn scaling_validation_examples() {
        let s = Schedule::exponential(1.3, 0.7, 2.0).unwrap();
        let r = s.validate_ideal_scaling(100);
        assert!(r.passed && r.first_residual < 1e-9 && r.equality_residual < 1e-9);

        let fast = Schedule::custom(0.0, 1.0, |_| 1.0, |t: f64| t.exp(), |t: f64| t.exp())
            .build()
            .unwrap();
        let r = fast.validate_ideal_scaling(50);
        assert!(!r.passed && r.second_excess > 0.5);

        let frozen = Schedule::custom(0.0, 1.0, |_| 1.0, |_| 1.0, |_| 1.0).build().unwrap();
        let r = frozen.validate_ideal_scaling(50);
        assert!(!r.passed && r.first_residual > 0.5);
    }

    #[test]
    fn stopping_time_examples() {
        let s = Schedule::exponential(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(s.stopping_time(0.24, 1.0).unwrap(), 100f64.ln(), max_relative = 1e-14);
        let t2 = s.stopping_time(0.24, 2.0).unwrap();
        assert_relative_eq!(t2 - 100f64.ln(), LN_2, max_relative = 1e-12);
        let p = Schedule::polynomial(2.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.stopping_time(24.0, 1.0).unwrap(), 1.0);

        let bounded = Schedule::custom(0.0, 1.0, |_| 1.0, |t: f64| t.exp(), |t: f64| 2.0 - (-t).exp())
            .build()
            .unwrap();
        assert!(matches!(bounded.stopping_time(0.24, 1.0), Err(QhdError::Unreachable(_))));
        let custom = Schedule::custom(0.0, 1.0, |_| 1.0, |t: f64| t.exp(), |t: f64| (0.5 * t).exp())
            .build()
            .unwrap();
        assert_relative_eq!(custom.stopping_time(0.24, 1.0).unwrap(), 100f64.ln(), max_relative = 1e-10);
    }

    #[test]
    fn step_integrals_match_gauss() {
        let s = Schedule::polynomial_scaled(3.0, 0.5, 0.8, 1.7, 1.4).unwrap();
        let a = s.a_integral(0.9, 1.0).unwrap();
        let b = s.b_integral(0.9, 1.0).unwrap();
        assert_relative_eq!(a, gauss5(|t| s.a_unchecked(t), 0.9, 1.0), max_relative = 1e-9);
        assert_relative_eq!(b, gauss5(|t| s.b_unchecked(t), 0.9, 1.0), max_relative = 1e-9);
    }

    #[test]
    fn reversed_schedule_mirrors_coefficients() {
        let s = Schedule::exponential(1.0, 1.0, 1.0).unwrap();
        let r = s.reversed(0.5, 2.0).unwrap();
        let (a, b) = s.ab_coeffs(0.75).unwrap();
        let (ra, rb) = r.ab_coeffs(1.75).unwrap();
        assert_relative_eq!(a, ra, max_relative = 1e-14);
        assert_relative_eq!(b, rb, max_relative = 1e-14);
        assert!(r.ab_coeffs(2.5).is_err());
    }
}
