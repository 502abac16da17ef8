//! C ABI for the `qhd` simulator.
//!
//! Objects cross the boundary as opaque handles created by `qhd_*_new`
//! functions and released with the matching `qhd_*_free`. Every fallible
//! call returns a [`QhdStatus`]; on failure a message is available from
//! [`qhd_last_error`] until the next failing call on the same thread.
//! Panics are caught and reported as [`QhdStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qhd::diagnostics::expected_f;
use qhd::optimizer::{initial_gaussian, optimize, OptimizeConfig};
use qhd::potential::{PotentialParams, PotentialSpec};
use qhd::propagator::{evolve, EvolveConfig, NoRecord};
use qhd::resources;
use qhd::schedule::Schedule;
use qhd::{GridSpec, QhdError, WaveState};

/// Status codes. Values 1 to 16 mirror the library error kinds.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QhdStatus {
    Ok = 0,
    InvalidParameter = 1,
    InvalidInput = 2,
    Representation = 3,
    GridMismatch = 4,
    Domain = 5,
    Resolution = 6,
    Geometry = 7,
    Numeric = 8,
    UnsupportedSchedule = 9,
    Unreachable = 10,
    Hypothesis = 11,
    UnknownName = 12,
    StepBudget = 13,
    Instability = 14,
    Config = 15,
    Io = 16,
    NullPointer = 100,
    InvalidUtf8 = 101,
    Panic = 102,
}

impl From<&QhdError> for QhdStatus {
    fn from(e: &QhdError) -> Self {
        match e.code() {
            1 => QhdStatus::InvalidParameter,
            2 => QhdStatus::InvalidInput,
            3 => QhdStatus::Representation,
            4 => QhdStatus::GridMismatch,
            5 => QhdStatus::Domain,
            6 => QhdStatus::Resolution,
            7 => QhdStatus::Geometry,
            8 => QhdStatus::Numeric,
            9 => QhdStatus::UnsupportedSchedule,
            10 => QhdStatus::Unreachable,
            11 => QhdStatus::Hypothesis,
            12 => QhdStatus::UnknownName,
            13 => QhdStatus::StepBudget,
            14 => QhdStatus::Instability,
            15 => QhdStatus::Config,
            _ => QhdStatus::Io,
        }
    }
}

/// Opaque objective function.
pub struct QhdPotential {
    spec: PotentialSpec,
}

/// Opaque schedule.
pub struct QhdSchedule {
    schedule: Schedule,
}

/// Opaque wavefunction on a grid.
pub struct QhdState {
    state: WaveState,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Lib(QhdError),
    Status(QhdStatus, String),
}

impl From<QhdError> for Failure {
    fn from(e: QhdError) -> Self {
        Failure::Lib(e)
    }
}

fn null() -> Failure {
    Failure::Status(QhdStatus::NullPointer, "null pointer argument".into())
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QhdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QhdStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            QhdStatus::from(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            QhdStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or valid for reads of `len` values.
unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Status(QhdStatus::InvalidUtf8, "string is not UTF-8".into()))
}

/// # Safety
/// `out` must be null or valid for one write.
unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

/// # Safety
/// `p` must be null or a live handle of type `T`.
unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(null)
}

/// Message of the last failing call on this thread. The pointer stays valid
/// until the next failing call; an empty string means no error yet.
#[no_mangle]
pub extern "C" fn qhd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qhd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a registry potential (`quadratic`, `abs_l1`, `max_abs`, `huber`,
/// `rosenbrock_convexified`) with default parameters, its constants computed
/// on the box of half-width `radius` around `center[0..d]`.
///
/// # Safety
/// `name` must be a NUL-terminated string, `center` must hold `d` values and
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qhd_potential_new(
    name: *const c_char,
    d: usize,
    center: *const f64,
    radius: f64,
    out: *mut *mut QhdPotential,
) -> QhdStatus {
    guard(|| {
        let name = text(name)?;
        let center = slice(center, d)?.to_vec();
        let spec = PotentialSpec::named(name, d, &PotentialParams::default(), center, radius)?;
        write(out, Box::into_raw(Box::new(QhdPotential { spec })))
    })
}

/// Evaluates the potential at `x[0..d]`.
///
/// # Safety
/// `pot` must be a live handle, `x` must hold `d` values and `out` must be
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qhd_potential_eval(
    pot: *const QhdPotential,
    x: *const f64,
    out: *mut f64,
) -> QhdStatus {
    guard(|| {
        let pot = handle(pot)?;
        let x = slice(x, pot.spec.dim())?;
        write(out, pot.spec.value(x))
    })
}

/// Declared Lipschitz constant of the potential.
///
/// # Safety
/// `pot` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qhd_potential_lipschitz(
    pot: *const QhdPotential,
    out: *mut f64,
) -> QhdStatus {
    guard(|| write(out, handle(pot)?.spec.lipschitz))
}

/// # Safety
/// `pot` must be null or a handle from [`qhd_potential_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qhd_potential_free(pot: *mut QhdPotential) {
    if !pot.is_null() {
        drop(Box::from_raw(pot));
    }
}

/// Exponential schedule `c_t = c`, `m_t = m0 e^{λct}`, `ω_t = ω0 e^{λct/2}`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qhd_schedule_exponential(
    c: f64,
    m0: f64,
    omega0: f64,
    lambda: f64,
    out: *mut *mut QhdSchedule,
) -> QhdStatus {
    guard(|| {
        let schedule = Schedule::exponential_scaled(c, m0, omega0, lambda)?;
        write(out, Box::into_raw(Box::new(QhdSchedule { schedule })))
    })
}

/// Polynomial schedule of degree `k` starting at `t0`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qhd_schedule_polynomial(
    k: f64,
    t0: f64,
    m0: f64,
    omega0: f64,
    lambda: f64,
    out: *mut *mut QhdSchedule,
) -> QhdStatus {
    guard(|| {
        let schedule = Schedule::polynomial_scaled(k, t0, m0, omega0, lambda)?;
        write(out, Box::into_raw(Box::new(QhdSchedule { schedule })))
    })
}

/// `‖b‖_{L1[0,t]}` of the potential coefficient.
///
/// # Safety
/// `s` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qhd_schedule_b_l1(
    s: *const QhdSchedule,
    t: f64,
    out: *mut f64,
) -> QhdStatus {
    guard(|| write(out, handle(s)?.schedule.b_l1_closed_form(t)?))
}

/// # Safety
/// `s` must be null or a schedule handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qhd_schedule_free(s: *mut QhdSchedule) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Normalized Gaussian of width `sigma` at `x0[0..d]` on the grid with
/// `(2n)^d` points covering the box of half-width `radius` around
/// `center[0..d]`.
///
/// # Safety
/// `center` and `x0` must hold `d` values and `out` must be valid for one
/// write.
#[no_mangle]
pub unsafe extern "C" fn qhd_state_gaussian(
    d: usize,
    n: usize,
    center: *const f64,
    radius: f64,
    x0: *const f64,
    sigma: f64,
    out: *mut *mut QhdState,
) -> QhdStatus {
    guard(|| {
        let grid = GridSpec::new(d, n, slice(center, d)?.to_vec(), radius)?;
        let (state, _) = initial_gaussian(&grid, slice(x0, d)?, sigma)?;
        write(out, Box::into_raw(Box::new(QhdState { state })))
    })
}

/// Number of grid points `(2n)^d`.
///
/// # Safety
/// `s` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qhd_state_len(s: *const QhdState, out: *mut usize) -> QhdStatus {
    guard(|| write(out, handle(s)?.state.grid().len()))
}

/// Discrete `ℓ²` norm of the amplitudes.
///
/// # Safety
/// `s` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qhd_state_norm(s: *const QhdState, out: *mut f64) -> QhdStatus {
    guard(|| write(out, handle(s)?.state.norm()))
}

/// Copies the position amplitudes into `re` and `im`, which must hold `len`
/// values with `len` equal to the state length. Storage is row-major with the
/// last axis fastest; along an axis, slot `k` holds grid index `k` for
/// `k < n` and `k - 2n` otherwise.
///
/// # Safety
/// `s` must be a live handle; `re` and `im` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn qhd_state_amplitudes(
    s: *const QhdState,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> QhdStatus {
    guard(|| {
        let pos = handle(s)?.state.to_position();
        let amps = pos.amplitudes();
        if len != amps.len() {
            return Err(Failure::Status(
                QhdStatus::InvalidInput,
                format!("buffer holds {len} values, state has {}", amps.len()),
            ));
        }
        if re.is_null() || im.is_null() {
            return Err(null());
        }
        for (k, a) in amps.iter().enumerate() {
            re.add(k).write(a.re);
            im.add(k).write(a.im);
        }
        Ok(())
    })
}

/// Expected value of the potential in the state.
///
/// # Safety
/// `s` and `pot` must be live handles and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qhd_state_expected_f(
    s: *const QhdState,
    pot: *const QhdPotential,
    out: *mut f64,
) -> QhdStatus {
    guard(|| {
        let state = &handle(s)?.state;
        let spec = &handle(pot)?.spec;
        let field: Vec<f64> = state
            .grid()
            .physical_points()
            .iter()
            .map(|x| spec.value(x))
            .collect();
        write(out, expected_f(state, &field, 0.0)?)
    })
}

/// Evolves the state in place from `t0` to `t1` with adaptive steps at
/// local tolerance `tol`. Writes the norm drift to `norm_drift` if non-null.
///
/// # Safety
/// `s` must be a live handle with no other references in use; `sched` and
/// `pot` must be live handles; `norm_drift` must be null or valid for one
/// write.
#[no_mangle]
pub unsafe extern "C" fn qhd_state_evolve(
    s: *mut QhdState,
    sched: *const QhdSchedule,
    pot: *const QhdPotential,
    t0: f64,
    t1: f64,
    tol: f64,
    norm_drift: *mut f64,
) -> QhdStatus {
    guard(|| {
        let st = s.as_mut().ok_or_else(null)?;
        let schedule = &handle(sched)?.schedule;
        let spec = &handle(pot)?.spec;
        let field: Vec<f64> = st
            .state
            .grid()
            .physical_points()
            .iter()
            .map(|x| spec.value(x))
            .collect();
        let cfg = EvolveConfig {
            tol_step: tol,
            ..EvolveConfig::default()
        };
        let ev = evolve(&st.state, schedule, t0, t1, &cfg, &field, &mut NoRecord)?;
        if !norm_drift.is_null() {
            norm_drift.write(ev.norm_drift);
        }
        st.state = ev.state;
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a state handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qhd_state_free(s: *mut QhdState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Runs the optimizer with an exact oracle and writes the best candidate to
/// `candidate[0..d]` and its value to `f_candidate`. `grid_n = 0` selects
/// the grid size automatically; `tol_step` is the local error tolerance per
/// unit time of the adaptive integrator.
///
/// # Safety
/// `pot` must be a live handle, `x0` must hold `d` values, `candidate` must
/// be valid for `d` writes and `f_candidate` for one write.
#[no_mangle]
pub unsafe extern "C" fn qhd_optimize(
    pot: *const QhdPotential,
    x0: *const f64,
    r: f64,
    eps: f64,
    repeats: usize,
    grid_n: usize,
    tol_step: f64,
    seed: u64,
    candidate: *mut f64,
    f_candidate: *mut f64,
) -> QhdStatus {
    guard(|| {
        let spec = &handle(pot)?.spec;
        let d = spec.dim();
        let x0 = slice(x0, d)?;
        if candidate.is_null() {
            return Err(null());
        }
        let cfg = OptimizeConfig {
            grid_n: (grid_n > 0).then_some(grid_n),
            evolve: EvolveConfig {
                tol_step,
                ..EvolveConfig::default()
            },
            ..OptimizeConfig::default()
        };
        let report = optimize(spec, x0, r, eps, repeats, &cfg, seed)?;
        ptr::copy_nonoverlapping(report.candidate.as_ptr(), candidate, d);
        write(f_candidate, report.f_candidate)
    })
}

/// Admissible oracle error for simulation accuracy `eps`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qhd_eps_f_budget(
    eps: f64,
    lambda: f64,
    b_l1: f64,
    out: *mut f64,
) -> QhdStatus {
    guard(|| write(out, resources::eps_f_budget(eps, lambda, b_l1)?))
}

/// Binary-oracle query count of the simulation.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qhd_queries_binary(
    lambda: f64,
    b_l1: f64,
    eps: f64,
    out: *mut f64,
) -> QhdStatus {
    guard(|| write(out, resources::queries_binary(lambda, b_l1, eps)?))
}

/// Logical qubit count of the simulation.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qhd_qubit_count(
    d: usize,
    n: usize,
    a_l1: f64,
    lambda: f64,
    b_l1: f64,
    eps: f64,
    out: *mut f64,
) -> QhdStatus {
    guard(|| write(out, resources::qubit_count(d, n, a_l1, lambda, b_l1, eps)?))
}

/// Query count of a classical baseline (`belloni`, `risteski_li`,
/// `li_zhang`, `subgradient`).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qhd_baseline_queries(
    name: *const c_char,
    d: usize,
    g: f64,
    r: f64,
    eps: f64,
    out: *mut f64,
) -> QhdStatus {
    guard(|| {
        let q = resources::baseline_queries(text(name)?, d, g, r, eps)?;
        write(out, q.queries)
    })
}
