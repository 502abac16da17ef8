use approx::assert_relative_eq;
use qhd::diagnostics::expected_f;
use qhd::optimizer::initial_gaussian;
use qhd::potential::{Oracle, OracleMode, PotentialParams, PotentialSpec};
use qhd::propagator::{evolve, strang_step, EvolveConfig, NoRecord};
use qhd::schedule::Schedule;
use qhd::{Complex64, GridSpec, QhdError, Representation, WaveState};

fn distance(a: &WaveState, b: &WaveState) -> f64 {
    let (a, b) = (a.to_position(), b.to_position());
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn oscillator_field(grid: &GridSpec) -> Vec<f64> {
    let params = PotentialParams {
        scale: 0.5,
        ..PotentialParams::default()
    };
    let spec = PotentialSpec::named("quadratic", grid.dim(), &params, grid.center().to_vec(), grid.radius())
        .unwrap();
    Oracle::new(spec)
        .grid_potential(grid, OracleMode::Exact)
        .unwrap()
        .to_vec()
}

#[test]
fn free_plane_wave_picks_up_the_kinetic_phase() {
    let r = 2.0;
    let grid = GridSpec::new(2, 8, vec![0.5, -0.5], r).unwrap();
    let mode = [3i64, -2];
    let start = WaveState::plane_wave(grid.clone(), &mode).unwrap();
    let schedule = Schedule::exponential(1.0, 1.0, 1.0).unwrap();
    let field = vec![0.0; grid.len()];
    let cfg = EvolveConfig {
        tol_step: 1e-10,
        ..EvolveConfig::default()
    };
    let ev = evolve(&start, &schedule, 0.0, 1.5, &cfg, &field, &mut NoRecord).unwrap();
    let k2: f64 = mode.iter().map(|&n| (2.0 * std::f64::consts::PI * n as f64).powi(2)).sum();
    let theta = k2 * schedule.a_integral(0.0, 1.5).unwrap() / (2.0 * r).powi(2);
    let phase = Complex64::from_polar(1.0, -theta);
    let expected = start.to_position();
    let amps = expected.amplitudes().iter().map(|a| a * phase).collect();
    let expected = WaveState::from_amplitudes(grid, amps, Representation::Position).unwrap();
    assert!(distance(&ev.state, &expected) < 1e-12);
}

#[test]
fn constant_potential_is_a_global_phase() {
    let grid = GridSpec::new(1, 16, vec![0.0], 1.0).unwrap();
    let (start, _) = initial_gaussian(&grid, &[0.0], 0.1).unwrap();
    let schedule = Schedule::polynomial(2.0, 1.0, 1.0, 1.0).unwrap();
    let zero = vec![0.0; grid.len()];
    let three = vec![3.0; grid.len()];
    let cfg = EvolveConfig::default();
    let a = evolve(&start, &schedule, 1.0, 2.0, &cfg, &zero, &mut NoRecord).unwrap();
    let b = evolve(&start, &schedule, 1.0, 2.0, &cfg, &three, &mut NoRecord).unwrap();
    let phase = Complex64::from_polar(1.0, -3.0 * schedule.b_integral(1.0, 2.0).unwrap());
    let amps = a.state.to_position().amplitudes().iter().map(|x| x * phase).collect();
    let shifted = WaveState::from_amplitudes(grid, amps, Representation::Position).unwrap();
    assert!(distance(&shifted, &b.state) < 1e-9);
}

#[test]
fn strang_step_error_is_third_order() {
    let grid = GridSpec::new(1, 64, vec![0.0], 4.0).unwrap();
    let field = oscillator_field(&grid);
    let (start, _) = initial_gaussian(&grid, &[0.5], 0.5).unwrap();
    let schedule = Schedule::exponential(1.0, 1.0, 1.0).unwrap();
    let fine = |dt: f64| {
        let cfg = EvolveConfig {
            dt_initial: dt / 64.0,
            adaptive: false,
            record_every: 0,
            ..EvolveConfig::default()
        };
        evolve(&start, &schedule, 0.0, dt, &cfg, &field, &mut NoRecord).unwrap().state
    };
    let local = |dt: f64| distance(&strang_step(&start, 0.0, dt, &schedule, &field).unwrap(), &fine(dt));
    let ratio = local(0.02) / local(0.01);
    assert!((6.5..=9.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn adaptive_run_converges_as_tolerance_shrinks() {
    let grid = GridSpec::new(1, 64, vec![0.0], 4.0).unwrap();
    let field = oscillator_field(&grid);
    let (start, _) = initial_gaussian(&grid, &[0.5], 0.5).unwrap();
    let schedule = Schedule::exponential(1.0, 1.0, 1.0).unwrap();
    let run = |tol: f64| {
        let cfg = EvolveConfig {
            tol_step: tol,
            record_every: 0,
            ..EvolveConfig::default()
        };
        evolve(&start, &schedule, 0.0, 1.0, &cfg, &field, &mut NoRecord).unwrap().state
    };
    let reference = run(1e-9);
    let coarse = distance(&run(1e-5), &reference);
    let fine = distance(&run(1e-7), &reference);
    assert!(coarse < 1e-4, "coarse {coarse}");
    assert!(fine < coarse / 10.0, "fine {fine} coarse {coarse}");
}

#[test]
fn time_reversal_returns_to_the_start() {
    let grid = GridSpec::new(2, 16, vec![0.0, 0.0], 3.0).unwrap();
    let field = oscillator_field(&grid);
    let (start, _) = initial_gaussian(&grid, &[0.4, -0.2], 0.5).unwrap();
    let schedule = Schedule::polynomial(2.0, 1.0, 1.0, 1.0).unwrap();
    let conj = |s: &WaveState| {
        let p = s.to_position();
        let amps = p.amplitudes().iter().map(|a| a.conj()).collect();
        WaveState::from_amplitudes(p.grid().clone(), amps, Representation::Position).unwrap()
    };
    let tol = 1e-8;
    let cfg = EvolveConfig {
        tol_step: tol,
        ..EvolveConfig::default()
    };
    let forward = evolve(&start, &schedule, 1.0, 2.0, &cfg, &field, &mut NoRecord).unwrap();
    let reversed = schedule.reversed(1.0, 2.0).unwrap();
    let back = evolve(&conj(&forward.state), &reversed, 1.0, 2.0, &cfg, &field, &mut NoRecord).unwrap();
    assert!(distance(&conj(&back.state), &start) < 10.0 * tol);
}

#[test]
fn oscillator_expectation_decreases() {
    let grid = GridSpec::new(1, 128, vec![0.0], 4.0).unwrap();
    let field = oscillator_field(&grid);
    let (start, _) = initial_gaussian(&grid, &[1.0], 0.5).unwrap();
    let schedule = Schedule::exponential(1.0, 1.0, 1.0).unwrap();
    let mut values = Vec::new();
    let mut rec = |t: f64, s: &WaveState| {
        values.push((t, expected_f(s, &field, 0.0)?));
        Ok(())
    };
    let cfg = EvolveConfig {
        record_every: 20,
        ..EvolveConfig::default()
    };
    let ev = evolve(&start, &schedule, 0.0, 3.0, &cfg, &field, &mut rec).unwrap();
    assert!(ev.norm_drift < 1e-10);
    let first = values.first().unwrap().1;
    let last = values.last().unwrap().1;
    assert_relative_eq!(values.last().unwrap().0, 3.0);
    assert!(last < first / 20.0, "first {first} last {last}");
}

#[test]
fn step_budget_error_carries_the_partial_state() {
    let grid = GridSpec::new(1, 16, vec![0.0], 2.0).unwrap();
    let field = oscillator_field(&grid);
    let (start, _) = initial_gaussian(&grid, &[0.0], 0.3).unwrap();
    let schedule = Schedule::exponential(1.0, 1.0, 1.0).unwrap();
    let cfg = EvolveConfig {
        max_steps: 10,
        adaptive: false,
        dt_initial: 0.01,
        ..EvolveConfig::default()
    };
    match evolve(&start, &schedule, 0.0, 1.0, &cfg, &field, &mut NoRecord) {
        Err(QhdError::StepBudget { partial, .. }) => {
            assert!(partial.t > 0.0 && partial.t < 1.0);
            assert_relative_eq!(partial.state.norm(), 1.0, epsilon = 1e-12);
        }
        other => panic!("expected a step-budget error, got {other:?}"),
    }
}

#[test]
fn mismatched_field_is_rejected() {
    let grid = GridSpec::new(1, 8, vec![0.0], 1.0).unwrap();
    let (start, _) = initial_gaussian(&grid, &[0.0], 0.1).unwrap();
    let schedule = Schedule::exponential(1.0, 1.0, 1.0).unwrap();
    let err = evolve(&start, &schedule, 0.0, 1.0, &EvolveConfig::default(), &[0.0; 3], &mut NoRecord);
    assert!(matches!(err, Err(QhdError::GridMismatch(_))));
}
