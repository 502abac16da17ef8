use proptest::prelude::*;
use qhd::grid::{dft_forward, dft_inverse, discrete_inner, interpolant_eval, project_pm};
use qhd::potential::{mollify, PotentialParams, PotentialSpec};
use qhd::propagator::{evolve, EvolveConfig, NoRecord};
use qhd::schedule::Schedule;
use qhd::{Complex64, GridSpec, Representation, WaveState};

fn random_state(d: usize, n: usize, values: &[(f64, f64)]) -> WaveState {
    let grid = GridSpec::new(d, n, vec![0.0; d], 1.0).unwrap();
    let amps = (0..grid.len())
        .map(|k| {
            let (a, b) = values[k % values.len()];
            Complex64::new(a + 0.01 * k as f64, b)
        })
        .collect();
    let mut s = WaveState::from_amplitudes(grid, amps, Representation::Position).unwrap();
    s.normalize().unwrap();
    s
}

fn shape() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=2, prop::sample::select(vec![2usize, 4, 8]))
}

fn pairs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..32)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dft_round_trip_is_identity((d, n) in shape(), v in pairs()) {
        let s = random_state(d, n, &v);
        let back = dft_inverse(&dft_forward(&s).unwrap()).unwrap();
        for (a, b) in s.amplitudes().iter().zip(back.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn dft_preserves_inner_products((d, n) in shape(), v in pairs(), w in pairs()) {
        let (a, b) = (random_state(d, n, &v), random_state(d, n, &w));
        let before = discrete_inner(&a, &b).unwrap();
        let after = discrete_inner(&a.to_fourier(), &b.to_fourier()).unwrap();
        prop_assert!((before - after).norm() < 1e-12);
    }

    #[test]
    fn interpolant_reproduces_samples((d, n) in shape(), v in pairs()) {
        let s = random_state(d, n, &v);
        let samples = s.samples().unwrap();
        for k in 0..s.grid().len() {
            let x = s.grid().point(k);
            prop_assert!((interpolant_eval(&s, &x).unwrap() - samples[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn projection_splits_the_norm((d, n) in shape(), v in pairs()) {
        let s = random_state(d, n, &v);
        let m = (n / 2).max(1);
        let (kept, tail) = project_pm(&s, m).unwrap();
        let total = kept.norm().powi(2) + tail * tail;
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolution_is_unitary(v in pairs(), c in 0.3f64..1.5, t1 in 0.1f64..1.0) {
        let s = random_state(1, 16, &v);
        let field: Vec<f64> = (0..s.grid().len()).map(|k| (k as f64 * 0.37).sin().abs()).collect();
        let schedule = Schedule::exponential(c, 1.0, 1.0).unwrap();
        let cfg = EvolveConfig { record_every: 0, ..EvolveConfig::default() };
        let ev = evolve(&s, &schedule, 0.0, t1, &cfg, &field, &mut NoRecord).unwrap();
        prop_assert!(ev.norm_drift < 1e-10);
        prop_assert!(ev.norm_drift < 1e-15 * ev.accepted as f64 + 1e-14, "drift {} steps {}", ev.norm_drift, ev.accepted);
        prop_assert!((ev.state.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn b_l1_closed_form_matches_quadrature(
        c in 0.2f64..2.0, m0 in 0.2f64..3.0, w0 in 0.2f64..3.0, t in 0.1f64..3.0,
    ) {
        let s = Schedule::exponential(c, m0, w0).unwrap();
        let (a, b) = (s.b_l1_closed_form(t).unwrap(), s.b_l1_quadrature(t).unwrap());
        prop_assert!((a - b).abs() <= 1e-8 * a.abs());
    }

    #[test]
    fn polynomial_schedules_have_ideal_scaling(k in 1.0f64..5.0, t0 in 0.5f64..2.0) {
        let s = Schedule::polynomial(k, t0, 1.0, 1.0).unwrap();
        prop_assert!(s.validate_ideal_scaling(16).passed);
    }

    #[test]
    fn mollified_convex_samples_stay_convex(sigma in 0.04f64..0.3, a in 0.1f64..3.0) {
        let grid = GridSpec::new(1, 128, vec![0.0], 0.5).unwrap();
        let g: Vec<f64> = (0..grid.len()).map(|k| a * grid.point(k)[0].abs()).collect();
        let m = mollify(&grid, &g, sigma).unwrap();
        prop_assert!(m.sup_distance_inner <= 4.0 * a * sigma);
        let coords = grid.axis_coords();
        let mut order: Vec<usize> = (0..grid.len()).collect();
        order.sort_by(|&i, &j| coords[i].total_cmp(&coords[j]));
        let h = grid.spacing();
        for w in order.windows(3) {
            if coords[w[1]].abs() + h <= 0.5 - sigma {
                let second = m.values[w[0]] - 2.0 * m.values[w[1]] + m.values[w[2]];
                prop_assert!(second >= -1e-12);
            }
        }
    }

    #[test]
    fn registry_values_are_nonnegative_with_zero_at_shift(
        d in 1usize..=3, x in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        for name in ["quadratic", "abs_l1", "max_abs", "huber", "rosenbrock_convexified"] {
            let spec = PotentialSpec::named(name, d, &PotentialParams::default(), vec![0.0; d], 1.0).unwrap();
            prop_assert!(spec.value(&x[..d]) >= 0.0);
            prop_assert!(spec.value(&vec![0.0; d]).abs() < 1e-15);
            prop_assert!(spec.value(&x[..d]) <= spec.bound * (1.0 + 1e-12));
        }
    }
}
