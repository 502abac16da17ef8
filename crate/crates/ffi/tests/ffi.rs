use std::ffi::{CStr, CString};
use std::ptr;

use qhd_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(qhd_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn potential_lifecycle() {
    let name = CString::new("quadratic").unwrap();
    let center = [0.0, 0.0];
    let mut pot = ptr::null_mut();
    unsafe {
        assert_eq!(qhd_potential_new(name.as_ptr(), 2, center.as_ptr(), 1.0, &mut pot), QhdStatus::Ok);
        let mut v = 0.0;
        assert_eq!(qhd_potential_eval(pot, [1.0, 2.0].as_ptr(), &mut v), QhdStatus::Ok);
        assert!((v - 5.0).abs() < 1e-12);
        let mut g = 0.0;
        assert_eq!(qhd_potential_lipschitz(pot, &mut g), QhdStatus::Ok);
        assert!(g > 0.0);
        qhd_potential_free(pot);
        qhd_potential_free(ptr::null_mut());
    }
}

#[test]
fn unknown_potential_reports_name() {
    let name = CString::new("nesterov").unwrap();
    let mut pot = ptr::null_mut();
    let status = unsafe { qhd_potential_new(name.as_ptr(), 1, [0.0].as_ptr(), 1.0, &mut pot) };
    assert_eq!(status, QhdStatus::UnknownName);
    assert!(pot.is_null());
    assert!(last_error().contains("nesterov"));
}

#[test]
fn null_arguments_are_rejected() {
    let mut out = 0.0;
    unsafe {
        assert_eq!(qhd_potential_eval(ptr::null(), ptr::null(), &mut out), QhdStatus::NullPointer);
        assert_eq!(qhd_eps_f_budget(1e-3, 10.0, 100.0, ptr::null_mut()), QhdStatus::NullPointer);
        assert_eq!(qhd_potential_new(ptr::null(), 1, ptr::null(), 1.0, ptr::null_mut()), QhdStatus::NullPointer);
    }
}

#[test]
fn estimator_values() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(qhd_eps_f_budget(1e-3, 10.0, 100.0, &mut v), QhdStatus::Ok);
        assert!((v - 1.9007e-6).abs() < 1e-9);
        assert_eq!(qhd_queries_binary(10.0, 100.0, 1e-3, &mut v), QhdStatus::Ok);
        assert_eq!(v, 5262.0);
        assert_eq!(qhd_qubit_count(1, 2, 1.0, 1.0, 1.0, 1.0, &mut v), QhdStatus::Ok);
        assert_eq!(v, 3.0);
        let name = CString::new("risteski_li").unwrap();
        assert_eq!(qhd_baseline_queries(name.as_ptr(), 2, 1.0, 1.0, 0.5, &mut v), QhdStatus::Ok);
        assert_eq!(v, 1024.0);
        assert_eq!(qhd_eps_f_budget(1.0, 2.0, 1.0, &mut v), QhdStatus::Domain);
    }
}

#[test]
fn state_evolution_preserves_norm() {
    let name = CString::new("quadratic").unwrap();
    let (mut pot, mut sched, mut state) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(qhd_potential_new(name.as_ptr(), 1, [0.0].as_ptr(), 4.0, &mut pot), QhdStatus::Ok);
        assert_eq!(qhd_schedule_exponential(1.0, 1.0, 1.0, 1.0, &mut sched), QhdStatus::Ok);
        assert_eq!(
            qhd_state_gaussian(1, 64, [0.0].as_ptr(), 4.0, [0.5].as_ptr(), 0.5, &mut state),
            QhdStatus::Ok
        );
        let mut len = 0;
        assert_eq!(qhd_state_len(state, &mut len), QhdStatus::Ok);
        assert_eq!(len, 128);
        let mut before = 0.0;
        assert_eq!(qhd_state_expected_f(state, pot, &mut before), QhdStatus::Ok);
        let mut drift = 1.0;
        assert_eq!(qhd_state_evolve(state, sched, pot, 0.0, 1.0, 1e-6, &mut drift), QhdStatus::Ok);
        assert!(drift < 1e-10);
        let mut norm = 0.0;
        assert_eq!(qhd_state_norm(state, &mut norm), QhdStatus::Ok);
        assert!((norm - 1.0).abs() < 1e-10);
        let mut after = 0.0;
        assert_eq!(qhd_state_expected_f(state, pot, &mut after), QhdStatus::Ok);
        assert!(after < before);

        let (mut re, mut im) = (vec![0.0; len], vec![0.0; len]);
        assert_eq!(qhd_state_amplitudes(state, re.as_mut_ptr(), im.as_mut_ptr(), len), QhdStatus::Ok);
        let total: f64 = re.iter().zip(&im).map(|(a, b)| a * a + b * b).sum();
        assert!((total - 1.0).abs() < 1e-10);
        assert_eq!(
            qhd_state_amplitudes(state, re.as_mut_ptr(), im.as_mut_ptr(), len - 1),
            QhdStatus::InvalidInput
        );

        let mut b = 0.0;
        assert_eq!(qhd_schedule_b_l1(sched, 2f64.ln(), &mut b), QhdStatus::Ok);
        assert!((b - 1.5).abs() < 1e-10);
        qhd_state_free(state);
        qhd_schedule_free(sched);
        qhd_potential_free(pot);
    }
}

#[test]
fn optimize_on_coarse_grid() {
    let name = CString::new("abs_l1").unwrap();
    let mut pot = ptr::null_mut();
    let x0 = [0.2];
    let mut cand = [f64::NAN];
    let mut f = f64::NAN;
    unsafe {
        assert_eq!(qhd_potential_new(name.as_ptr(), 1, x0.as_ptr(), 1.0, &mut pot), QhdStatus::Ok);
        let status = qhd_optimize(pot, x0.as_ptr(), 1.0, 0.2, 3, 64, 1e-2, 7, cand.as_mut_ptr(), &mut f);
        assert_eq!(status, QhdStatus::Ok, "{}", last_error());
        qhd_potential_free(pot);
    }
    assert!(cand[0].is_finite());
    assert!((f - cand[0].abs()).abs() < 1e-12);
}

#[test]
fn header_declares_the_api() {
    let header = include_str!("../include/qhd.h");
    for sym in [
        "qhd_last_error",
        "qhd_potential_new",
        "qhd_state_evolve",
        "qhd_optimize",
        "typedef struct QhdState QhdState",
        "QHD_STATUS_NULL_POINTER = 100",
    ] {
        assert!(header.contains(sym), "header is missing {sym}");
    }
}
