use std::ffi::{c_char, CStr};
use std::ptr;

use hardcore_ffi::*;

struct Model(*mut HcModel);

impl Model {
    fn new(lambda_p: f64, delta: f64, process: HcProcess, alpha: f64) -> Self {
        let mut raw = ptr::null_mut();
        let status = unsafe { hc_model_new(lambda_p, delta, process, alpha, 0.0, &mut raw) };
        assert_eq!(status, HcStatus::Ok, "{}", last_error());
        assert!(!raw.is_null());
        Model(raw)
    }
}

impl Drop for Model {
    fn drop(&mut self) {
        unsafe { hc_model_free(self.0) }
    }
}

fn last_error() -> String {
    let mut buf = vec![0 as c_char; hc_last_error_length() + 1];
    let n = unsafe { hc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n >= 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn value(f: impl FnOnce(*mut f64) -> HcStatus) -> f64 {
    let mut out = f64::NAN;
    let status = f(&mut out);
    assert_eq!(status, HcStatus::Ok, "{}", last_error());
    out
}

#[test]
fn intensity_of_each_process() {
    let lp = 2.0;
    let area = std::f64::consts::PI;
    let m1 = Model::new(lp, 1.0, HcProcess::MaternI, 3.0);
    let m2 = Model::new(lp, 1.0, HcProcess::MaternII, 3.0);
    let ph = Model::new(lp, 1.0, HcProcess::PoissonHole, 3.0);
    let l1 = value(|o| unsafe { hc_intensity(m1.0, o) });
    let l2 = value(|o| unsafe { hc_intensity(m2.0, o) });
    let l0 = value(|o| unsafe { hc_intensity(ph.0, o) });
    assert!((l1 - lp * (-lp * area).exp()).abs() < 1e-15);
    assert!((l2 - (1.0 - (-lp * area).exp()) / area).abs() < 1e-15);
    assert_eq!(l0, lp);
}

#[test]
fn quadrature_mean_matches_library() {
    let m = Model::new(1.0, 1.0, HcProcess::MaternI, 3.0);
    let mean = value(|o| unsafe { hc_mean_interference(m.0, o) });
    assert!((mean - 0.4147373560290456).abs() < 1e-9, "{mean}");

    let ph = value(|o| unsafe { hc_mean_interference_poisson_hole(m.0, o) });
    let lambda = value(|o| unsafe { hc_intensity(m.0, o) });
    // 2πλ δ^{2-α}/(α-2) with δ = 1, α = 3
    assert!((ph - 2.0 * std::f64::consts::PI * lambda).abs() < 1e-12);
}

#[test]
fn k_function_vanishes_inside_hard_core() {
    let m = Model::new(2.0, 1.0, HcProcess::MaternI, 3.0);
    assert_eq!(value(|o| unsafe { hc_k_function(m.0, 0.5, o) }), 0.0);
    let far = value(|o| unsafe { hc_k_function(m.0, 50.0, o) });
    let ratio = far / (std::f64::consts::PI * 2500.0);
    assert!((0.99..=1.01).contains(&ratio), "{ratio}");
}

#[test]
fn eir_headline_and_type2_bound() {
    let m = Model::new(2.0, 2.0, HcProcess::MaternI, 3.0);
    let mut report = HcEirReport::default();
    let status = unsafe { hc_eir(m.0, HcEirMethod::Approximation, &mut report) };
    assert_eq!(status, HcStatus::Ok);
    assert!((report.eir_db - 31.5).abs() <= 0.1, "{report:?}");

    let status = unsafe { hc_eir(m.0, HcEirMethod::Quadrature, &mut report) };
    assert_eq!(status, HcStatus::Ok);
    assert!((28.0..=32.0).contains(&report.eir_db));
    assert!((report.mean_hardcore / report.mean_poisson_hole - report.eir_linear).abs() < 1e-12);

    let bound = value(|o| unsafe { hc_eir_type2_bound(3.0, o) });
    assert!((10.0 * bound.log10() - 0.498).abs() <= 0.005);
    let universal = value(|o| unsafe { hc_eir_type2_bound(f64::NAN, o) });
    let nu = 12.0 * std::f64::consts::PI / (8.0 * std::f64::consts::PI + 3.0 * 3f64.sqrt());
    assert!((universal - nu).abs() < 1e-15);
}

#[test]
fn approximation_rejected_for_type2() {
    let m = Model::new(2.0, 1.0, HcProcess::MaternII, 3.0);
    let mut report = HcEirReport::default();
    let status = unsafe { hc_eir(m.0, HcEirMethod::Approximation, &mut report) };
    assert_eq!(status, HcStatus::Unsupported);
    assert!(!last_error().is_empty());
}

#[test]
fn special_functions() {
    // Γ(1, x) = e^{-x}
    let g = value(|o| unsafe { hc_upper_incomplete_gamma(1.0, 2.0, o) });
    assert!((g - (-2f64).exp()).abs() < 1e-15);
    // Γ(-1, x) = e^{-x}/x - Γ(0, x); at x = 1, Γ(0, 1) = E1(1) = 0.21938393439552026
    let g = value(|o| unsafe { hc_upper_incomplete_gamma(-1.0, 1.0, o) });
    assert!((g - ((-1f64).exp() - 0.21938393439552026)).abs() < 1e-13, "{g}");

    let h = value(|o| unsafe { hc_h_integral(1.0, 1.0, 3.0, o) });
    assert!(h.is_finite() && h > 0.0);
    let status = unsafe { hc_upper_incomplete_gamma(0.5, -1.0, &mut 0.0) };
    assert_eq!(status, HcStatus::Domain);
}

#[test]
fn monte_carlo_estimate_is_seeded() {
    let m = Model::new(1.0, 1.0, HcProcess::PoissonHole, 3.0);
    let run = |seed| {
        let mut est = HcInterferenceEstimate::default();
        let status = unsafe { hc_estimate_mean_interference(m.0, 2000, seed, 0.0, &mut est) };
        assert_eq!(status, HcStatus::Ok, "{}", last_error());
        est
    };
    let a = run(7);
    assert_eq!(a, run(7));
    assert_eq!(a.replicates, 2000);
    assert!(a.ci_low <= 2.0 * std::f64::consts::PI && 2.0 * std::f64::consts::PI <= a.ci_high, "{a:?}");

    let status = unsafe { hc_estimate_mean_interference(m.0, 0, 7, 0.0, &mut HcInterferenceEstimate::default()) };
    assert_eq!(status, HcStatus::Config);
}

#[test]
fn invalid_parameters_leave_null_model() {
    let mut raw = ptr::NonNull::<HcModel>::dangling().as_ptr();
    let status = unsafe { hc_model_new(-1.0, 1.0, HcProcess::MaternI, 3.0, 0.0, &mut raw) };
    assert_eq!(status, HcStatus::Domain);
    assert!(raw.is_null());
    assert!(last_error().contains("domain"));

    let status = unsafe { hc_model_new(1.0, 1.0, HcProcess::MaternI, 2.0, 0.0, &mut raw) };
    assert_eq!(status, HcStatus::Domain);
    assert!(raw.is_null());
}

#[test]
fn null_pointers_are_reported() {
    assert_eq!(unsafe { hc_intensity(ptr::null(), &mut 0.0) }, HcStatus::NullPointer);
    let m = Model::new(1.0, 1.0, HcProcess::MaternI, 3.0);
    assert_eq!(unsafe { hc_intensity(m.0, ptr::null_mut()) }, HcStatus::NullPointer);
    assert_eq!(
        unsafe { hc_model_new(1.0, 1.0, HcProcess::MaternI, 3.0, 0.0, ptr::null_mut()) },
        HcStatus::NullPointer
    );
    unsafe { hc_model_free(ptr::null_mut()) };
}

#[test]
fn error_message_buffer_handling() {
    let mut buf = [0 as c_char; 4];
    unsafe { hc_upper_incomplete_gamma(0.5, -1.0, &mut 0.0) };
    assert!(hc_last_error_length() > 4);
    assert_eq!(unsafe { hc_last_error_message(buf.as_mut_ptr(), buf.len()) }, -1);
    assert_eq!(unsafe { hc_last_error_message(ptr::null_mut(), 100) }, -1);

    // success clears the message
    value(|o| unsafe { hc_upper_incomplete_gamma(1.0, 1.0, o) });
    assert_eq!(hc_last_error_length(), 0);
    assert_eq!(unsafe { hc_last_error_message(buf.as_mut_ptr(), buf.len()) }, 0);
}

#[test]
fn quadrature_settings_are_validated_and_applied() {
    let m = Model::new(2.0, 1.0, HcProcess::MaternII, 3.0);
    assert_eq!(unsafe { hc_model_set_quadrature(m.0, 0.0, 10) }, HcStatus::Config);
    assert_eq!(unsafe { hc_model_set_quadrature(m.0, 1e-15, 1) }, HcStatus::Ok);
    let status = unsafe { hc_mean_interference(m.0, &mut 0.0) };
    assert_eq!(status, HcStatus::Tolerance, "{}", last_error());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(hc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
