//! C ABI for the `hardcore` crate.
//!
//! A model is created with [`hc_model_new`] and released with
//! [`hc_model_free`]. Every other entry point writes its result through an
//! out pointer and returns an [`HcStatus`]. When the status is not
//! `HC_STATUS_OK`, a human readable message is kept per thread and can be
//! copied out with [`hc_last_error_message`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use hardcore::analytic::k_function;
use hardcore::interference::{
    eir, eir_type2_bound, h_integral, mean_interference_poisson_hole, mean_interference_quadrature,
    EirMethod,
};
use hardcore::numerics::upper_incomplete_gamma;
use hardcore::simulate::{estimate_mean_interference, SimulationConfig};
use hardcore::{Error, HardCoreParams, PathLossModel, ProcessKind, QuadratureConfig};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    NullPointer = 1,
    /// An argument lies outside the domain of the function.
    Domain = 2,
    Input = 3,
    Config = 4,
    /// Quadrature did not reach the requested tolerance.
    Tolerance = 5,
    Unsupported = 6,
    Simulation = 7,
    /// A Rust panic was caught at the boundary.
    Panic = 99,
}

impl From<&Error> for HcStatus {
    fn from(err: &Error) -> Self {
        match err {
            Error::Domain(_) => HcStatus::Domain,
            Error::Input(_) => HcStatus::Input,
            Error::Config(_) => HcStatus::Config,
            Error::Tolerance { .. } => HcStatus::Tolerance,
            Error::Unsupported(_) => HcStatus::Unsupported,
            Error::Simulation(_) => HcStatus::Simulation,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcProcess {
    MaternI = 0,
    MaternII = 1,
    PoissonHole = 2,
}

impl From<HcProcess> for ProcessKind {
    fn from(p: HcProcess) -> Self {
        match p {
            HcProcess::MaternI => ProcessKind::MaternI,
            HcProcess::MaternII => ProcessKind::MaternII,
            HcProcess::PoissonHole => ProcessKind::PoissonHole,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcEirMethod {
    Quadrature = 0,
    UpperBound = 1,
    Approximation = 2,
}

impl From<HcEirMethod> for EirMethod {
    fn from(m: HcEirMethod) -> Self {
        match m {
            HcEirMethod::Quadrature => EirMethod::Quadrature,
            HcEirMethod::UpperBound => EirMethod::UpperBound,
            HcEirMethod::Approximation => EirMethod::Approximation,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HcEirReport {
    pub mean_hardcore: f64,
    pub mean_poisson_hole: f64,
    pub eir_linear: f64,
    pub eir_db: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HcInterferenceEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub replicates: u64,
    pub tail_correction: f64,
}

/// Opaque model: process parameters, power-law path loss and quadrature
/// settings.
pub struct HcModel {
    params: HardCoreParams,
    pathloss: PathLossModel,
    quad: QuadratureConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn fail(status: HcStatus, msg: impl Into<String>) -> HcStatus {
    set_last_error(msg.into());
    status
}

/// Runs `f`, maps its error or panic to a status and records the message.
fn guard<F>(f: F) -> HcStatus
where
    F: FnOnce() -> Result<(), HcFailure>,
{
    clear_last_error();
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HcStatus::Ok,
        Ok(Err(HcFailure::Lib(err))) => fail(HcStatus::from(&err), err.to_string()),
        Ok(Err(HcFailure::Null(what))) => fail(HcStatus::NullPointer, format!("{what} is null")),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            fail(HcStatus::Panic, format!("panic: {msg}"))
        }
    }
}

enum HcFailure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for HcFailure {
    fn from(err: Error) -> Self {
        HcFailure::Lib(err)
    }
}

unsafe fn model_ref<'a>(model: *const HcModel) -> Result<&'a HcModel, HcFailure> {
    model.as_ref().ok_or(HcFailure::Null("model"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), HcFailure> {
    if out.is_null() {
        return Err(HcFailure::Null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Creates a model with power-law path loss `max(r0, r)^-alpha`.
///
/// On success `*out` owns the model and must be released with
/// [`hc_model_free`]. On failure `*out` is set to null.
#[no_mangle]
pub unsafe extern "C" fn hc_model_new(
    lambda_p: f64,
    delta: f64,
    process: HcProcess,
    alpha: f64,
    r0: f64,
    out: *mut *mut HcModel,
) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(HcFailure::Null("output pointer"));
        }
        out.write(ptr::null_mut());
        let params = HardCoreParams::new(lambda_p, delta, process.into())?;
        let pathloss = PathLossModel::power_law(alpha, r0)?;
        let model = HcModel {
            params,
            pathloss,
            quad: QuadratureConfig::default(),
        };
        out.write(Box::into_raw(Box::new(model)));
        Ok(())
    })
}

/// Releases a model. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hc_model_free(model: *mut HcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Overrides the relative tolerance and panel budget used by quadrature.
#[no_mangle]
pub unsafe extern "C" fn hc_model_set_quadrature(
    model: *mut HcModel,
    rel_tol: f64,
    max_subdivisions: u32,
) -> HcStatus {
    guard(|| {
        let model = model.as_mut().ok_or(HcFailure::Null("model"))?;
        let quad = QuadratureConfig {
            rel_tol,
            max_subdivisions: max_subdivisions as usize,
            ..QuadratureConfig::default()
        };
        quad.validate()?;
        model.quad = quad;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn hc_intensity(model: *const HcModel, out: *mut f64) -> HcStatus {
    guard(|| {
        let model = model_ref(model)?;
        write_out(out, model.params.intensity())
    })
}

/// Ripley's K function of the model's process at distance `r`.
#[no_mangle]
pub unsafe extern "C" fn hc_k_function(model: *const HcModel, r: f64, out: *mut f64) -> HcStatus {
    guard(|| {
        let model = model_ref(model)?;
        write_out(out, k_function(&model.params, r, &model.quad)?)
    })
}

/// Mean interference at the typical point, by quadrature.
#[no_mangle]
pub unsafe extern "C" fn hc_mean_interference(model: *const HcModel, out: *mut f64) -> HcStatus {
    guard(|| {
        let model = model_ref(model)?;
        let value = mean_interference_quadrature(&model.params, &model.pathloss, &model.quad)?;
        write_out(out, value)
    })
}

/// Mean interference of the Poisson process with a hole of radius δ and the
/// same intensity as the model.
#[no_mangle]
pub unsafe extern "C" fn hc_mean_interference_poisson_hole(
    model: *const HcModel,
    out: *mut f64,
) -> HcStatus {
    guard(|| {
        let model = model_ref(model)?;
        write_out(out, mean_interference_poisson_hole(&model.params, &model.pathloss)?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn hc_eir(
    model: *const HcModel,
    method: HcEirMethod,
    out: *mut HcEirReport,
) -> HcStatus {
    guard(|| {
        let model = model_ref(model)?;
        let report = eir(&model.params, &model.pathloss, method.into(), &model.quad)?;
        write_out(
            out,
            HcEirReport {
                mean_hardcore: report.mean_hardcore,
                mean_poisson_hole: report.mean_poisson_hole,
                eir_linear: report.eir_linear,
                eir_db: report.eir_db,
            },
        )
    })
}

/// Upper bound on the type II excess interference ratio. Pass NaN for
/// `alpha` to get the bound that holds for every path loss.
#[no_mangle]
pub unsafe extern "C" fn hc_eir_type2_bound(alpha: f64, out: *mut f64) -> HcStatus {
    guard(|| {
        let alpha = (!alpha.is_nan()).then_some(alpha);
        write_out(out, eir_type2_bound(alpha)?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn hc_h_integral(v: f64, x: f64, alpha: f64, out: *mut f64) -> HcStatus {
    guard(|| write_out(out, h_integral(v, x, alpha)?))
}

/// Γ(s, x) for real `s` (negative orders included) and `x > 0`.
#[no_mangle]
pub unsafe extern "C" fn hc_upper_incomplete_gamma(s: f64, x: f64, out: *mut f64) -> HcStatus {
    guard(|| write_out(out, upper_incomplete_gamma(s, x)?))
}

/// Monte Carlo estimate of the mean interference at the typical point,
/// without fading and with the analytic tail beyond the window added.
///
/// A `window_radius` of zero or less selects the default window.
#[no_mangle]
pub unsafe extern "C" fn hc_estimate_mean_interference(
    model: *const HcModel,
    replicates: u64,
    seed: u64,
    window_radius: f64,
    out: *mut HcInterferenceEstimate,
) -> HcStatus {
    guard(|| {
        let model = model_ref(model)?;
        let mut cfg = SimulationConfig::for_params(&model.params)
            .with_replicates(replicates as usize)
            .with_seed(seed);
        if window_radius > 0.0 {
            cfg = cfg.with_window_radius(window_radius);
        }
        let est = estimate_mean_interference(&model.params, &model.pathloss, &cfg)?;
        write_out(
            out,
            HcInterferenceEstimate {
                mean: est.mean,
                std_error: est.std_error,
                ci_low: est.ci_low,
                ci_high: est.ci_high,
                replicates: est.replicates as u64,
                tail_correction: est.tail_correction,
            },
        )
    })
}

/// Length in bytes of the last error message on this thread, excluding the
/// terminating NUL. Zero when the last call succeeded.
#[no_mangle]
pub extern "C" fn hc_last_error_length() -> usize {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(0, |m| m.as_bytes().len()))
}

/// Copies the last error message into `buf` as a NUL-terminated string.
///
/// Returns the number of bytes written excluding the NUL, 0 when there is no
/// message, or -1 when `buf` is null or too small.
#[no_mangle]
pub unsafe extern "C" fn hc_last_error_message(buf: *mut c_char, len: usize) -> i32 {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(msg) = slot.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes_with_nul();
        if buf.is_null() || len < bytes.len() {
            return -1;
        }
        ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, bytes.len());
        (bytes.len() - 1) as i32
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
