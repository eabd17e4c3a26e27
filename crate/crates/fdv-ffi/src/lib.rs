//! C ABI for the fire/plume tracking pipeline.
//!
//! Conventions:
//!
//! - Handles (`FdvConfig`) are opaque; create/free them with the paired
//!   functions and never dereference them from C.
//! - Functions return [`FdvStatus`]; anything but `Ok` leaves a
//!   human-readable message retrievable via [`fdv_last_error`].
//! - Strings returned through `*mut c_char` out-parameters are owned by
//!   the caller and must be released with [`fdv_string_free`].
//! - JSON is the interchange format for configs, scenarios, reports, and
//!   fit results, matching the files the CLI writes.
//!
//! The header `include/fdv.h` is generated by cbindgen at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use fdv_core::config::PipelineConfig;
use fdv_core::error::Error;
use fdv_core::pipeline;
use fdv_core::stats::{self, Family, FitMethod as CoreFitMethod, McmcConfig, SampleSet};
use fdv_core::synth::{self, Scenario};

/// Status codes; nonzero values match the CLI exit codes where possible.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdvStatus {
    Ok = 0,
    /// Invalid configuration, parameters, or preconditions.
    ValidationError = 2,
    /// File system or decode failure.
    IoError = 3,
    /// Numeric failure (degenerate geometry, non-convergence, domain).
    NumericError = 4,
    NullPointer = 5,
    InvalidUtf8 = 6,
    /// A panic was caught at the boundary; state may be stale.
    Panic = 7,
}

/// Distribution family selector for [`fdv_fit`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdvFamily {
    Exponential = 0,
    Erlang = 1,
}

/// Fit method selector for [`fdv_fit`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdvFitMethod {
    MomentMatching = 0,
    Mcmc = 1,
}

/// Opaque pipeline configuration handle.
pub struct FdvConfig {
    inner: PipelineConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> FdvStatus {
    match err.exit_code() {
        2 => FdvStatus::ValidationError,
        3 => FdvStatus::IoError,
        _ => FdvStatus::NumericError,
    }
}

fn fail(err: &Error) -> FdvStatus {
    set_error(&format!("{err}"));
    status_of(err)
}

/// Run `body` with panic containment; panics become `FdvStatus::Panic`.
fn guarded(body: impl FnOnce() -> FdvStatus) -> FdvStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            FdvStatus::Panic
        }
    }
}

unsafe fn cstr_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, FdvStatus> {
    if ptr.is_null() {
        set_error(&format!("{name} is null"));
        return Err(FdvStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(&format!("{name} is not valid utf-8"));
        FdvStatus::InvalidUtf8
    })
}

fn to_owned_cstring(text: String) -> *mut c_char {
    CString::new(text.replace('\0', " "))
        .map(CString::into_raw)
        .unwrap_or(std::ptr::null_mut())
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn fdv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failure on this thread; valid until the next
/// failing call from the same thread. Do not free.
#[no_mangle]
pub extern "C" fn fdv_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Release a string returned through an out-parameter.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn fdv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// New handle holding the default configuration. Never fails.
#[no_mangle]
pub extern "C" fn fdv_config_default() -> *mut FdvConfig {
    Box::into_raw(Box::new(FdvConfig { inner: PipelineConfig::default() }))
}

/// Parse and validate a configuration from JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fdv_config_from_json(json: *const c_char, out: *mut *mut FdvConfig) -> FdvStatus {
    guarded(|| {
        if out.is_null() {
            set_error("out is null");
            return FdvStatus::NullPointer;
        }
        let text = match cstr_arg(json, "json") {
            Ok(t) => t,
            Err(status) => return status,
        };
        match PipelineConfig::from_json(text) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(FdvConfig { inner: cfg }));
                FdvStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Serialize a configuration to pretty JSON (free with [`fdv_string_free`]).
///
/// # Safety
/// `cfg` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fdv_config_to_json(cfg: *const FdvConfig) -> *mut c_char {
    if cfg.is_null() {
        set_error("cfg is null");
        return std::ptr::null_mut();
    }
    to_owned_cstring((*cfg).inner.to_json_pretty())
}

/// Release a configuration handle.
///
/// # Safety
/// `cfg` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fdv_config_free(cfg: *mut FdvConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Override the seed of a configuration handle.
///
/// # Safety
/// `cfg` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fdv_config_set_seed(cfg: *mut FdvConfig, seed: u64) -> FdvStatus {
    if cfg.is_null() {
        set_error("cfg is null");
        return FdvStatus::NullPointer;
    }
    (*cfg).inner.seed = seed;
    FdvStatus::Ok
}

/// Run the full pipeline: frames in `input_dir`, bundle to `out_dir`.
///
/// `threads == 0` uses all cores. When `report_json_out` is non-null it
/// receives the run report as JSON (free with [`fdv_string_free`]).
///
/// # Safety
/// Pointer arguments must satisfy the conventions in the module docs.
#[no_mangle]
pub unsafe extern "C" fn fdv_run(
    cfg: *const FdvConfig,
    input_dir: *const c_char,
    out_dir: *const c_char,
    threads: u32,
    report_json_out: *mut *mut c_char,
) -> FdvStatus {
    guarded(|| {
        if cfg.is_null() {
            set_error("cfg is null");
            return FdvStatus::NullPointer;
        }
        let input = match cstr_arg(input_dir, "input_dir") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let out = match cstr_arg(out_dir, "out_dir") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match pipeline::run_pipeline(&(*cfg).inner, Path::new(input), Path::new(out), threads as usize) {
            Ok(report) => {
                if !report_json_out.is_null() {
                    let json = serde_json::to_string_pretty(&report).unwrap_or_default();
                    *report_json_out = to_owned_cstring(json);
                }
                FdvStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Nyquist sampling advisor over candidate rates (Hz). The report JSON
/// lands in `report_json_out` (free with [`fdv_string_free`]).
///
/// # Safety
/// `rates` must point to `rates_len` doubles; other pointers as in
/// [`fdv_run`].
#[no_mangle]
pub unsafe extern "C" fn fdv_advise(
    cfg: *const FdvConfig,
    input_dir: *const c_char,
    rates: *const f64,
    rates_len: usize,
    threads: u32,
    report_json_out: *mut *mut c_char,
) -> FdvStatus {
    guarded(|| {
        if cfg.is_null() || rates.is_null() || report_json_out.is_null() {
            set_error("cfg, rates, and report_json_out must not be null");
            return FdvStatus::NullPointer;
        }
        let input = match cstr_arg(input_dir, "input_dir") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let rates = std::slice::from_raw_parts(rates, rates_len);
        match pipeline::advise(&(*cfg).inner, Path::new(input), rates, threads as usize) {
            Ok(report) => {
                let json = serde_json::to_string_pretty(&report).unwrap_or_default();
                *report_json_out = to_owned_cstring(json);
                FdvStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Render a synthetic scenario (JSON document) plus ground truth into
/// `out_dir`, in the layout the pipeline consumes.
///
/// # Safety
/// Both arguments must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn fdv_synth(scenario_json: *const c_char, out_dir: *const c_char) -> FdvStatus {
    guarded(|| {
        let json = match cstr_arg(scenario_json, "scenario_json") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let out = match cstr_arg(out_dir, "out_dir") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let scenario: Scenario = match serde_json::from_str(json) {
            Ok(sc) => sc,
            Err(e) => {
                return fail(&Error::Scenario(format!("scenario parse error: {e}")));
            }
        };
        match synth::write_scenario(&scenario, Path::new(out)) {
            Ok(_) => FdvStatus::Ok,
            Err(e) => fail(&e),
        }
    })
}

/// Fit a distribution to `len` samples. The fit result JSON lands in
/// `result_json_out` (free with [`fdv_string_free`]).
///
/// # Safety
/// `values` must point to `len` doubles; `result_json_out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fdv_fit(
    values: *const f64,
    len: usize,
    family: FdvFamily,
    method: FdvFitMethod,
    seed: u64,
    result_json_out: *mut *mut c_char,
) -> FdvStatus {
    guarded(|| {
        if values.is_null() || result_json_out.is_null() {
            set_error("values and result_json_out must not be null");
            return FdvStatus::NullPointer;
        }
        let data = std::slice::from_raw_parts(values, len).to_vec();
        let samples = match SampleSet::new(data, "sample") {
            Ok(s) => s,
            Err(e) => return fail(&e),
        };
        let family = match family {
            FdvFamily::Exponential => Family::Exponential,
            FdvFamily::Erlang => Family::Erlang,
        };
        let result = match method {
            FdvFitMethod::MomentMatching => stats::moment_match(&samples, family, None),
            FdvFitMethod::Mcmc => {
                let cfg = McmcConfig { seed, ..McmcConfig::default() };
                stats::mcmc_fit(&samples, family, &cfg, None)
            }
        };
        match result {
            Ok(fit) => {
                debug_assert!(matches!(fit.method, CoreFitMethod::MomentMatching | CoreFitMethod::Mcmc));
                let json = serde_json::to_string_pretty(&fit).unwrap_or_default();
                *result_json_out = to_owned_cstring(json);
                FdvStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Fill occlusions across a sequence; writes filled frames to `out_dir`.
///
/// # Safety
/// Pointer arguments must satisfy the conventions in the module docs.
#[no_mangle]
pub unsafe extern "C" fn fdv_inpaint_sequence(
    cfg: *const FdvConfig,
    input_dir: *const c_char,
    out_dir: *const c_char,
    threads: u32,
) -> FdvStatus {
    guarded(|| {
        if cfg.is_null() {
            set_error("cfg is null");
            return FdvStatus::NullPointer;
        }
        let input = match cstr_arg(input_dir, "input_dir") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let out = match cstr_arg(out_dir, "out_dir") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match pipeline::inpaint_sequence(&(*cfg).inner, Path::new(input), Path::new(out), threads as usize) {
            Ok(_) => FdvStatus::Ok,
            Err(e) => fail(&e),
        }
    })
}
