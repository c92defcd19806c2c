//! C API over the `ftnsim` simulator.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free`. Every fallible call returns an `FtnStatus`;
//! on failure `ftn_last_error()` describes the problem for the calling
//! thread. Strings returned by a handle live as long as the handle.

// Pointer requirements are the same for every function: handles come from
// this library, out-pointers are writable, strings are NUL-terminated.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ftnsim::harness::{self, Runner};
use ftnsim::{Error, ExperimentConfig, ExperimentResult};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtnStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Config = 3,
    InvalidParameter = 4,
    NoCrossing = 5,
    Io = 6,
    Simulation = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtnSweep {
    BerVsOsnr = 0,
    RequiredOsnr = 1,
    Dgd = 2,
    DgdWithRequiredOsnr = 3,
    Linewidth = 4,
}

/// Experiment configuration.
pub struct FtnConfig {
    inner: ExperimentConfig,
}

/// Result table of a finished sweep.
pub struct FtnResult {
    csv: CString,
    json: CString,
    rows: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> FtnStatus {
    match e {
        Error::Config(_) => FtnStatus::Config,
        Error::NoCrossing { .. } => FtnStatus::NoCrossing,
        Error::Io(_) => FtnStatus::Io,
        Error::InvalidParameter(_) => FtnStatus::InvalidParameter,
        _ => FtnStatus::Simulation,
    }
}

fn fail(e: Error) -> FtnStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn guard(f: impl FnOnce() -> FtnStatus) -> FtnStatus {
    set_error("");
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal panic");
        FtnStatus::Panic
    })
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, FtnStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(FtnStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        FtnStatus::InvalidUtf8
    })
}

fn null_arg() -> FtnStatus {
    set_error("null handle or output pointer");
    FtnStatus::NullArgument
}

fn jobs(n: u32) -> usize {
    if n == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        n as usize
    }
}

/// Message for the last failed call on this thread; empty after a success.
#[no_mangle]
pub extern "C" fn ftn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ftn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default configuration.
#[no_mangle]
pub unsafe extern "C" fn ftn_config_default(out: *mut *mut FtnConfig) -> FtnStatus {
    guard(|| {
        if out.is_null() {
            return null_arg();
        }
        *out = Box::into_raw(Box::new(FtnConfig {
            inner: ExperimentConfig::default(),
        }));
        FtnStatus::Ok
    })
}

/// Parses a JSON configuration; missing keys take defaults.
#[no_mangle]
pub unsafe extern "C" fn ftn_config_from_json(json: *const c_char, out: *mut *mut FtnConfig) -> FtnStatus {
    guard(|| {
        if out.is_null() {
            return null_arg();
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match ExperimentConfig::from_json(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(FtnConfig { inner }));
                FtnStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn ftn_config_set_seed(config: *mut FtnConfig, seed: u64) -> FtnStatus {
    guard(|| match config.as_mut() {
        Some(c) => {
            c.inner.master_seed = seed;
            FtnStatus::Ok
        }
        None => null_arg(),
    })
}

#[no_mangle]
pub unsafe extern "C" fn ftn_config_set_trials(config: *mut FtnConfig, trials: usize) -> FtnStatus {
    guard(|| {
        let Some(c) = config.as_mut() else {
            return null_arg();
        };
        let mut next = c.inner.clone();
        next.n_trials = trials;
        match next.validate() {
            Ok(()) => {
                c.inner = next;
                FtnStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Writes the resolved configuration as JSON into `buf`. `needed` receives
/// the size including the terminator; a short buffer yields
/// `FTN_STATUS_INVALID_PARAMETER` with nothing written.
#[no_mangle]
pub unsafe extern "C" fn ftn_config_to_json(
    config: *const FtnConfig,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> FtnStatus {
    guard(|| {
        let Some(c) = config.as_ref() else {
            return null_arg();
        };
        let json = c.inner.to_json();
        if !needed.is_null() {
            *needed = json.len() + 1;
        }
        if buf.is_null() || len < json.len() + 1 {
            set_error("buffer too small");
            return FtnStatus::InvalidParameter;
        }
        ptr::copy_nonoverlapping(json.as_ptr().cast(), buf, json.len());
        *buf.add(json.len()) = 0;
        FtnStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn ftn_config_free(config: *mut FtnConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs a sweep. A `jobs_hint` of 0 uses every available core; the output does
/// not depend on it.
#[no_mangle]
pub unsafe extern "C" fn ftn_run(
    config: *const FtnConfig,
    sweep: FtnSweep,
    jobs_hint: u32,
    out: *mut *mut FtnResult,
) -> FtnStatus {
    guard(|| {
        if out.is_null() {
            return null_arg();
        }
        *out = ptr::null_mut();
        let Some(c) = config.as_ref() else {
            return null_arg();
        };
        let result = Runner::new(&c.inner, jobs(jobs_hint)).and_then(|r| match sweep {
            FtnSweep::BerVsOsnr => harness::ber_vs_osnr(&r),
            FtnSweep::RequiredOsnr => harness::required_osnr_sweep(&r),
            FtnSweep::Dgd => harness::dgd_sweep(&r, false),
            FtnSweep::DgdWithRequiredOsnr => harness::dgd_sweep(&r, true),
            FtnSweep::Linewidth => harness::linewidth_sweep(&r),
        });
        match result {
            Ok(res) => {
                *out = Box::into_raw(Box::new(wrap(&res)));
                FtnStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

fn wrap(res: &ExperimentResult) -> FtnResult {
    FtnResult {
        csv: CString::new(res.to_csv()).unwrap_or_default(),
        json: CString::new(res.to_json()).unwrap_or_default(),
        rows: res.rows.len(),
    }
}

/// OSNR in dB at which the BER reaches the configured target.
#[no_mangle]
pub unsafe extern "C" fn ftn_required_osnr(
    config: *const FtnConfig,
    dgd_ps: f64,
    linewidth_hz: f64,
    jobs_hint: u32,
    osnr_db: *mut f64,
) -> FtnStatus {
    guard(|| {
        let (Some(c), false) = (config.as_ref(), osnr_db.is_null()) else {
            return null_arg();
        };
        match Runner::new(&c.inner, jobs(jobs_hint)).and_then(|r| r.required_osnr(dgd_ps, linewidth_hz, 0)) {
            Ok(req) => {
                *osnr_db = req.osnr_db;
                FtnStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn ftn_result_csv(result: *const FtnResult) -> *const c_char {
    result.as_ref().map_or(ptr::null(), |r| r.csv.as_ptr())
}

#[no_mangle]
pub unsafe extern "C" fn ftn_result_json(result: *const FtnResult) -> *const c_char {
    result.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

#[no_mangle]
pub unsafe extern "C" fn ftn_result_rows(result: *const FtnResult) -> usize {
    result.as_ref().map_or(0, |r| r.rows)
}

#[no_mangle]
pub unsafe extern "C" fn ftn_result_free(result: *mut FtnResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Runs the built-in invariant checks; `failed` receives the failure count.
#[no_mangle]
pub unsafe extern "C" fn ftn_selftest(failed: *mut u32) -> FtnStatus {
    guard(|| {
        let checks = ftnsim::selftest::run();
        let bad: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
        if !failed.is_null() {
            *failed = bad.len() as u32;
        }
        if bad.is_empty() {
            FtnStatus::Ok
        } else {
            let names: Vec<_> = bad.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
            set_error(&names.join("; "));
            FtnStatus::Simulation
        }
    })
}
