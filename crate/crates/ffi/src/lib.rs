//! C ABI for szegolab.
//!
//! Every fallible call returns an [`SzStatus`]; on failure the message is
//! available from [`szegolab_last_error`] on the same thread. Handles are
//! opaque and must be released with their `_free` function. Strings returned
//! by the library are released with [`szegolab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use szegolab::arc::{self, ArcGeometry};
use szegolab::experiments::{self, ExperimentConfig};
use szegolab::report::AsymptoticsReport;
use szegolab::{cmv, spec, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    Range = 5,
    PositivityLoss = 6,
    Singular = 7,
    Truncation = 8,
    UnsupportedOrder = 9,
    Resolution = 10,
    Io = 11,
    Assertion = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SzComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for SzComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// One row of a convergence table.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SzRow {
    pub n: usize,
    pub psi: SzComplex,
    pub predicted: SzComplex,
    pub abs_error: f64,
    pub route_disagreement: f64,
}

/// Experiment configuration.
pub struct SzConfig(ExperimentConfig);

/// Finished experiment report.
pub struct SzReport(AsymptoticsReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SzStatus {
    match e {
        Error::Degree { .. } | Error::Domain(_) => SzStatus::Domain,
        Error::Resolution { .. } => SzStatus::Resolution,
        Error::PositivityLoss { .. } => SzStatus::PositivityLoss,
        Error::Range(_) => SzStatus::Range,
        Error::Singular { .. } => SzStatus::Singular,
        Error::Truncation(_) => SzStatus::Truncation,
        Error::UnsupportedOrder(_) => SzStatus::UnsupportedOrder,
        Error::Parse(_) | Error::Json(_) => SzStatus::Parse,
        Error::Assertion(_) => SzStatus::Assertion,
        Error::Io(_) | Error::Csv(_) => SzStatus::Io,
    }
}

enum Fail {
    Status(SzStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SzStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            SzStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Status(SzStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(SzStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn opt_text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(Some)
    }
}

unsafe fn obj<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail::Status(SzStatus::NullPointer, format!("{what} is null")))
}

unsafe fn obj_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut()
        .ok_or_else(|| Fail::Status(SzStatus::NullPointer, format!("{what} is null")))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last failed call on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn szegolab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn szegolab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a configuration. `n_list` is a comma-separated, strictly increasing list.
///
/// # Safety
/// String arguments must be valid NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn szegolab_config_new(
    experiment: *const c_char,
    measure: *const c_char,
    h: *const c_char,
    n_list: *const c_char,
    out: *mut *mut SzConfig,
) -> SzStatus {
    guard(|| {
        let out = obj_mut(out, "out")?;
        *out = ptr::null_mut();
        let exp: experiments::Experiment = text(experiment, "experiment")?.parse()?;
        let ns = spec::parse_n_list(text(n_list, "n_list")?)?;
        let cfg = ExperimentConfig::new(exp, text(measure, "measure")?, text(h, "h")?, ns);
        *out = Box::into_raw(Box::new(SzConfig(cfg)));
        Ok(())
    })
}

/// # Safety
/// `cfg` must be null or a handle from [`szegolab_config_new`].
#[no_mangle]
pub unsafe extern "C" fn szegolab_config_free(cfg: *mut SzConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Second source for `compare`; null clears it.
///
/// # Safety
/// `cfg` must be a live handle; `other` null or a valid string.
#[no_mangle]
pub unsafe extern "C" fn szegolab_config_set_other(cfg: *mut SzConfig, other: *const c_char) -> SzStatus {
    guard(|| {
        obj_mut(cfg, "cfg")?.0.other = opt_text(other, "other")?.map(str::to_string);
        Ok(())
    })
}

/// Extra CMV rows; 0 restores the default.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn szegolab_config_set_pad(cfg: *mut SzConfig, pad: usize) -> SzStatus {
    guard(|| {
        obj_mut(cfg, "cfg")?.0.pad = (pad > 0).then_some(pad);
        Ok(())
    })
}

/// Bound on the final row's error; a negative value removes it.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn szegolab_config_set_tol(cfg: *mut SzConfig, tol: f64) -> SzStatus {
    guard(|| {
        obj_mut(cfg, "cfg")?.0.tol = (tol >= 0.0).then_some(tol);
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn szegolab_config_set_t(cfg: *mut SzConfig, t: f64) -> SzStatus {
    guard(|| {
        obj_mut(cfg, "cfg")?.0.t = t;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn szegolab_config_set_order(cfg: *mut SzConfig, order: usize) -> SzStatus {
    guard(|| {
        obj_mut(cfg, "cfg")?.0.order = order;
        Ok(())
    })
}

/// Subsequence for `right_limit`, comma-separated.
///
/// # Safety
/// `cfg` must be a live handle; `subseq` a valid string.
#[no_mangle]
pub unsafe extern "C" fn szegolab_config_set_subseq(cfg: *mut SzConfig, subseq: *const c_char) -> SzStatus {
    guard(|| {
        let list = spec::parse_n_list(text(subseq, "subseq")?)?;
        obj_mut(cfg, "cfg")?.0.subseq = list;
        Ok(())
    })
}

/// Quadrature resolution for catalog measures; 0 restores the default.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn szegolab_config_set_quad_points(cfg: *mut SzConfig, m: usize) -> SzStatus {
    guard(|| {
        obj_mut(cfg, "cfg")?.0.quad_points = (m > 0).then_some(m);
        Ok(())
    })
}

/// Runs the experiment. Failed assertions still produce a report; see [`szegolab_report_passed`].
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn szegolab_run(cfg: *const SzConfig, out: *mut *mut SzReport) -> SzStatus {
    guard(|| {
        let out = obj_mut(out, "out")?;
        *out = ptr::null_mut();
        let report = experiments::run(&obj(cfg, "cfg")?.0)?;
        *out = Box::into_raw(Box::new(SzReport(report)));
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle from [`szegolab_run`].
#[no_mangle]
pub unsafe extern "C" fn szegolab_report_free(report: *mut SzReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn szegolab_report_row_count(report: *const SzReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.rows.len())
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn szegolab_report_row(report: *const SzReport, index: usize, out: *mut SzRow) -> SzStatus {
    guard(|| {
        let r = obj(report, "report")?;
        let out = obj_mut(out, "out")?;
        let row = r.0.rows.get(index).ok_or_else(|| {
            Fail::Status(
                SzStatus::Range,
                format!("row {index} of {}", r.0.rows.len()),
            )
        })?;
        *out = SzRow {
            n: row.n,
            psi: row.psi.into(),
            predicted: row.predicted.into(),
            abs_error: row.abs_error,
            route_disagreement: row.route_disagreement,
        };
        Ok(())
    })
}

/// 1 when every assertion passed, 0 otherwise (or for a null handle).
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn szegolab_report_passed(report: *const SzReport) -> c_int {
    report.as_ref().map_or(0, |r| r.0.passed() as c_int)
}

/// Summary of the first failing assertion, or null when all passed. Free with [`szegolab_string_free`].
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn szegolab_report_first_failure(report: *const SzReport) -> *mut c_char {
    match report.as_ref().and_then(|r| r.0.first_failure()) {
        Some(a) => owned_string(format!("{}: {}", a.name, a.detail)),
        None => ptr::null_mut(),
    }
}

/// CSV text of the table. Free with [`szegolab_string_free`]; null on failure.
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn szegolab_report_csv(report: *const SzReport) -> *mut c_char {
    let mut s = String::new();
    let status = guard(|| {
        s = obj(report, "report")?.0.to_csv_string()?;
        Ok(())
    });
    if status == SzStatus::Ok {
        owned_string(s)
    } else {
        ptr::null_mut()
    }
}

/// JSON report including metadata and assertions. Free with [`szegolab_string_free`]; null on failure.
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn szegolab_report_json(report: *const SzReport) -> *mut c_char {
    let mut s = String::new();
    let status = guard(|| {
        s = obj(report, "report")?.0.to_json_string()?;
        Ok(())
    });
    if status == SzStatus::Ok {
        owned_string(s)
    } else {
        ptr::null_mut()
    }
}

/// `Q_α(h)` for a symbol spec `h`.
///
/// # Safety
/// `h` must be a valid string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn szegolab_q_alpha(alpha: SzComplex, h: *const c_char, out: *mut SzComplex) -> SzStatus {
    guard(|| {
        let out = obj_mut(out, "out")?;
        let h = spec::parse_h(text(h, "h")?)?;
        let geom = ArcGeometry::new(Complex64::new(alpha.re, alpha.im))?;
        *out = arc::q_alpha(&geom, &h)?.into();
        Ok(())
    })
}

/// `Ψ_n` along the Fredholm route for a measure or sequence spec; `pad = 0` picks the default.
///
/// # Safety
/// String arguments must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn szegolab_psi(
    source: *const c_char,
    h: *const c_char,
    n: usize,
    pad: usize,
    out: *mut SzComplex,
) -> SzStatus {
    guard(|| {
        let out = obj_mut(out, "out")?;
        let h = spec::parse_h(text(h, "h")?)?;
        let source = spec::parse_source(text(source, "source")?)?;
        let pad = if pad == 0 { cmv::pad_min(&h).max(64) } else { pad };
        let routes = experiments::log_psi_routes(&source, &h, &[n], pad)?;
        *out = routes[0].fredholm.exp().into();
        Ok(())
    })
}
