//! C interface to `sphwave`.
//!
//! Objects are opaque handles returned through out-pointers and released
//! with the matching `_free`. Every fallible call returns an [`SphwStatus`]; on failure
//! a message is kept per thread and can be read with [`sphw_last_error_message`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sphwave::admissibility::{full_report, Verdict};
use sphwave::config::Config;
use sphwave::frame::{frame_spectrum, FrameSpectrum, ScaleGrid};
use sphwave::wavelet::{builtin, DecayClass, Wavelet};
use sphwave::{specfun, Error};

/// Opaque wavelet handle.
pub struct SphwWavelet(Wavelet);

/// Opaque frame spectrum handle.
pub struct SphwSpectrum(FrameSpectrum);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Resolution = 4,
    NonConvergence = 5,
    SingularSpectrum = 6,
    BandLimit = 7,
    Degenerate = 8,
    TailUnbounded = 9,
    Io = 10,
    Internal = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphwVerdict {
    AdmissibleCandidate = 0,
    FailsUpper = 1,
    FailsLower = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn status_of(e: &Error) -> SphwStatus {
    match e {
        Error::Domain(_) => SphwStatus::Domain,
        Error::Resolution(_) | Error::Resampling(_) => SphwStatus::Resolution,
        Error::TailUnbounded(_) => SphwStatus::TailUnbounded,
        Error::NonConvergence { .. } => SphwStatus::NonConvergence,
        Error::SingularSpectrum { .. } => SphwStatus::SingularSpectrum,
        Error::Degenerate(_) => SphwStatus::Degenerate,
        Error::BandLimit(_) => SphwStatus::BandLimit,
        Error::Parse(_) => SphwStatus::InvalidArgument,
        Error::Io(_) => SphwStatus::Io,
    }
}

/// Runs `f`, recording errors and converting panics into `Internal`.
fn guard<F: FnOnce() -> Result<(), (SphwStatus, String)>>(f: F) -> SphwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SphwStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SphwStatus::Internal
        }
    }
}

fn lift(e: Error) -> (SphwStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SphwStatus, String) {
    (SphwStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SphwStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (SphwStatus::InvalidArgument, format!("`{what}` is not UTF-8")))
}

fn into_handle<T>(v: T, out: *mut *mut T) {
    unsafe { *out = Box::into_raw(Box::new(v)) };
}

/// Message of the last failed call on this thread, or null. Valid until the next failure.
#[no_mangle]
pub extern "C" fn sphw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn sphw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// One of `seed`, `canonical`, `constant`, `cosphi`, `zero`.
#[no_mangle]
pub unsafe extern "C" fn sphw_wavelet_builtin(name: *const c_char, out: *mut *mut SphwWavelet) -> SphwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let name = str_arg(name, "name")?;
        let w = builtin::by_name(name)
            .ok_or_else(|| (SphwStatus::InvalidArgument, format!("unknown wavelet `{name}`")))?;
        into_handle(SphwWavelet(w), out);
        Ok(())
    })
}

/// Axisymmetric wavelet `f(theta)` from an expression; `decay` may be null.
#[no_mangle]
pub unsafe extern "C" fn sphw_wavelet_from_expr(
    expr: *const c_char,
    decay: *const c_char,
    out: *mut *mut SphwWavelet,
) -> SphwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let expr = str_arg(expr, "expr")?;
        let decay = if decay.is_null() {
            DecayClass::Unknown
        } else {
            DecayClass::parse(str_arg(decay, "decay")?).map_err(lift)?
        };
        let cfg = Config {
            wavelet: "expr".into(),
            expr: Some(expr.to_string()),
            decay,
            ..Config::default()
        };
        into_handle(SphwWavelet(cfg.build_wavelet().map_err(lift)?), out);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn sphw_wavelet_free(w: *mut SphwWavelet) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Admissibility verdict, and optionally the full report as a JSON string
/// (release with [`sphw_string_free`]).
#[no_mangle]
pub unsafe extern "C" fn sphw_wavelet_check(
    w: *const SphwWavelet,
    verdict: *mut SphwVerdict,
    json: *mut *mut c_char,
) -> SphwStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("wavelet"))?;
        if verdict.is_null() {
            return Err(null("verdict"));
        }
        let r = full_report(&w.0);
        *verdict = match r.verdict {
            Verdict::AdmissibleCandidate => SphwVerdict::AdmissibleCandidate,
            Verdict::FailsUpper => SphwVerdict::FailsUpper,
            Verdict::FailsLower => SphwVerdict::FailsLower,
        };
        if !json.is_null() {
            *json = CString::new(r.to_json()).expect("json has no nul").into_raw();
        }
        Ok(())
    })
}

/// `G_0..G_lmax` on the log-scale grid `[b_min, b_max]` with `b_nodes` nodes.
#[no_mangle]
pub unsafe extern "C" fn sphw_spectrum_compute(
    w: *const SphwWavelet,
    l_max: usize,
    b_min: f64,
    b_max: f64,
    b_nodes: usize,
    out: *mut *mut SphwSpectrum,
) -> SphwStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("wavelet"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = ScaleGrid::new(b_min, b_max, b_nodes).map_err(lift)?;
        into_handle(SphwSpectrum(frame_spectrum(&w.0, l_max, &grid).map_err(lift)?), out);
        Ok(())
    })
}

/// Number of degrees in the spectrum (`l_max + 1`), 0 for null.
#[no_mangle]
pub unsafe extern "C" fn sphw_spectrum_len(s: *const SphwSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.0.g_values.len())
}

/// `G_l` and its error estimate; `error` may be null.
#[no_mangle]
pub unsafe extern "C" fn sphw_spectrum_value(
    s: *const SphwSpectrum,
    l: usize,
    value: *mut f64,
    error: *mut f64,
) -> SphwStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("spectrum"))?;
        if value.is_null() {
            return Err(null("value"));
        }
        let g = s.0.g_values.get(l).ok_or_else(|| {
            (SphwStatus::InvalidArgument, format!("degree {l} exceeds l_max {}", s.0.l_max))
        })?;
        *value = *g;
        if !error.is_null() {
            *error = s.0.error_estimates[l];
        }
        Ok(())
    })
}

/// Frame bounds `c = 8 pi^2 min G_l` and `C = 8 pi^2 max G_l`.
#[no_mangle]
pub unsafe extern "C" fn sphw_spectrum_bounds(s: *const SphwSpectrum, lower: *mut f64, upper: *mut f64) -> SphwStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("spectrum"))?;
        if lower.is_null() || upper.is_null() {
            return Err(null("bounds"));
        }
        *lower = s.0.lower_bound;
        *upper = s.0.upper_bound;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn sphw_spectrum_free(s: *mut SphwSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Legendre polynomial `P_l(x)` for `|x| <= 1`.
#[no_mangle]
pub unsafe extern "C" fn sphw_legendre_p(l: usize, x: f64, out: *mut f64) -> SphwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = specfun::legendre_p(l, x).map_err(lift)?;
        Ok(())
    })
}

/// Kernel `Q_l(x)` for `|x| <= 1`.
#[no_mangle]
pub unsafe extern "C" fn sphw_q_ell(l: usize, x: f64, out: *mut f64) -> SphwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = specfun::q_ell(l, x).map_err(lift)?;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn sphw_bessel_j0(x: f64) -> f64 {
    specfun::bessel_j0(x)
}
