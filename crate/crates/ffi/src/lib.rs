//! C ABI over `chebband`.
//!
//! Handles are opaque and owned by the caller once returned; every handle
//! has a matching `_free`. Fallible calls return a [`ChebbandStatus`] and
//! write results through out-pointers; the message of the last failure on
//! the calling thread is available from [`chebband_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chebband::asymptotics::AsymptoticModel;
use chebband::potential::PotentialTable;
use chebband::remez::{minimax_monic, RemezConfig, RemezResult};
use chebband::szego::{SzegoData, Weight};
use chebband::{Error, IntervalSystem};

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChebbandStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidSystem = 3,
    InvalidWeight = 4,
    Numerical = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Interval system with its potential table and weight.
pub struct ChebbandSystem {
    table: PotentialTable,
    weight: Weight,
    szego: SzegoData,
}

/// Result of a Remez run.
pub struct ChebbandRemez {
    result: RemezResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut e = e.borrow_mut();
        e.clear();
        e.extend(msg.bytes().filter(|b| *b != 0));
    });
}

fn status_of(e: &Error) -> ChebbandStatus {
    match e {
        Error::InvalidSystem(_) => ChebbandStatus::InvalidSystem,
        Error::InvalidWeight(_) => ChebbandStatus::InvalidWeight,
        Error::InvalidArgument(_) | Error::OnSet(_) | Error::OutsideDomain(_) => ChebbandStatus::InvalidArgument,
        _ => ChebbandStatus::Numerical,
    }
}

fn guard<F: FnOnce() -> Result<(), ChebbandStatus>>(f: F) -> ChebbandStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ChebbandStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            ChebbandStatus::Panic
        }
    }
}

fn fail(e: Error) -> ChebbandStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null(what: &str) -> ChebbandStatus {
    set_error(&format!("null pointer: {what}"));
    ChebbandStatus::NullPointer
}

/// Copies the last error message of this thread into `buf` with a
/// terminating NUL. Returns the message length without the NUL; when that
/// is at least `len` the message was truncated.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn chebband_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = e.len().min(len - 1);
            ptr::copy_nonoverlapping(e.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        e.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn chebband_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds a system from `2l` increasing endpoints and an optional weight
/// in JSON (`NULL` for the unit weight).
///
/// # Safety
/// `endpoints` must be valid for `len` reads, `weight_json` null or a
/// NUL-terminated string, `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn chebband_system_new(
    endpoints: *const f64,
    len: usize,
    weight_json: *const c_char,
    out: *mut *mut ChebbandSystem,
) -> ChebbandStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if endpoints.is_null() {
            return Err(null("endpoints"));
        }
        let a = std::slice::from_raw_parts(endpoints, len);
        let sys = IntervalSystem::new(a).map_err(fail)?;
        let weight = if weight_json.is_null() {
            Weight::Unit
        } else {
            let text = CStr::from_ptr(weight_json).to_str().map_err(|_| {
                set_error("weight JSON is not UTF-8");
                ChebbandStatus::InvalidWeight
            })?;
            serde_json::from_str(text).map_err(|e| {
                set_error(&format!("weight JSON: {e}"));
                ChebbandStatus::InvalidWeight
            })?
        };
        let table = PotentialTable::new(&sys).map_err(fail)?;
        let szego = SzegoData::new(&table, &weight).map_err(fail)?;
        *out = Box::into_raw(Box::new(ChebbandSystem { table, weight, szego }));
        Ok(())
    })
}

/// Releases a system; null is ignored.
///
/// # Safety
/// `sys` must be null or a handle from [`chebband_system_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chebband_system_free(sys: *mut ChebbandSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Number of bands `l`, or 0 for a null handle.
///
/// # Safety
/// `sys` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chebband_system_bands(sys: *const ChebbandSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.table.l())
}

/// # Safety
/// `sys` must be null or a live handle, `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn chebband_system_capacity(sys: *const ChebbandSystem, out: *mut f64) -> ChebbandStatus {
    guard(|| {
        let s = sys.as_ref().ok_or_else(|| null("sys"))?;
        let o = out.as_mut().ok_or_else(|| null("out"))?;
        *o = s.table.capacity();
        Ok(())
    })
}

unsafe fn write_slice(src: &[f64], out: *mut f64, len: usize) -> Result<(), ChebbandStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    if len < src.len() {
        set_error(&format!("buffer holds {len} values, {} needed", src.len()));
        return Err(ChebbandStatus::BufferTooSmall);
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

/// Harmonic measures `ω_k(∞)` into `out[0..l]`.
///
/// # Safety
/// `sys` must be null or a live handle, `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn chebband_system_omega_inf(
    sys: *const ChebbandSystem,
    out: *mut f64,
    len: usize,
) -> ChebbandStatus {
    guard(|| {
        let s = sys.as_ref().ok_or_else(|| null("sys"))?;
        write_slice(s.table.omega_inf(), out, len)
    })
}

/// Predicted `‖M̂_n/W‖_E` and the gap points `c_j` (`l − 1` values; gap
/// ends are reported as the endpoint). `gap_points` may be null.
///
/// # Safety
/// `sys` must be null or a live handle, `deviation` valid for one write,
/// `gap_points` null or valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn chebband_predict(
    sys: *const ChebbandSystem,
    n: usize,
    deviation: *mut f64,
    gap_points: *mut f64,
    len: usize,
) -> ChebbandStatus {
    guard(|| {
        let s = sys.as_ref().ok_or_else(|| null("sys"))?;
        let d = deviation.as_mut().ok_or_else(|| null("deviation"))?;
        if n == 0 {
            return Err(fail(Error::InvalidArgument("n must be at least 1".into())));
        }
        let model = AsymptoticModel::new(&s.szego, n).map_err(fail)?;
        if !gap_points.is_null() {
            write_slice(&model.solution().c, gap_points, len)?;
        }
        *d = model.predict_deviation().map_err(fail)?;
        Ok(())
    })
}

/// Weighted monic minimax polynomial of degree `n`; `tol <= 0` selects the
/// default tolerance.
///
/// # Safety
/// `sys` must be null or a live handle, `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn chebband_remez_new(
    sys: *const ChebbandSystem,
    n: usize,
    tol: f64,
    out: *mut *mut ChebbandRemez,
) -> ChebbandStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let s = sys.as_ref().ok_or_else(|| null("sys"))?;
        let mut cfg = RemezConfig::default();
        if tol > 0.0 {
            cfg.tol = tol;
        }
        let result =
            minimax_monic(s.table.system(), &s.weight, n, s.table.omega_inf(), &cfg).map_err(fail)?;
        *out = Box::into_raw(Box::new(ChebbandRemez { result }));
        Ok(())
    })
}

/// # Safety
/// `r` must be null or a handle from [`chebband_remez_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chebband_remez_free(r: *mut ChebbandRemez) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Minimum deviation, lower bound and convergence flag.
///
/// # Safety
/// `r` must be null or a live handle; out-pointers valid for one write or null.
#[no_mangle]
pub unsafe extern "C" fn chebband_remez_deviation(
    r: *const ChebbandRemez,
    deviation: *mut f64,
    lower_bound: *mut f64,
    converged: *mut bool,
) -> ChebbandStatus {
    guard(|| {
        let r = &r.as_ref().ok_or_else(|| null("remez"))?.result;
        let d = deviation.as_mut().ok_or_else(|| null("deviation"))?;
        *d = r.deviation;
        if let Some(v) = lower_bound.as_mut() {
            *v = r.vp_lower;
        }
        if let Some(c) = converged.as_mut() {
            *c = r.converged;
        }
        Ok(())
    })
}

/// `M̂_n(x)`.
///
/// # Safety
/// `r` must be null or a live handle, `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn chebband_remez_eval(r: *const ChebbandRemez, x: f64, out: *mut f64) -> ChebbandStatus {
    guard(|| {
        let r = &r.as_ref().ok_or_else(|| null("remez"))?.result;
        let o = out.as_mut().ok_or_else(|| null("out"))?;
        *o = r.eval(x);
        Ok(())
    })
}

/// Number of Remez zeros in band `k` into `out`.
///
/// # Safety
/// `r` must be null or a live handle, `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn chebband_remez_zeros_per_band(
    r: *const ChebbandRemez,
    out: *mut usize,
    len: usize,
) -> ChebbandStatus {
    guard(|| {
        let r = &r.as_ref().ok_or_else(|| null("remez"))?.result;
        if out.is_null() {
            return Err(null("out"));
        }
        let z = &r.zeros_per_band;
        if len < z.len() {
            set_error(&format!("buffer holds {len} values, {} needed", z.len()));
            return Err(ChebbandStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(z.as_ptr(), out, z.len());
        Ok(())
    })
}
