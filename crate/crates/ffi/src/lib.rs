//! C ABI for the qident engine.
//!
//! Conventions:
//!
//! - Opaque handles (`QidentSeries*`) own their Rust value; release them
//!   with the matching `..._free` function.
//! - Every fallible call returns a status code: 0 success, 1 a well-formed
//!   mathematical failure (mismatch, infeasible fit, counterexample), 2
//!   invalid input, 3 internal error. The same contract as the CLI exit
//!   codes.
//! - Strings returned through out-parameters are NUL-terminated, allocated
//!   by this library, and must be released with `qident_string_free`.
//! - On any non-zero status, `qident_last_error` returns a description of
//!   the most recent failure on the calling thread.
//!
//! The matching header is `include/qident.h`; a unit test keeps the two in
//! sync symbol by symbol.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qident::etasolve::{fit_eta_quotient, FitResult};
use qident::registry::{self, builtin_registry, CongruenceCheck, Verification};
use qident::series::Series;

pub const QIDENT_OK: i32 = 0;
pub const QIDENT_MATH_FAIL: i32 = 1;
pub const QIDENT_INVALID: i32 = 2;
pub const QIDENT_INTERNAL: i32 = 3;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let owned = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(owned).expect("NUL bytes stripped"));
    });
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn alloc_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("NUL bytes stripped")
        .into_raw()
}

/// Runs a closure with panic containment; panics become QIDENT_INTERNAL.
fn guarded(f: impl FnOnce() -> i32) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            QIDENT_INTERNAL
        }
    }
}

unsafe fn cstr_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, String> {
    if ptr.is_null() {
        return Err(format!("{name} is NULL"));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| format!("{name} is not valid UTF-8"))
}

/// Opaque series handle.
pub struct QidentSeries {
    inner: Series,
}

/// Library version string; static storage, do not free.
#[no_mangle]
pub extern "C" fn qident_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread, or NULL when the
/// last call succeeded. Free with `qident_string_free`.
#[no_mangle]
pub extern "C" fn qident_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Releases a string allocated by this library. NULL is a no-op.
#[no_mangle]
pub extern "C" fn qident_string_free(ptr: *mut c_char) {
    if !ptr.is_null() {
        unsafe {
            drop(CString::from_raw(ptr));
        }
    }
}

/// Expands a DSL expression (e.g. "eta(5)^5/eta(1)") to `order`
/// coefficients. On success writes a new handle to `out`.
#[no_mangle]
pub extern "C" fn qident_series_expand(
    expr: *const c_char,
    order: u32,
    out: *mut *mut QidentSeries,
) -> i32 {
    guarded(|| {
        clear_error();
        if out.is_null() {
            set_error("out is NULL");
            return QIDENT_INVALID;
        }
        let text = match unsafe { cstr_arg(expr, "expr") } {
            Ok(t) => t,
            Err(e) => {
                set_error(e);
                return QIDENT_INVALID;
            }
        };
        if order < 1 {
            set_error("order must be at least 1");
            return QIDENT_INVALID;
        }
        match qident::dsl::eval_str(text, order as usize) {
            Ok(series) => {
                let handle = Box::new(QidentSeries { inner: series });
                unsafe { *out = Box::into_raw(handle) };
                QIDENT_OK
            }
            Err(e) => {
                set_error(e.to_string());
                QIDENT_INVALID
            }
        }
    })
}

/// Truncation order (coefficient count) of a series handle; 0 for NULL.
#[no_mangle]
pub extern "C" fn qident_series_order(series: *const QidentSeries) -> u32 {
    if series.is_null() {
        return 0;
    }
    unsafe { &*series }.inner.order() as u32
}

/// Writes the coefficient of q^index as a decimal string ("8" or "-3/2").
#[no_mangle]
pub extern "C" fn qident_series_coeff(
    series: *const QidentSeries,
    index: u32,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        clear_error();
        if series.is_null() || out.is_null() {
            set_error("series or out is NULL");
            return QIDENT_INVALID;
        }
        let s = unsafe { &*series };
        match s.inner.coefficient(index as usize) {
            Ok(_) => {
                let text = s.inner.coeff_strings()[index as usize].clone();
                unsafe { *out = alloc_string(text) };
                QIDENT_OK
            }
            Err(e) => {
                set_error(e.to_string());
                QIDENT_INVALID
            }
        }
    })
}

/// Writes all coefficients as a JSON array of decimal strings.
#[no_mangle]
pub extern "C" fn qident_series_json(series: *const QidentSeries, out: *mut *mut c_char) -> i32 {
    guarded(|| {
        clear_error();
        if series.is_null() || out.is_null() {
            set_error("series or out is NULL");
            return QIDENT_INVALID;
        }
        let s = unsafe { &*series };
        unsafe { *out = alloc_string(s.inner.to_json()) };
        QIDENT_OK
    })
}

/// Releases a series handle. NULL is a no-op.
#[no_mangle]
pub extern "C" fn qident_series_free(series: *mut QidentSeries) {
    if !series.is_null() {
        unsafe {
            drop(Box::from_raw(series));
        }
    }
}

/// Verifies a built-in identity coefficientwise at the given order.
/// Returns QIDENT_OK when verified; QIDENT_MATH_FAIL with the first
/// differing index written to `mismatch_index` (when non-NULL) on mismatch;
/// QIDENT_INVALID for an unknown id.
#[no_mangle]
pub extern "C" fn qident_verify_id(
    id: *const c_char,
    order: u32,
    mismatch_index: *mut i64,
) -> i32 {
    guarded(|| {
        clear_error();
        let id = match unsafe { cstr_arg(id, "id") } {
            Ok(t) => t,
            Err(e) => {
                set_error(e);
                return QIDENT_INVALID;
            }
        };
        if order < 1 {
            set_error("order must be at least 1");
            return QIDENT_INVALID;
        }
        let entries = builtin_registry();
        let Some(entry) = registry::lookup(&entries, id) else {
            set_error(format!("unknown identity id {id:?}"));
            return QIDENT_INVALID;
        };
        match registry::verify(entry, order as usize) {
            Ok(Verification::Verified) => QIDENT_OK,
            Ok(Verification::Mismatch { index, lhs, rhs }) => {
                if !mismatch_index.is_null() {
                    unsafe { *mismatch_index = index as i64 };
                }
                set_error(format!(
                    "mismatch at index {index}: lhs = {lhs}, rhs = {rhs}"
                ));
                QIDENT_MATH_FAIL
            }
            Err(e) => {
                set_error(e.to_string());
                QIDENT_INTERNAL
            }
        }
    })
}

/// Number of built-in identities.
#[no_mangle]
pub extern "C" fn qident_registry_len() -> u32 {
    builtin_registry().len() as u32
}

/// Writes the id of the built-in identity at `index` (0-based).
#[no_mangle]
pub extern "C" fn qident_registry_id(index: u32, out: *mut *mut c_char) -> i32 {
    guarded(|| {
        clear_error();
        if out.is_null() {
            set_error("out is NULL");
            return QIDENT_INVALID;
        }
        let entries = builtin_registry();
        match entries.get(index as usize) {
            Some(e) => {
                unsafe { *out = alloc_string(e.id.clone()) };
                QIDENT_OK
            }
            None => {
                set_error(format!("registry index {index} out of range"));
                QIDENT_INVALID
            }
        }
    })
}

/// Fits eta-quotient exponents to a DSL expression expanded at `order`,
/// over the candidate `periods` (ascending). Writes a JSON report either
/// way; returns QIDENT_MATH_FAIL when the fit is infeasible.
#[no_mangle]
pub extern "C" fn qident_fit(
    expr: *const c_char,
    periods: *const u32,
    periods_len: usize,
    order: u32,
    out_json: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        clear_error();
        if out_json.is_null() || (periods.is_null() && periods_len > 0) {
            set_error("out_json or periods is NULL");
            return QIDENT_INVALID;
        }
        let text = match unsafe { cstr_arg(expr, "expr") } {
            Ok(t) => t,
            Err(e) => {
                set_error(e);
                return QIDENT_INVALID;
            }
        };
        let periods: Vec<usize> = unsafe { std::slice::from_raw_parts(periods, periods_len) }
            .iter()
            .map(|&p| p as usize)
            .collect();
        let target = match qident::dsl::eval_str(text, order as usize) {
            Ok(s) => s,
            Err(e) => {
                set_error(e.to_string());
                return QIDENT_INVALID;
            }
        };
        match fit_eta_quotient(&target, &periods) {
            Ok(result) => {
                unsafe { *out_json = alloc_string(result.to_json(order as usize)) };
                match result {
                    FitResult::Fitted(_) => QIDENT_OK,
                    FitResult::Infeasible(reason) => {
                        set_error(format!("fit infeasible: {reason:?}"));
                        QIDENT_MATH_FAIL
                    }
                }
            }
            Err(e) => {
                set_error(e.to_string());
                QIDENT_INVALID
            }
        }
    })
}

/// Scans p(modulus*n + residue) = 0 (mod modulus) for n = 0..count-1.
/// On a counterexample writes the offending n (when non-NULL) and returns
/// QIDENT_MATH_FAIL.
#[no_mangle]
pub extern "C" fn qident_partition_congruence(
    modulus: u64,
    residue: u64,
    count: u64,
    counterexample_n: *mut i64,
) -> i32 {
    guarded(|| {
        clear_error();
        if modulus < 2 || residue >= modulus || count < 1 {
            set_error("require modulus >= 2, residue < modulus, count >= 1");
            return QIDENT_INVALID;
        }
        match registry::check_partition_congruence(modulus, residue, count as usize) {
            CongruenceCheck::Verified => QIDENT_OK,
            CongruenceCheck::Counterexample { n, value } => {
                if !counterexample_n.is_null() {
                    unsafe { *counterexample_n = n as i64 };
                }
                set_error(format!("counterexample at n = {n}: p = {value}"));
                QIDENT_MATH_FAIL
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn take_string(ptr: *mut c_char) -> String {
        assert!(!ptr.is_null());
        let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
        qident_string_free(ptr);
        s
    }

    #[test]
    fn expand_and_read_coefficients() {
        let expr = CString::new("eta(5)^5/eta(1)").unwrap();
        let mut handle: *mut QidentSeries = std::ptr::null_mut();
        assert_eq!(qident_series_expand(expr.as_ptr(), 5, &mut handle), QIDENT_OK);
        assert_eq!(qident_series_order(handle), 5);
        let mut out: *mut c_char = std::ptr::null_mut();
        assert_eq!(qident_series_coeff(handle, 4, &mut out), QIDENT_OK);
        assert_eq!(take_string(out), "5");
        let mut json: *mut c_char = std::ptr::null_mut();
        assert_eq!(qident_series_json(handle, &mut json), QIDENT_OK);
        assert_eq!(take_string(json), r#"["1","1","2","3","5"]"#);
        // Out-of-range coefficient is an error, never silently zero.
        let mut bad: *mut c_char = std::ptr::null_mut();
        assert_eq!(qident_series_coeff(handle, 5, &mut bad), QIDENT_INVALID);
        let msg = take_string(qident_last_error());
        assert!(msg.contains("out of range"), "{msg}");
        qident_series_free(handle);
    }

    #[test]
    fn expand_rejects_bad_input() {
        let expr = CString::new("lambert3(kron(-4)").unwrap();
        let mut handle: *mut QidentSeries = std::ptr::null_mut();
        assert_eq!(
            qident_series_expand(expr.as_ptr(), 8, &mut handle),
            QIDENT_INVALID
        );
        let msg = take_string(qident_last_error());
        assert!(msg.contains("byte 17"), "{msg}");
        assert_eq!(
            qident_series_expand(std::ptr::null(), 8, &mut handle),
            QIDENT_INVALID
        );
    }

    #[test]
    fn verify_paths() {
        let ok = CString::new("beta3_q").unwrap();
        assert_eq!(qident_verify_id(ok.as_ptr(), 64, std::ptr::null_mut()), QIDENT_OK);
        assert!(qident_last_error().is_null());
        let missing = CString::new("nope").unwrap();
        let mut idx: i64 = -1;
        assert_eq!(qident_verify_id(missing.as_ptr(), 64, &mut idx), QIDENT_INVALID);
    }

    #[test]
    fn registry_enumeration() {
        let n = qident_registry_len();
        assert!(n >= 15);
        let mut out: *mut c_char = std::ptr::null_mut();
        assert_eq!(qident_registry_id(0, &mut out), QIDENT_OK);
        assert_eq!(take_string(out), "beta3_q");
        assert_eq!(qident_registry_id(n, &mut out), QIDENT_INVALID);
    }

    #[test]
    fn fit_through_the_abi() {
        let expr = CString::new("divser(kron(-4),2)").unwrap();
        let periods = [1u32, 2, 4];
        let mut json: *mut c_char = std::ptr::null_mut();
        let code = qident_fit(expr.as_ptr(), periods.as_ptr(), periods.len(), 200, &mut json);
        assert_eq!(code, QIDENT_OK);
        let text = take_string(json);
        assert!(text.contains(r#""exponents":{"1":-4,"2":6,"4":4}"#), "{text}");
        // Wrong level: math failure with a report.
        let periods = [1u32, 3];
        let mut json: *mut c_char = std::ptr::null_mut();
        let code = qident_fit(expr.as_ptr(), periods.as_ptr(), periods.len(), 200, &mut json);
        assert_eq!(code, QIDENT_MATH_FAIL);
        let text = take_string(json);
        assert!(text.contains(r#""reason":"no-solution""#), "{text}");
    }

    #[test]
    fn partition_congruence_paths() {
        assert_eq!(
            qident_partition_congruence(5, 4, 100, std::ptr::null_mut()),
            QIDENT_OK
        );
        let mut n: i64 = -1;
        assert_eq!(qident_partition_congruence(5, 3, 100, &mut n), QIDENT_MATH_FAIL);
        assert_eq!(n, 0);
        assert_eq!(
            qident_partition_congruence(1, 0, 100, std::ptr::null_mut()),
            QIDENT_INVALID
        );
    }

    #[test]
    fn version_is_nul_terminated_static() {
        let v = unsafe { CStr::from_ptr(qident_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn header_covers_every_exported_symbol() {
        let header = include_str!("../include/qident.h");
        let source = include_str!("lib.rs");
        for line in source.lines() {
            if let Some(rest) = line.trim().strip_prefix("pub extern \"C\" fn ") {
                let name = rest.split('(').next().unwrap().trim();
                assert!(
                    header.contains(name),
                    "exported symbol {name} missing from include/qident.h"
                );
            }
        }
    }
}
