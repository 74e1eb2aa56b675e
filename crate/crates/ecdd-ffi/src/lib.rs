//! C ABI for the ecdd detector.
//!
//! Tables and detectors are opaque handles created and freed here; every
//! fallible call returns an `ECDD_*` status code (negative on failure), with
//! results written through out-pointers. Warning-buffer payloads cross the
//! boundary as caller-chosen `uint64_t` tags. The matching declarations live
//! in `include/ecdd.h`, which is maintained by hand and checked against the
//! exported symbols by this crate's tests.

use std::ffi::{c_char, c_int, CStr, CString};
use std::path::Path;
use std::ptr;

use ecdd::calibration::CalibrationTable;
use ecdd::detector::{Detector, DetectorConfig, DetectorStatus};
use ecdd::error::EcddError;

/// Success.
pub const ECDD_OK: c_int = 0;
/// Invalid configuration value.
pub const ECDD_ERR_CONFIG: c_int = -1;
/// No calibration entry for the requested (lambda, arl0).
pub const ECDD_ERR_MISSING_ENTRY: c_int = -2;
/// Invalid input value (error bit outside {0,1}, domain violations).
pub const ECDD_ERR_INPUT: c_int = -3;
/// Call not permitted in the current state (step after drift).
pub const ECDD_ERR_USAGE: c_int = -4;
/// I/O failure.
pub const ECDD_ERR_IO: c_int = -5;
/// Parse failure (table files, snapshots).
pub const ECDD_ERR_PARSE: c_int = -6;
/// Search or fit failure.
pub const ECDD_ERR_SEARCH: c_int = -7;
/// A required pointer argument was null.
pub const ECDD_ERR_NULL: c_int = -8;

/// Chart status codes returned by `ecdd_detector_step`.
pub const ECDD_IN_CONTROL: c_int = 0;
pub const ECDD_WARNING: c_int = 1;
pub const ECDD_DRIFT: c_int = 2;

/// Opaque calibration table handle.
pub struct EcddTable(CalibrationTable);

/// Opaque detector handle; payloads are u64 tags.
pub struct EcddDetector(Detector<u64>);

fn error_code(err: &EcddError) -> c_int {
    match err {
        EcddError::Config(_) => ECDD_ERR_CONFIG,
        EcddError::MissingEntry { .. } => ECDD_ERR_MISSING_ENTRY,
        EcddError::Input(_) | EcddError::Malformed { .. } => ECDD_ERR_INPUT,
        EcddError::Usage(_) => ECDD_ERR_USAGE,
        EcddError::Io { .. } => ECDD_ERR_IO,
        EcddError::Parse(_) => ECDD_ERR_PARSE,
        EcddError::Search(_) | EcddError::Fit(_) => ECDD_ERR_SEARCH,
    }
}

fn status_code(status: DetectorStatus) -> c_int {
    match status {
        DetectorStatus::InControl => ECDD_IN_CONTROL,
        DetectorStatus::Warning => ECDD_WARNING,
        DetectorStatus::Drift => ECDD_DRIFT,
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn ecdd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// The bundled fitted calibration table. Never fails.
#[no_mangle]
pub extern "C" fn ecdd_table_builtin() -> *mut EcddTable {
    Box::into_raw(Box::new(EcddTable(CalibrationTable::builtin())))
}

/// The published reference polynomials for lambda = 0.2.
#[no_mangle]
pub extern "C" fn ecdd_table_paper_lambda02() -> *mut EcddTable {
    Box::into_raw(Box::new(EcddTable(CalibrationTable::paper_lambda02())))
}

/// Load a calibration table file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecdd_table_load(path: *const c_char, out: *mut *mut EcddTable) -> c_int {
    if path.is_null() || out.is_null() {
        return ECDD_ERR_NULL;
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(s) => s,
        Err(_) => return ECDD_ERR_INPUT,
    };
    match CalibrationTable::load(Path::new(path)) {
        Ok(table) => {
            *out = Box::into_raw(Box::new(EcddTable(table)));
            ECDD_OK
        }
        Err(e) => {
            *out = ptr::null_mut();
            error_code(&e)
        }
    }
}

/// # Safety
/// `table` must be a handle from this library, not yet freed; null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ecdd_table_free(table: *mut EcddTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Create a detector for `(lambda, arl0)` backed by `table`.
///
/// `warning_fraction` is typically 0.5; `min_observations` suppresses drift
/// flags during burn-in (0 disables). The calibration entry is copied, so the
/// table may be freed afterwards.
///
/// # Safety
/// `table` must be a live table handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecdd_detector_new(
    table: *const EcddTable,
    lambda: f64,
    arl0: f64,
    warning_fraction: f64,
    min_observations: u64,
    out: *mut *mut EcddDetector,
) -> c_int {
    if table.is_null() || out.is_null() {
        return ECDD_ERR_NULL;
    }
    let config = DetectorConfig {
        lambda,
        target_arl0: arl0,
        warning_fraction,
        min_observations,
        warning_buffer_cap: None,
    };
    match Detector::new(config, &(*table).0) {
        Ok(det) => {
            *out = Box::into_raw(Box::new(EcddDetector(det)));
            ECDD_OK
        }
        Err(e) => {
            *out = ptr::null_mut();
            error_code(&e)
        }
    }
}

/// # Safety
/// `detector` must be a handle from this library, not yet freed; null is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn ecdd_detector_free(detector: *mut EcddDetector) {
    if !detector.is_null() {
        drop(Box::from_raw(detector));
    }
}

/// Advance the chart by one error bit (0 or 1). Returns a status code
/// (`ECDD_IN_CONTROL`, `ECDD_WARNING`, `ECDD_DRIFT`) or a negative error.
///
/// # Safety
/// `detector` must be a live detector handle.
#[no_mangle]
pub unsafe extern "C" fn ecdd_detector_step(detector: *mut EcddDetector, error_bit: c_int) -> c_int {
    ecdd_detector_step_tagged(detector, error_bit, 0)
}

/// Like `ecdd_detector_step`, but the observation carries a caller tag that
/// is buffered while the warning condition holds and returned by
/// `ecdd_detector_reset` for retraining.
///
/// # Safety
/// `detector` must be a live detector handle.
#[no_mangle]
pub unsafe extern "C" fn ecdd_detector_step_tagged(
    detector: *mut EcddDetector,
    error_bit: c_int,
    tag: u64,
) -> c_int {
    if detector.is_null() {
        return ECDD_ERR_NULL;
    }
    if !(0..=1).contains(&error_bit) {
        return ECDD_ERR_INPUT;
    }
    match (*detector).0.step(error_bit as u8, Some(tag)) {
        Ok(status) => status_code(status),
        Err(e) => error_code(&e),
    }
}

/// Reset the detector to its initial state, draining buffered tags.
///
/// Up to `tags_cap` drained tags are written to `tags_out` (oldest first);
/// `out_count` receives the number drained (before capping). Both pointers
/// may be null when the tags are not wanted.
///
/// # Safety
/// `detector` must be a live detector handle; `tags_out`, when non-null, must
/// point to at least `tags_cap` writable u64 slots.
#[no_mangle]
pub unsafe extern "C" fn ecdd_detector_reset(
    detector: *mut EcddDetector,
    tags_out: *mut u64,
    tags_cap: usize,
    out_count: *mut usize,
) -> c_int {
    if detector.is_null() {
        return ECDD_ERR_NULL;
    }
    let drained = (*detector).0.reset();
    if !out_count.is_null() {
        *out_count = drained.len();
    }
    if !tags_out.is_null() {
        for (i, tag) in drained.iter().take(tags_cap).enumerate() {
            *tags_out.add(i) = *tag;
        }
    }
    ECDD_OK
}

/// Observation count since the last reset.
///
/// # Safety
/// `detector` must be a live detector handle.
#[no_mangle]
pub unsafe extern "C" fn ecdd_detector_t(detector: *const EcddDetector) -> u64 {
    if detector.is_null() {
        return 0;
    }
    (*detector).0.state().t
}

/// Current EWMA estimate `Z_t`.
///
/// # Safety
/// `detector` must be a live detector handle.
#[no_mangle]
pub unsafe extern "C" fn ecdd_detector_z(detector: *const EcddDetector) -> f64 {
    if detector.is_null() {
        return f64::NAN;
    }
    (*detector).0.state().z
}

/// Running estimate of the pre-change error rate.
///
/// # Safety
/// `detector` must be a live detector handle.
#[no_mangle]
pub unsafe extern "C" fn ecdd_detector_p_hat(detector: *const EcddDetector) -> f64 {
    if detector.is_null() {
        return f64::NAN;
    }
    (*detector).0.state().p_hat
}

/// Plug-in EWMA standard deviation estimate.
///
/// # Safety
/// `detector` must be a live detector handle.
#[no_mangle]
pub unsafe extern "C" fn ecdd_detector_sigma_z(detector: *const EcddDetector) -> f64 {
    if detector.is_null() {
        return f64::NAN;
    }
    (*detector).0.state().sigma_z
}

/// Control limit at the current error-rate estimate.
///
/// # Safety
/// `detector` must be a live detector handle.
#[no_mangle]
pub unsafe extern "C" fn ecdd_detector_limit(detector: *const EcddDetector) -> f64 {
    if detector.is_null() {
        return f64::NAN;
    }
    (*detector).0.limit()
}

/// Last status as a status code.
///
/// # Safety
/// `detector` must be a live detector handle.
#[no_mangle]
pub unsafe extern "C" fn ecdd_detector_status(detector: *const EcddDetector) -> c_int {
    if detector.is_null() {
        return ECDD_ERR_NULL;
    }
    status_code((*detector).0.state().status)
}

/// Serialize the detector to a JSON snapshot. The returned string must be
/// freed with `ecdd_string_free`; null on failure.
///
/// # Safety
/// `detector` must be a live detector handle.
#[no_mangle]
pub unsafe extern "C" fn ecdd_detector_snapshot_json(
    detector: *const EcddDetector,
) -> *mut c_char {
    if detector.is_null() {
        return ptr::null_mut();
    }
    let json = (*detector).0.snapshot_json();
    CString::new(json).map_or(ptr::null_mut(), CString::into_raw)
}

/// Rebuild a detector from a JSON snapshot against `table`.
///
/// # Safety
/// `table` must be a live table handle, `json` a valid NUL-terminated string,
/// and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecdd_detector_restore_json(
    table: *const EcddTable,
    json: *const c_char,
    out: *mut *mut EcddDetector,
) -> c_int {
    if table.is_null() || json.is_null() || out.is_null() {
        return ECDD_ERR_NULL;
    }
    let json = match CStr::from_ptr(json).to_str() {
        Ok(s) => s,
        Err(_) => return ECDD_ERR_INPUT,
    };
    match Detector::restore_json(json, &(*table).0) {
        Ok(det) => {
            *out = Box::into_raw(Box::new(EcddDetector(det)));
            ECDD_OK
        }
        Err(e) => {
            *out = ptr::null_mut();
            error_code(&e)
        }
    }
}

/// EWMA standard deviation after `t` observations of a Bernoulli(`p`) stream;
/// NaN on domain violations.
#[no_mangle]
pub extern "C" fn ecdd_ewma_sigma(p: f64, lambda: f64, t: u64) -> f64 {
    ecdd::detector::ewma_sigma(p, lambda, t).unwrap_or(f64::NAN)
}

/// Free a string returned by this library.
///
/// # Safety
/// `s` must have been returned by `ecdd_detector_snapshot_json` and not yet
/// freed; null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ecdd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
