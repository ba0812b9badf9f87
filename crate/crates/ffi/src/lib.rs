//! C ABI for `georot`.
//!
//! Fields and detection reports are opaque heap handles created and released
//! through this API. Every function returns a [`GeorotStatus`]; on failure a
//! message is kept per thread and can be read with
//! [`georot_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use georot::correlation::CorrelationError;
use georot::detector::DetectError;
use georot::fields::{Aabb, FieldError, LinearField, VectorField};
use georot::ga3::{GaError, UnitBivector};
use georot::{correlate_at_origin, detect, run_trials, DetectionConfig, DetectionReport};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeorotStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    ZeroField = 4,
    IncompatibleGrids = 5,
    Degenerate = 6,
    Internal = 7,
}

/// Opaque vector field.
pub struct GeorotField {
    inner: VectorField,
}

/// Opaque detection result.
pub struct GeorotReport {
    inner: DetectionReport,
}

/// Aggregate of a benchmark run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GeorotTrialStats {
    pub epsilon: f64,
    pub n_trials: usize,
    pub average_error: f64,
    pub max_error: f64,
    pub average_iterations: f64,
    pub n_nonconverged: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(GeorotStatus, String);

impl Failure {
    fn null(name: &str) -> Self {
        Failure(GeorotStatus::NullPointer, format!("{name} is null"))
    }

    fn invalid(msg: impl Into<String>) -> Self {
        Failure(GeorotStatus::InvalidArgument, msg.into())
    }
}

impl From<FieldError> for Failure {
    fn from(e: FieldError) -> Self {
        let status = match e {
            FieldError::Parse(_) | FieldError::Io(_) => GeorotStatus::ParseError,
            FieldError::ZeroField => GeorotStatus::ZeroField,
            _ => GeorotStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<CorrelationError> for Failure {
    fn from(e: CorrelationError) -> Self {
        let status = match e {
            CorrelationError::IncompatibleGrids => GeorotStatus::IncompatibleGrids,
            CorrelationError::ZeroField => GeorotStatus::ZeroField,
            CorrelationError::Algebra(_) => GeorotStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

impl From<DetectError> for Failure {
    fn from(e: DetectError) -> Self {
        let status = match &e {
            DetectError::InvalidConfig(_) => GeorotStatus::InvalidArgument,
            DetectError::ZeroField => GeorotStatus::ZeroField,
            DetectError::DegenerateCorrelation(_) => GeorotStatus::Degenerate,
            DetectError::Correlation(c) => return c.clone().into(),
            DetectError::Algebra(_) => GeorotStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

impl From<GaError> for Failure {
    fn from(e: GaError) -> Self {
        Failure(GeorotStatus::InvalidArgument, e.to_string())
    }
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GeorotStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            GeorotStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            GeorotStatus::Internal
        }
    }
}

unsafe fn field_ref<'a>(p: *const GeorotField, name: &str) -> Result<&'a VectorField, Failure> {
    p.as_ref().map(|f| &f.inner).ok_or_else(|| Failure::null(name))
}

unsafe fn read3(p: *const f64, name: &str) -> Result<[f64; 3], Failure> {
    if p.is_null() {
        return Err(Failure::null(name));
    }
    let s = std::slice::from_raw_parts(p, 3);
    Ok([s[0], s[1], s[2]])
}

fn boxed_field(out: *mut *mut GeorotField, field: VectorField) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null("out"));
    }
    unsafe { *out = Box::into_raw(Box::new(GeorotField { inner: field })) };
    Ok(())
}

/// Message for the last failed call on this thread, or null after a
/// successful one. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn georot_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a field from a nul-terminated JSON document.
///
/// # Safety
/// `json` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn georot_field_from_json(json: *const c_char, out: *mut *mut GeorotField) -> GeorotStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure::null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(GeorotStatus::ParseError, format!("json is not UTF-8: {e}")))?;
        boxed_field(out, VectorField::from_json(text)?)
    })
}

/// Linear field `x -> M x` on the box `[low, high)`. `matrix` is row-major.
///
/// # Safety
/// `matrix` must point to 9 doubles, `low` and `high` to 3 each.
#[no_mangle]
pub unsafe extern "C" fn georot_field_linear(
    matrix: *const f64,
    low: *const f64,
    high: *const f64,
    out: *mut *mut GeorotField,
) -> GeorotStatus {
    guard(|| {
        if matrix.is_null() {
            return Err(Failure::null("matrix"));
        }
        let m = std::slice::from_raw_parts(matrix, 9);
        let rows = [[m[0], m[1], m[2]], [m[3], m[4], m[5]], [m[6], m[7], m[8]]];
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Failure::invalid("matrix has non-finite entries"));
        }
        let support = Aabb::new(read3(low, "low")?, read3(high, "high")?)?;
        boxed_field(out, VectorField::Linear(LinearField::new(rows, support)))
    })
}

/// Releases a field. Null is ignored.
///
/// # Safety
/// `field` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn georot_field_free(field: *mut GeorotField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// New field with every value rotated by `angle` in the plane with
/// bivector components `plane = [e12, e13, e23]` (normalized internally).
///
/// # Safety
/// `field` must be a live handle, `plane` must point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn georot_field_rotate_outer(
    field: *const GeorotField,
    plane: *const f64,
    angle: f64,
    out: *mut *mut GeorotField,
) -> GeorotStatus {
    guard(|| {
        let f = field_ref(field, "field")?;
        let [a, b, c] = read3(plane, "plane")?;
        if !angle.is_finite() {
            return Err(Failure::invalid("angle must be finite"));
        }
        let plane = UnitBivector::new(a, b, c)?;
        boxed_field(out, f.rotate_outer(plane, angle))
    })
}

/// L2 norm of a field.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn georot_field_l2_norm(field: *const GeorotField, out: *mut f64) -> GeorotStatus {
    guard(|| {
        let f = field_ref(field, "field")?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        *out = f.l2_norm();
        Ok(())
    })
}

/// Correlation `integral reverse(A(x)) B(x) dx` as 8 coefficients in the
/// order `1, e1, e2, e3, e12, e13, e23, e123`.
///
/// # Safety
/// `a` and `b` must be live handles, `out` must point to 8 doubles.
#[no_mangle]
pub unsafe extern "C" fn georot_correlate(a: *const GeorotField, b: *const GeorotField, out: *mut f64) -> GeorotStatus {
    guard(|| {
        let (a, b) = (field_ref(a, "a")?, field_ref(b, "b")?);
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let m = correlate_at_origin(a, b)?;
        std::slice::from_raw_parts_mut(out, 8).copy_from_slice(&m.0);
        Ok(())
    })
}

/// Detects the rotation taking `reference` onto `pattern`. A run that does
/// not converge still returns `Ok`; check `georot_report_converged`.
///
/// # Safety
/// `reference` and `pattern` must be live handles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn georot_detect(
    reference: *const GeorotField,
    pattern: *const GeorotField,
    epsilon: f64,
    max_iterations: usize,
    out: *mut *mut GeorotReport,
) -> GeorotStatus {
    guard(|| {
        let (v, u) = (field_ref(reference, "reference")?, field_ref(pattern, "pattern")?);
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let cfg = DetectionConfig::with_epsilon(epsilon).max_iterations(max_iterations);
        let report = detect(v, u, &cfg)?;
        *out = Box::into_raw(Box::new(GeorotReport { inner: report }));
        Ok(())
    })
}

unsafe fn report_ref<'a>(p: *const GeorotReport) -> Result<&'a DetectionReport, Failure> {
    p.as_ref().map(|r| &r.inner).ok_or_else(|| Failure::null("report"))
}

/// Detected angle in `[0, pi]`.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn georot_report_alpha(report: *const GeorotReport, out: *mut f64) -> GeorotStatus {
    guard(|| {
        let r = report_ref(report)?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        *out = r.alpha;
        Ok(())
    })
}

/// Detected plane as `[e12, e13, e23]`.
///
/// # Safety
/// `report` must be a live handle, `out` must point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn georot_report_plane(report: *const GeorotReport, out: *mut f64) -> GeorotStatus {
    guard(|| {
        let r = report_ref(report)?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        std::slice::from_raw_parts_mut(out, 3).copy_from_slice(&r.plane.components());
        Ok(())
    })
}

/// Number of rounds run.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn georot_report_iterations(report: *const GeorotReport, out: *mut usize) -> GeorotStatus {
    guard(|| {
        let r = report_ref(report)?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        *out = r.iterations;
        Ok(())
    })
}

/// Whether the stopping threshold was reached.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn georot_report_converged(report: *const GeorotReport, out: *mut bool) -> GeorotStatus {
    guard(|| {
        let r = report_ref(report)?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        *out = r.converged;
        Ok(())
    })
}

/// Copy of the corrected pattern as a new field handle.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn georot_report_corrected_pattern(
    report: *const GeorotReport,
    out: *mut *mut GeorotField,
) -> GeorotStatus {
    guard(|| {
        let r = report_ref(report)?;
        boxed_field(out, r.corrected_pattern.clone())
    })
}

/// Releases a report. Null is ignored.
///
/// # Safety
/// `report` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn georot_report_free(report: *mut GeorotReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Runs `n_trials` random linear-field trials at `epsilon`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn georot_run_trials(
    n_trials: usize,
    epsilon: f64,
    seed: u64,
    out: *mut GeorotTrialStats,
) -> GeorotStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        if n_trials == 0 {
            return Err(Failure::invalid("n_trials must be at least 1"));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Failure::invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        let s = run_trials(n_trials, epsilon, seed);
        *out = GeorotTrialStats {
            epsilon: s.epsilon,
            n_trials: s.n_trials,
            average_error: s.average_error,
            max_error: s.max_error,
            average_iterations: s.average_iterations,
            n_nonconverged: s.n_nonconverged,
        };
        Ok(())
    })
}
