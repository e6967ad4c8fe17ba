//! C ABI for the negcurv detector.
//!
//! Matrices and results are opaque heap handles released with their `_free`
//! function. Every fallible call returns a [`NegcurvCode`]; on failure a
//! message for the calling thread is available from
//! [`negcurv_last_error_message`]. Indices are 0-based.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use negcurv::bench::{load_matrix, MatrixFormat};
use negcurv::{
    error_bound, seek_variant, BlackboxFunction, Build, Error, ExactOracle, FdOracle, Heuristic,
    SeekError, SeekStatus, SeekerConfig, SeekerResult, SymMatrix, VariantSpec, DEFAULT_EIG_TOL,
};

/// Return code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegcurvCode {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidMatrix = 3,
    Io = 4,
    Parse = 5,
    Oracle = 6,
    BufferTooSmall = 7,
    Panic = 8,
    Internal = 9,
}

/// Values accepted by the `heuristic` parameters.
#[repr(C)]
pub enum NegcurvHeuristic {
    Ordered = 0,
    S2lde = 1,
    L2sde = 2,
    Ide = 3,
}

/// Values accepted by the `build` parameters.
#[repr(C)]
pub enum NegcurvBuild {
    Build1 = 0,
    Build2 = 1,
}

/// Values returned by [`negcurv_result_status`].
#[repr(C)]
pub enum NegcurvSeekStatus {
    NegativeFound = 0,
    DiagonalNegative = 1,
    Exhausted = 2,
}

/// Opaque symmetric matrix.
pub struct NegcurvMatrix(SymMatrix);

/// Opaque detector result.
pub struct NegcurvResult(SeekerResult);

/// `f(x, n, user_data)`; must not unwind.
pub type NegcurvObjective =
    Option<unsafe extern "C" fn(x: *const f64, n: usize, user_data: *mut c_void) -> f64>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn code_for(e: &Error) -> NegcurvCode {
    match e {
        Error::Io { .. } => NegcurvCode::Io,
        Error::Parse { .. } | Error::Json(_) | Error::Csv(_) => NegcurvCode::Parse,
        Error::NonFinite { .. }
        | Error::Asymmetric { .. }
        | Error::DimensionMismatch { .. }
        | Error::NoConvergence(_) => NegcurvCode::InvalidMatrix,
        Error::Oracle(_) => NegcurvCode::Oracle,
        _ => NegcurvCode::InvalidArgument,
    }
}

fn fail(code: NegcurvCode, msg: impl Into<String>) -> NegcurvCode {
    set_error(msg);
    code
}

fn from_error(e: Error) -> NegcurvCode {
    fail(code_for(&e), e.to_string())
}

fn from_seek_error(e: SeekError) -> NegcurvCode {
    match e {
        SeekError::Input(e) => from_error(e),
        e @ SeekError::Oracle { .. } => fail(NegcurvCode::Oracle, e.to_string()),
    }
}

/// Runs `f`, clearing the error slot first and turning panics into [`NegcurvCode::Panic`].
fn guard(f: impl FnOnce() -> NegcurvCode) -> NegcurvCode {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(NegcurvCode::Panic, format!("panic: {msg}"))
        }
    }
}

fn variant(heuristic: u32, build: u32) -> Result<VariantSpec, NegcurvCode> {
    let h = match heuristic {
        0 => Heuristic::Ordered,
        1 => Heuristic::S2Lde,
        2 => Heuristic::L2Sde,
        3 => Heuristic::Ide,
        _ => {
            return Err(fail(
                NegcurvCode::InvalidArgument,
                format!("unknown heuristic {heuristic}"),
            ))
        }
    };
    let b = match build {
        0 => Build::Build1,
        1 => Build::Build2,
        _ => {
            return Err(fail(
                NegcurvCode::InvalidArgument,
                format!("unknown build {build}"),
            ))
        }
    };
    Ok(VariantSpec::new(h, b))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message describing the last failed call on this thread, or NULL. The
/// pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn negcurv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates a matrix from `n * n` row-major values. The input must be
/// symmetric within a relative tolerance of 1e-12; it is averaged with its transpose.
///
/// # Safety
/// `values` must point to `n * n` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn negcurv_matrix_new(
    n: usize,
    values: *const f64,
    out: *mut *mut NegcurvMatrix,
) -> NegcurvCode {
    guard(|| {
        if values.is_null() || out.is_null() {
            return fail(NegcurvCode::NullPointer, "null argument");
        }
        if n == 0 {
            return fail(NegcurvCode::InvalidArgument, "dimension must be at least 1");
        }
        let Some(len) = n.checked_mul(n) else {
            return fail(NegcurvCode::InvalidArgument, "dimension too large");
        };
        let data = slice::from_raw_parts(values, len);
        let rows: Vec<Vec<f64>> = data.chunks(n).map(<[f64]>::to_vec).collect();
        match SymMatrix::from_rows_with_tol(&rows, 1e-12) {
            Ok(m) => {
                write_out(out, NegcurvMatrix(m));
                NegcurvCode::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Loads a Matrix Market or dense-text file, detecting the format.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn negcurv_matrix_load(
    path: *const c_char,
    out: *mut *mut NegcurvMatrix,
) -> NegcurvCode {
    guard(|| {
        if path.is_null() || out.is_null() {
            return fail(NegcurvCode::NullPointer, "null argument");
        }
        let Ok(path) = CStr::from_ptr(path).to_str() else {
            return fail(NegcurvCode::InvalidArgument, "path is not valid UTF-8");
        };
        match load_matrix(Path::new(path), MatrixFormat::Auto) {
            Ok(m) => {
                write_out(out, NegcurvMatrix(m));
                NegcurvCode::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `m` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn negcurv_matrix_free(m: *mut NegcurvMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of `m`, or 0 when `m` is NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn negcurv_matrix_dim(m: *const NegcurvMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn negcurv_matrix_min_eigenvalue(
    m: *const NegcurvMatrix,
    out: *mut f64,
) -> NegcurvCode {
    guard(|| {
        let (Some(m), false) = (m.as_ref(), out.is_null()) else {
            return fail(NegcurvCode::NullPointer, "null argument");
        };
        match m.0.min_eigenvalue(DEFAULT_EIG_TOL) {
            Ok(v) => {
                *out = v;
                NegcurvCode::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Runs the detector on a stored matrix with the variant given by a
/// [`NegcurvHeuristic`] and a [`NegcurvBuild`] value.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn negcurv_seek(
    m: *const NegcurvMatrix,
    heuristic: u32,
    build: u32,
    epsilon: f64,
    out: *mut *mut NegcurvResult,
) -> NegcurvCode {
    guard(|| {
        let (Some(m), false) = (m.as_ref(), out.is_null()) else {
            return fail(NegcurvCode::NullPointer, "null argument");
        };
        let v = match variant(heuristic, build) {
            Ok(v) => v,
            Err(code) => return code,
        };
        match seek_variant(
            &mut ExactOracle::new(&m.0),
            v,
            &SeekerConfig::with_epsilon(epsilon),
        ) {
            Ok(r) => {
                write_out(out, NegcurvResult(r));
                NegcurvCode::Ok
            }
            Err(e) => from_seek_error(e),
        }
    })
}

struct CallbackObjective {
    f: unsafe extern "C" fn(*const f64, usize, *mut c_void) -> f64,
    user_data: *mut c_void,
    n: usize,
}

impl BlackboxFunction for CallbackObjective {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64]) -> f64 {
        unsafe { (self.f)(x.as_ptr(), x.len(), self.user_data) }
    }
}

/// Runs the detector on finite-difference Hessian entries of `f` at `x`
/// with step `h`. Each distinct evaluation point is passed to `f` once.
///
/// # Safety
/// `x` must point to `n` readable doubles, `out` must be writable, and `f`
/// must be safe to call with `user_data` for the duration of the call.
#[no_mangle]
pub unsafe extern "C" fn negcurv_seek_fd(
    f: NegcurvObjective,
    user_data: *mut c_void,
    n: usize,
    x: *const f64,
    h: f64,
    heuristic: u32,
    build: u32,
    epsilon: f64,
    out: *mut *mut NegcurvResult,
) -> NegcurvCode {
    guard(|| {
        let Some(f) = f else {
            return fail(NegcurvCode::NullPointer, "null callback");
        };
        if x.is_null() || out.is_null() {
            return fail(NegcurvCode::NullPointer, "null argument");
        }
        if n == 0 {
            return fail(NegcurvCode::InvalidArgument, "dimension must be at least 1");
        }
        let v = match variant(heuristic, build) {
            Ok(v) => v,
            Err(code) => return code,
        };
        let objective = CallbackObjective { f, user_data, n };
        let point = slice::from_raw_parts(x, n).to_vec();
        let mut oracle = match FdOracle::new(objective, point, h) {
            Ok(o) => o,
            Err(e) => return fail(NegcurvCode::InvalidArgument, e.to_string()),
        };
        match seek_variant(&mut oracle, v, &SeekerConfig::with_epsilon(epsilon)) {
            Ok(r) => {
                write_out(out, NegcurvResult(r));
                NegcurvCode::Ok
            }
            Err(e) => from_seek_error(e),
        }
    })
}

/// # Safety
/// `r` must be NULL or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn negcurv_result_free(r: *mut NegcurvResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Estimate of the smallest eigenvalue (NaN when `r` is NULL).
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn negcurv_result_lambda(r: *const NegcurvResult) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.0.lambda)
}

/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn negcurv_result_iterations(r: *const NegcurvResult) -> usize {
    r.as_ref().map_or(0, |r| r.0.iterations)
}

/// Distinct oracle queries (function evaluations besides `f(x)` for finite differences).
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn negcurv_result_oracle_cost(r: *const NegcurvResult) -> usize {
    r.as_ref().map_or(0, |r| r.0.oracle_cost)
}

/// A [`NegcurvSeekStatus`] value, or -1 when `r` is NULL.
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn negcurv_result_status(r: *const NegcurvResult) -> i32 {
    match r.as_ref().map(|r| r.0.status) {
        Some(SeekStatus::NegativeFound) => NegcurvSeekStatus::NegativeFound as i32,
        Some(SeekStatus::DiagonalNegative) => NegcurvSeekStatus::DiagonalNegative as i32,
        Some(SeekStatus::Exhausted) => NegcurvSeekStatus::Exhausted as i32,
        None => -1,
    }
}

/// 1 when the result certifies an eigenvalue below `-epsilon`, else 0.
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn negcurv_result_found_negative(r: *const NegcurvResult) -> i32 {
    r.as_ref().map_or(0, |r| i32::from(r.0.found_negative()))
}

/// Number of certificate indices (0 when there is no certificate).
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn negcurv_result_certificate_len(r: *const NegcurvResult) -> usize {
    r.as_ref()
        .and_then(|r| r.0.certificate.as_ref())
        .map_or(0, |c| c.indices.len())
}

/// Copies the certificate's indices into `indices` and, if non-NULL, its
/// unit eigenvector into `vector`. Both buffers need `capacity` entries, at
/// least [`negcurv_result_certificate_len`].
///
/// # Safety
/// `r` must be a live handle; `indices` and non-NULL `vector` must hold `capacity` entries.
#[no_mangle]
pub unsafe extern "C" fn negcurv_result_certificate(
    r: *const NegcurvResult,
    indices: *mut usize,
    vector: *mut f64,
    capacity: usize,
) -> NegcurvCode {
    guard(|| {
        let (Some(r), false) = (r.as_ref(), indices.is_null()) else {
            return fail(NegcurvCode::NullPointer, "null argument");
        };
        let Some(c) = r.0.certificate.as_ref() else {
            return fail(NegcurvCode::InvalidArgument, "result has no certificate");
        };
        let k = c.indices.len();
        if capacity < k {
            return fail(
                NegcurvCode::BufferTooSmall,
                format!("need {k} entries, got {capacity}"),
            );
        }
        ptr::copy_nonoverlapping(c.indices.as_slice().as_ptr(), indices, k);
        if !vector.is_null() {
            ptr::copy_nonoverlapping(c.vector.as_ptr(), vector, k);
        }
        NegcurvCode::Ok
    })
}

/// Serializes the result record to JSON. Release with [`negcurv_string_free`].
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn negcurv_result_to_json(
    r: *const NegcurvResult,
    out: *mut *mut c_char,
) -> NegcurvCode {
    guard(|| {
        let (Some(r), false) = (r.as_ref(), out.is_null()) else {
            return fail(NegcurvCode::NullPointer, "null argument");
        };
        let text = match serde_json::to_string(&r.0.record()) {
            Ok(t) => t,
            Err(e) => return fail(NegcurvCode::Internal, e.to_string()),
        };
        match CString::new(text) {
            Ok(s) => {
                *out = s.into_raw();
                NegcurvCode::Ok
            }
            Err(e) => fail(NegcurvCode::Internal, e.to_string()),
        }
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn negcurv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Worst-case gap `(5/3) sqrt(n) L h` between the smallest eigenvalues of the
/// finite-difference and true Hessians.
#[no_mangle]
pub extern "C" fn negcurv_error_bound(n: usize, lipschitz: f64, h: f64) -> f64 {
    error_bound(n, lipschitz, h)
}
