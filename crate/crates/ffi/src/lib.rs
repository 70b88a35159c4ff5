//! C ABI for the `qtomo` library.
//!
//! States and record batches are opaque handles returned through out-pointers
//! and released with the matching `*_free`. Every fallible call
//! returns a [`QtomoStatus`]; on failure a human-readable message is kept in
//! thread-local storage and can be fetched with [`qtomo_last_error`].
//!
//! Rates passed across the boundary (`omega`, `coupling`) are angular rates in
//! inverse time units, not multiples of `2π/T`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qtomo::controls::named_setting;
use qtomo::dynamics::{read_records, simulate_batch, write_records, MeasurementConfig, MeasurementRecord};
use qtomo::estimation::{bme, build_grid, mle, posterior, DeConfig, GridKind};
use qtomo::qcore::{fidelity, from_pauli, to_pauli, trace_distance, DensityMatrix, PauliCoefficients};
use qtomo::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QtomoStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Bad argument or configuration (dimension, setting code, sizes, UTF-8).
    InvalidArgument = 2,
    /// Coefficients or matrix do not describe a density matrix.
    InvalidState = 3,
    /// Malformed, inconsistent or unreadable data.
    Data = 4,
    /// Numerical failure (underflow, degenerate information).
    Numerical = 5,
    /// Output buffer too small; see the function's documentation.
    BufferTooSmall = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

impl From<&Error> for QtomoStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidState(_) => Self::InvalidState,
            Error::UnsupportedDimension(_)
            | Error::DimensionMismatch(_, _)
            | Error::UnknownSetting(_)
            | Error::UnknownCatalog(_)
            | Error::InvalidArgument(_)
            | Error::Json(_) => Self::InvalidArgument,
            Error::ConfigMismatch
            | Error::InconsistentData
            | Error::MissingObservable(_)
            | Error::Format(_)
            | Error::Io(_)
            | Error::Csv(_) => Self::Data,
            Error::Underflow | Error::DegenerateInformation | Error::NonPauliCommutator(_, _) => Self::Numerical,
        }
    }
}

/// Opaque density matrix.
pub struct QtomoState(DensityMatrix);

/// Opaque batch of measurement records.
pub struct QtomoRecords(Vec<MeasurementRecord>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(QtomoStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(QtomoStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(QtomoStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QtomoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QtomoStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            QtomoStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(QtomoStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qtomo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of the calling thread into `buf`
/// (NUL-terminated, truncated to `len - 1` bytes). Returns the full message
/// length in bytes excluding the terminator, or 0 if there is none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn qtomo_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Single-qubit state from a Bloch vector (`|r| ≤ 1`).
///
/// # Safety
/// `out` must be a valid pointer to write a handle into.
#[no_mangle]
pub unsafe extern "C" fn qtomo_state_from_bloch(x: f64, y: f64, z: f64, out: *mut *mut QtomoState) -> QtomoStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(QtomoState(DensityMatrix::from_bloch(x, y, z)?));
        Ok(())
    })
}

/// State from Pauli coefficients `c_1 … c_{d²-1}` (identity excluded), so
/// `rho = (I + Σ c_i E_i) / d`. `dim` is 2 or 4; `len` must be `dim² - 1`.
/// Two-qubit labels are ordered `IX, IY, IZ, XI, XX, …, ZZ`, the first
/// letter acting on the measured qubit.
///
/// # Safety
/// `coeffs` must point to `len` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qtomo_state_from_pauli(
    dim: usize,
    coeffs: *const f64,
    len: usize,
    out: *mut *mut QtomoState,
) -> QtomoStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if coeffs.is_null() {
            return Err(null("coeffs"));
        }
        let c = PauliCoefficients::from_non_identity(dim, std::slice::from_raw_parts(coeffs, len))?;
        let rho = from_pauli(&c);
        rho.check()?;
        *out = boxed(QtomoState(rho));
        Ok(())
    })
}

/// The Bell state `(|00⟩ + |11⟩)/√2`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qtomo_state_bell(out: *mut *mut QtomoState) -> QtomoStatus {
    guard(|| {
        *out_ptr(out, "out")? = boxed(QtomoState(DensityMatrix::bell_phi_plus()));
        Ok(())
    })
}

/// Hilbert-space dimension of a state, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qtomo_state_dim(state: *const QtomoState) -> usize {
    state.as_ref().map_or(0, |s| s.0.dim())
}

/// Writes the non-identity Pauli coefficients (`dim² - 1` values) into `out`.
/// Returns `BufferTooSmall` if `len` is insufficient.
///
/// # Safety
/// `state` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qtomo_state_pauli(state: *const QtomoState, out: *mut f64, len: usize) -> QtomoStatus {
    guard(|| {
        let s = deref(state, "state")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = to_pauli(&s.0)?;
        let rest = c.non_identity();
        if len < rest.len() {
            return Err(Failure(
                QtomoStatus::BufferTooSmall,
                format!("need {} coefficients, buffer holds {len}", rest.len()),
            ));
        }
        ptr::copy_nonoverlapping(rest.as_ptr(), out, rest.len());
        Ok(())
    })
}

/// Root fidelity `Tr √(√a b √a)` between two states of equal dimension.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qtomo_fidelity(a: *const QtomoState, b: *const QtomoState, out: *mut f64) -> QtomoStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        *out_ptr(out, "out")? = fidelity(&a.0, &b.0)?;
        Ok(())
    })
}

/// Trace distance `½ ‖a − b‖₁`.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qtomo_trace_distance(a: *const QtomoState, b: *const QtomoState, out: *mut f64) -> QtomoStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        *out_ptr(out, "out")? = trace_distance(&a.0, &b.0)?;
        Ok(())
    })
}

/// Releases a state handle. Null is ignored.
///
/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qtomo_state_free(state: *mut QtomoState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Simulates `n_records` measurement records from `truth` under the control
/// `setting` (e.g. `"XYZ"`, `"0+XYZ"`, `"XY+YZ"`). Each record runs
/// `round(total_time / dt)` steps. Results depend only on the arguments,
/// never on the thread count.
///
/// # Safety
/// `truth` must be live, `setting` a NUL-terminated string, `out` valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn qtomo_simulate(
    truth: *const QtomoState,
    setting: *const c_char,
    omega: f64,
    coupling: f64,
    dt: f64,
    total_time: f64,
    tau: f64,
    n_records: usize,
    seed: u64,
    out: *mut *mut QtomoRecords,
) -> QtomoStatus {
    guard(|| {
        let truth = deref(truth, "truth")?;
        let setting = c_str(setting, "setting")?;
        let out = out_ptr(out, "out")?;
        let control = named_setting(setting, omega, coupling)?;
        let config = MeasurementConfig::from_total_time(dt, total_time, tau)?;
        let records = simulate_batch(&truth.0, &control, &config, n_records, seed)?;
        *out = boxed(QtomoRecords(records));
        Ok(())
    })
}

/// Reads a record file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qtomo_records_read(path: *const c_char, out: *mut *mut QtomoRecords) -> QtomoStatus {
    guard(|| {
        let path = c_str(path, "path")?;
        let out = out_ptr(out, "out")?;
        *out = boxed(QtomoRecords(read_records(path)?));
        Ok(())
    })
}

/// Writes a record file.
///
/// # Safety
/// `records` must be live; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qtomo_records_write(records: *const QtomoRecords, path: *const c_char) -> QtomoStatus {
    guard(|| {
        let records = deref(records, "records")?;
        write_records(c_str(path, "path")?, &records.0)?;
        Ok(())
    })
}

/// Number of records in a batch, or 0 for a null handle.
///
/// # Safety
/// `records` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qtomo_records_len(records: *const QtomoRecords) -> usize {
    records.as_ref().map_or(0, |r| r.0.len())
}

/// Releases a record batch. Null is ignored.
///
/// # Safety
/// `records` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qtomo_records_free(records: *mut QtomoRecords) {
    if !records.is_null() {
        drop(Box::from_raw(records));
    }
}

/// Single-qubit Bayesian mean estimate over `grid_size` candidates drawn
/// uniformly from the Bloch ball with `grid_seed`. Optionally reports the
/// posterior spread `√Tr Cov` through `sqrt_tr_cov` (may be null).
///
/// # Safety
/// `records` must be live; `out` valid; `sqrt_tr_cov` null or valid.
#[no_mangle]
pub unsafe extern "C" fn qtomo_estimate_bme(
    records: *const QtomoRecords,
    grid_size: usize,
    grid_seed: u64,
    out: *mut *mut QtomoState,
    sqrt_tr_cov: *mut f64,
) -> QtomoStatus {
    guard(|| {
        let records = deref(records, "records")?;
        let out = out_ptr(out, "out")?;
        let first = records
            .0
            .first()
            .ok_or_else(|| Failure(QtomoStatus::InvalidArgument, "record batch is empty".into()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(grid_seed);
        let grid = build_grid(GridKind::HsUniformBall, grid_size, &mut rng, None)?;
        if grid.dim() != first.dim() {
            return Err(Error::DimensionMismatch(grid.dim(), first.dim()).into());
        }
        let report = bme(&posterior(&grid, &records.0)?)?;
        if let Some(v) = sqrt_tr_cov.as_mut() {
            *v = report.bayes_error().unwrap_or(f64::NAN);
        }
        *out = boxed(QtomoState(estimate_state(&report)?));
        Ok(())
    })
}

fn estimate_state(report: &qtomo::estimation::EstimationReport) -> Result<DensityMatrix, Failure> {
    report
        .state()
        .ok_or_else(|| Failure(QtomoStatus::Numerical, "estimate is not a valid density matrix".into()))
}

/// Constrained maximum-likelihood estimate by differential evolution with
/// `restarts` restarts (0 selects the default) seeded by `seed`.
///
/// # Safety
/// `records` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qtomo_estimate_mle(
    records: *const QtomoRecords,
    restarts: usize,
    seed: u64,
    out: *mut *mut QtomoState,
) -> QtomoStatus {
    guard(|| {
        let records = deref(records, "records")?;
        let out = out_ptr(out, "out")?;
        let dim = records
            .0
            .first()
            .map(|r| r.dim())
            .ok_or_else(|| Failure(QtomoStatus::InvalidArgument, "record batch is empty".into()))?;
        let mut de = DeConfig {
            seed,
            ..DeConfig::default()
        };
        if restarts > 0 {
            de.restarts = restarts;
        }
        let report = mle(&records.0, &de, dim)?;
        *out = boxed(QtomoState(estimate_state(&report)?));
        Ok(())
    })
}
