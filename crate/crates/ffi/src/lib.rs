//! C interface to the `spherepack` solver.
//!
//! Every fallible function returns an [`SpStatus`]. On failure a description is
//! kept per thread and can be read with [`sp_last_error_message`]. Results are
//! handed out as opaque handles that the caller releases with the matching
//! `*_free` function.
//!
//! Container kinds are passed as [`SP_KIND_SPHERE`] or [`SP_KIND_CUBE`];
//! coordinates are flat `x, y, z` triples.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use spherepack::packing_io::{write_packing, Packing};
use spherepack::radius::SolveOutcome;
use spherepack::run::{solve_best_of, RunConfig};
use spherepack::{
    load_packing, total_energy, verify_exact, Configuration, Container, ContainerKind, Error,
    Point3, RecordTable,
};

pub const SP_KIND_SPHERE: u32 = 0;
pub const SP_KIND_CUBE: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    UpperBoundInfeasible = 3,
    CertificationFailed = 4,
    NotInTable = 5,
    Parse = 6,
    Io = 7,
    Panic = 8,
}

/// Result of a solve: a certified packing of spheres of radius 0.5.
pub struct SpOutcome {
    outcome: SolveOutcome,
}

/// A packing read from a file.
pub struct SpPacking {
    packing: Packing,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    let c = CString::new(text).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> SpStatus {
    match err {
        Error::InvalidParameter(_) | Error::IndexOutOfRange { .. } => SpStatus::InvalidArgument,
        Error::UpperBoundInfeasible { .. } => SpStatus::UpperBoundInfeasible,
        Error::CertificationFailed { .. } => SpStatus::CertificationFailed,
        Error::NotInTable { .. } => SpStatus::NotInTable,
        Error::DuplicateRecord { .. } | Error::Parse { .. } | Error::Json(_) => SpStatus::Parse,
        Error::Io(_) => SpStatus::Io,
    }
}

struct Failure(SpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SpStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure and turns panics into [`SpStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SpStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {message}"));
            SpStatus::Panic
        }
    }
}

fn kind_from(code: u32) -> Result<ContainerKind, Failure> {
    match code {
        SP_KIND_SPHERE => Ok(ContainerKind::Sphere),
        SP_KIND_CUBE => Ok(ContainerKind::Cube),
        other => Err(Failure(
            SpStatus::InvalidArgument,
            format!("unknown container kind {other}"),
        )),
    }
}

fn kind_code(kind: ContainerKind) -> u32 {
    match kind {
        ContainerKind::Sphere => SP_KIND_SPHERE,
        ContainerKind::Cube => SP_KIND_CUBE,
    }
}

unsafe fn path_from(path: *const c_char) -> Result<PathBuf, Failure> {
    if path.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(path)
        .to_str()
        .map_err(|_| Failure(SpStatus::InvalidArgument, "path is not UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

unsafe fn configuration_from(centers: *const f64, n: usize, r: f64) -> Result<Configuration, Failure> {
    if centers.is_null() {
        return Err(null("centers"));
    }
    let flat = std::slice::from_raw_parts(centers, 3 * n);
    let points = flat
        .chunks_exact(3)
        .map(|c| Point3::new(c[0], c[1], c[2]))
        .collect();
    Ok(Configuration::new(points, r)?)
}

unsafe fn copy_centers(config: &Configuration, out: *mut f64, len: usize) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let need = 3 * config.len();
    if len < need {
        return Err(Failure(
            SpStatus::InvalidArgument,
            format!("buffer holds {len} values, {need} needed"),
        ));
    }
    let dst = std::slice::from_raw_parts_mut(out, need);
    for (d, c) in dst.chunks_exact_mut(3).zip(config.centers()) {
        d.copy_from_slice(&c.to_array());
    }
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer stays
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn sp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Searches for a dense packing of `n` spheres and stores the densest of `runs`
/// seeded runs (seeds `seed`, `seed + 1`, ...) in `*out`.
///
/// A non-positive `r0_estimate` selects the default search radius.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sp_solve(
    n: u32,
    kind: u32,
    r0_estimate: f64,
    seed: u64,
    runs: u32,
    out: *mut *mut SpOutcome,
) -> SpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let kind = kind_from(kind)?;
        let cfg = RunConfig {
            r0_estimate: (r0_estimate > 0.0).then_some(r0_estimate),
            seed,
            ..RunConfig::new(n as usize, kind)
        };
        let best = solve_best_of(&cfg, runs as usize, &RecordTable::bundled())?;
        *out = Box::into_raw(Box::new(SpOutcome {
            outcome: best.best.outcome,
        }));
        Ok(())
    })
}

/// Releases an outcome. Null is ignored.
///
/// # Safety
/// `outcome` must come from [`sp_solve`] and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn sp_outcome_free(outcome: *mut SpOutcome) {
    if !outcome.is_null() {
        drop(Box::from_raw(outcome));
    }
}

/// `r / r0` of the packing, or NaN for a null handle.
///
/// # Safety
/// `outcome` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_outcome_ratio(outcome: *const SpOutcome) -> f64 {
    outcome.as_ref().map_or(f64::NAN, |o| o.outcome.ratio)
}

/// Container radius of the packing, or NaN for a null handle.
///
/// # Safety
/// `outcome` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_outcome_r0_min(outcome: *const SpOutcome) -> f64 {
    outcome.as_ref().map_or(f64::NAN, |o| o.outcome.r0_min)
}

/// Number of spheres, or 0 for a null handle.
///
/// # Safety
/// `outcome` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_outcome_len(outcome: *const SpOutcome) -> usize {
    outcome.as_ref().map_or(0, |o| o.outcome.dense_packing.len())
}

/// Copies the `3 n` center coordinates into `out`.
///
/// # Safety
/// `outcome` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sp_outcome_centers(outcome: *const SpOutcome, out: *mut f64, len: usize) -> SpStatus {
    guard(|| {
        let o = outcome.as_ref().ok_or_else(|| null("outcome"))?;
        copy_centers(&o.outcome.dense_packing, out, len)
    })
}

/// Writes the packing in the text format read by [`sp_packing_load`].
///
/// # Safety
/// `outcome` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sp_outcome_save(outcome: *const SpOutcome, path: *const c_char) -> SpStatus {
    guard(|| {
        let o = outcome.as_ref().ok_or_else(|| null("outcome"))?;
        let path = path_from(path)?;
        Ok(write_packing(&Packing::from(&o.outcome), path)?)
    })
}

/// Reads a packing file into `*out`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for one handle.
#[no_mangle]
pub unsafe extern "C" fn sp_packing_load(path: *const c_char, out: *mut *mut SpPacking) -> SpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let packing = load_packing(path_from(path)?)?;
        *out = Box::into_raw(Box::new(SpPacking { packing }));
        Ok(())
    })
}

/// Releases a loaded packing. Null is ignored.
///
/// # Safety
/// `packing` must come from [`sp_packing_load`] and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn sp_packing_free(packing: *mut SpPacking) {
    if !packing.is_null() {
        drop(Box::from_raw(packing));
    }
}

/// Number of spheres, or 0 for a null handle.
///
/// # Safety
/// `packing` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_packing_len(packing: *const SpPacking) -> usize {
    packing.as_ref().map_or(0, |p| p.packing.configuration.len())
}

/// Container radius, or NaN for a null handle.
///
/// # Safety
/// `packing` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_packing_r0(packing: *const SpPacking) -> f64 {
    packing.as_ref().map_or(f64::NAN, |p| p.packing.r0)
}

/// Sphere radius, or NaN for a null handle.
///
/// # Safety
/// `packing` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_packing_radius(packing: *const SpPacking) -> f64 {
    packing
        .as_ref()
        .map_or(f64::NAN, |p| p.packing.configuration.radius())
}

/// Container kind code.
///
/// # Safety
/// `packing` must be a live handle and `out` valid for one value.
#[no_mangle]
pub unsafe extern "C" fn sp_packing_kind(packing: *const SpPacking, out: *mut u32) -> SpStatus {
    guard(|| {
        let p = packing.as_ref().ok_or_else(|| null("packing"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = kind_code(p.packing.kind);
        Ok(())
    })
}

/// Copies the `3 n` center coordinates into `out`.
///
/// # Safety
/// `packing` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sp_packing_centers(packing: *const SpPacking, out: *mut f64, len: usize) -> SpStatus {
    guard(|| {
        let p = packing.as_ref().ok_or_else(|| null("packing"))?;
        copy_centers(&p.packing.configuration, out, len)
    })
}

/// Exact feasibility check of `n` spheres of radius `r` in the container.
///
/// # Safety
/// `centers` must point to `3 n` doubles and `valid` to one writable bool.
#[no_mangle]
pub unsafe extern "C" fn sp_verify_exact(
    centers: *const f64,
    n: usize,
    r: f64,
    r0: f64,
    kind: u32,
    valid: *mut bool,
) -> SpStatus {
    guard(|| {
        let valid = valid.as_mut().ok_or_else(|| null("valid"))?;
        let kind = kind_from(kind)?;
        Container::new(kind, r0)?;
        let config = configuration_from(centers, n, r)?;
        *valid = verify_exact(&config, r0, kind).valid;
        Ok(())
    })
}

/// Overlap energy of `n` spheres of radius `r` in the container.
///
/// # Safety
/// `centers` must point to `3 n` doubles and `out` to one writable double.
#[no_mangle]
pub unsafe extern "C" fn sp_total_energy(
    centers: *const f64,
    n: usize,
    r: f64,
    r0: f64,
    kind: u32,
    out: *mut f64,
) -> SpStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let container = Container::new(kind_from(kind)?, r0)?;
        let config = configuration_from(centers, n, r)?;
        *out = total_energy(&config, &container).total;
        Ok(())
    })
}

/// Best known `r / r0` from the bundled table.
///
/// # Safety
/// `out` must point to one writable double.
#[no_mangle]
pub unsafe extern "C" fn sp_record_ratio(n: u32, kind: u32, out: *mut f64) -> SpStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = RecordTable::bundled().get(n as usize, kind_from(kind)?)?;
        Ok(())
    })
}
