//! C interface to `entire-dynamics`.
//!
//! Functions are created from their JSON descriptor and passed around as
//! opaque `EdFunction` handles. Every call returns an [`EdStatus`]; on
//! failure [`ed_last_error`] holds a message for the calling thread.
//! Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use entire_dynamics::dynamics::{fast_escaping_test, lyapunov_estimate};
use entire_dynamics::measures::{mu_sup, nevanlinna_t, spherical_area, GridSpec, Region};
use entire_dynamics::{Error, FunctionDescriptor, TowerReal};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Overflow = 4,
    NonEscalating = 5,
    Domain = 6,
    NoConvergence = 7,
    PrecisionExhausted = 8,
    Io = 9,
    Panic = 10,
}

/// Opaque function handle.
pub struct EdFunction {
    inner: FunctionDescriptor,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EdComplex {
    pub re: f64,
    pub im: f64,
}

/// `exp^depth(base)`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EdTower {
    pub depth: u32,
    pub base: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdRegionKind {
    Rectangle = 0,
    Disk = 1,
}

/// Rectangle `center ± (half_width, half_height)` or disk of `radius`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EdRegion {
    pub kind: EdRegionKind,
    pub center: EdComplex,
    pub half_width: f64,
    pub half_height: f64,
    pub radius: f64,
}

/// Quadrature settings; pass NULL for the defaults (32, 24, 1e-3).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EdGrid {
    pub base_resolution: usize,
    pub max_refinements: usize,
    pub rel_tol: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EdAreaResult {
    pub value: f64,
    pub log_value: f64,
    pub error_estimate: f64,
    pub converged: c_int,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> EdStatus {
    match e {
        Error::Overflow(_) | Error::OrbitOverflow { .. } | Error::GridOverflow(_) => EdStatus::Overflow,
        Error::TowerDomain(_) => EdStatus::Domain,
        Error::NonEscalating(_) => EdStatus::NonEscalating,
        Error::InvalidArgument(_) | Error::Precondition(_) | Error::ScheduleInfeasible(_) => EdStatus::InvalidArgument,
        Error::NoConvergence { .. } | Error::DerivativeSingular { .. } | Error::WrongPeriod { .. } => EdStatus::NoConvergence,
        Error::PrecisionExhausted { .. } => EdStatus::PrecisionExhausted,
        Error::Parse(_) => EdStatus::Parse,
        Error::Io(_) => EdStatus::Io,
    }
}

/// Runs `body`, mapping errors and panics to status codes.
fn guard(body: impl FnOnce() -> Result<(), (EdStatus, String)>) -> EdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            EdStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            EdStatus::Panic
        }
    }
}

fn lib<T>(r: entire_dynamics::Result<T>) -> Result<T, (EdStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (EdStatus, String) {
    (EdStatus::NullPointer, "null pointer argument".into())
}

unsafe fn func<'a>(f: *const EdFunction) -> Result<&'a FunctionDescriptor, (EdStatus, String)> {
    f.as_ref().map(|h| &h.inner).ok_or_else(null)
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), (EdStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

fn region(r: &EdRegion) -> entire_dynamics::Result<Region> {
    let c = Complex64::new(r.center.re, r.center.im);
    match r.kind {
        EdRegionKind::Rectangle => Region::rectangle(c, r.half_width, r.half_height),
        EdRegionKind::Disk => Region::disk(c, r.radius),
    }
}

unsafe fn grid(g: *const EdGrid) -> entire_dynamics::Result<GridSpec> {
    let g = match g.as_ref() {
        None => GridSpec::default(),
        Some(g) => GridSpec { base_resolution: g.base_resolution, max_refinements: g.max_refinements, rel_tol: g.rel_tol },
    };
    g.validate()?;
    Ok(g)
}

fn cx(z: EdComplex) -> Complex64 {
    Complex64::new(z.re, z.im)
}

fn ed(z: Complex64) -> EdComplex {
    EdComplex { re: z.re, im: z.im }
}

fn tower(t: &TowerReal) -> EdTower {
    EdTower { depth: t.depth(), base: t.base() }
}

/// Message for the last failed call on this thread; empty after success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ed_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a descriptor such as `{"variant":"exp_affine","lambda":[1,0]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_function_from_json(json: *const c_char, out: *mut *mut EdFunction) -> EdStatus {
    guard(|| {
        if json.is_null() {
            return Err(null());
        }
        let s = CStr::from_ptr(json).to_str().map_err(|e| (EdStatus::Parse, e.to_string()))?;
        let f = lib(FunctionDescriptor::from_json(s))?;
        put(out, Box::into_raw(Box::new(EdFunction { inner: f })))
    })
}

/// # Safety
/// `f` must come from [`ed_function_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ed_function_free(f: *mut EdFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ed_eval(f: *const EdFunction, z: EdComplex, out: *mut EdComplex) -> EdStatus {
    guard(|| put(out, ed(lib(func(f)?.eval(cx(z)))?)))
}

/// # Safety
/// `f` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ed_derivative(f: *const EdFunction, z: EdComplex, out: *mut EdComplex) -> EdStatus {
    guard(|| put(out, ed(lib(func(f)?.derivative(cx(z)))?)))
}

/// `log M(r, f)`.
///
/// # Safety
/// `f` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ed_log_max_modulus(f: *const EdFunction, r: f64, out: *mut f64) -> EdStatus {
    guard(|| {
        if !(r > 0.0 && r.is_finite()) {
            return Err((EdStatus::InvalidArgument, format!("radius must be positive and finite, got {r}")));
        }
        let t = func(f)?.max_modulus_tower(&TowerReal::from_value(r));
        put(out, lib(t.ln())?.to_f64())
    })
}

/// Writes `Mᵏ(r0, f)` for `k = 0..len` into `out`.
///
/// # Safety
/// `f` must be a live handle; `out` must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn ed_iterated_max_modulus(f: *const EdFunction, r0: f64, len: usize, out: *mut EdTower) -> EdStatus {
    guard(|| {
        if len == 0 {
            return Ok(());
        }
        if out.is_null() {
            return Err(null());
        }
        let t = lib(func(f)?.iterated_max_modulus(r0, len - 1))?;
        let dst = std::slice::from_raw_parts_mut(out, len);
        for (d, level) in dst.iter_mut().zip(&t.levels) {
            *d = tower(level);
        }
        Ok(())
    })
}

/// `-1`, `0` or `1` as `a` is below, equal to (within rounding) or above `b`.
#[no_mangle]
pub extern "C" fn ed_tower_compare(a: EdTower, b: EdTower) -> c_int {
    let ta = TowerReal::new(a.depth, a.base.max(0.0));
    let tb = TowerReal::new(b.depth, b.base.max(0.0));
    ta.compare(&tb) as c_int
}

/// Finite-horizon upper and lower Lyapunov exponents.
///
/// # Safety
/// `f` must be a live handle; `upper` and `lower` writable.
#[no_mangle]
pub unsafe extern "C" fn ed_lyapunov(f: *const EdFunction, z: EdComplex, horizon: usize, upper: *mut f64, lower: *mut f64) -> EdStatus {
    guard(|| {
        if upper.is_null() || lower.is_null() {
            return Err(null());
        }
        let e = lib(lyapunov_estimate(func(f)?, cx(z), horizon))?;
        put(upper, e.upper)?;
        put(lower, e.lower)
    })
}

/// Fast-escaping test; `l` receives the smallest shift or `-1`.
///
/// # Safety
/// `f` must be a live handle; `member` and `l` writable.
#[no_mangle]
pub unsafe extern "C" fn ed_fast_escaping(
    f: *const EdFunction,
    z: EdComplex,
    r: f64,
    l_max: usize,
    n_max: usize,
    member: *mut c_int,
    l: *mut c_int,
) -> EdStatus {
    guard(|| {
        if member.is_null() || l.is_null() {
            return Err(null());
        }
        let res = lib(fast_escaping_test(func(f)?, cx(z), r, l_max, n_max))?;
        put(member, c_int::from(res.member))?;
        put(l, res.l.map_or(-1, |v| v as c_int))
    })
}

/// Normalized spherical area `S(U, fⁿ)`.
///
/// # Safety
/// `f` must be a live handle; `u` readable; `g` NULL or readable; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ed_spherical_area(f: *const EdFunction, u: *const EdRegion, n: usize, g: *const EdGrid, out: *mut EdAreaResult) -> EdStatus {
    guard(|| {
        let u = lib(region(u.as_ref().ok_or_else(null)?))?;
        let a = lib(spherical_area(func(f)?, &u, n, &lib(grid(g))?))?;
        put(out, EdAreaResult { value: a.value, log_value: a.log_value, error_estimate: a.error_estimate, converged: c_int::from(a.converged) })
    })
}

/// `log μ(U, fⁿ)`.
///
/// # Safety
/// `f` must be a live handle; `u` readable; `g` NULL or readable; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ed_mu_sup(f: *const EdFunction, u: *const EdRegion, n: usize, g: *const EdGrid, out: *mut f64) -> EdStatus {
    guard(|| {
        let u = lib(region(u.as_ref().ok_or_else(null)?))?;
        put(out, lib(mu_sup(func(f)?, &u, n, &lib(grid(g))?))?.log_mu)
    })
}

/// Nevanlinna characteristic `T(r, f)`.
///
/// # Safety
/// `f` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ed_nevanlinna_t(f: *const EdFunction, r: f64, out: *mut f64) -> EdStatus {
    guard(|| put(out, lib(nevanlinna_t(func(f)?, r))?))
}

/// Library version, NUL-terminated and static.
#[no_mangle]
pub extern "C" fn ed_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
