//! C ABI over `parab-core`.
//!
//! Every fallible entry point returns a [`ParabStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can be
//! read with [`parab_last_error_message`]. Handles are opaque and must be
//! released with the matching `*_free` function.
//!
//! Points are passed as flat arrays plus a height. On the surface a point is
//! `(√t ξ, t)` given by the unit vector `ξ` and `t`; in the solid it is `(x, t)`
//! with `|x|² ≤ t`. On 𝕌 a point is `(x1, x2)`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use parab_core::domain_u::{self, UPoint, WeightU};
use parab_core::harness::{self, Command, ExperimentConfig, Report};
use parab_core::solid_v::{self, BallIndex, SolidPoint, WeightV};
use parab_core::surface_v0::{self, SurfacePoint, WeightV0};
use parab_core::{CesaroSpec, Domain, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    IndexOutOfRange = 3,
    PointOutsideDomain = 4,
    UnsupportedDimension = 5,
    InvalidConfig = 6,
    NoConvergence = 7,
    InvalidUtf8 = 8,
    Io = 9,
    Panic = 10,
}

impl From<&Error> for ParabStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter { .. } => Self::InvalidParameter,
            Error::IndexOutOfRange(_) => Self::IndexOutOfRange,
            Error::PointOutsideDomain { .. } => Self::PointOutsideDomain,
            Error::UnsupportedDimension(_) => Self::UnsupportedDimension,
            Error::InvalidConfig(_) => Self::InvalidConfig,
            Error::NoConvergence { .. } => Self::NoConvergence,
        }
    }
}

/// Weight `w_{a,b}` on the parabolic domain 𝕌.
pub struct ParabWeightU(WeightU);

/// Weight `ϖ_{β,γ}` on the paraboloid surface.
pub struct ParabWeightV0(WeightV0);

/// Weight `W_{β,γ,μ}` on the solid paraboloid.
pub struct ParabWeightV(WeightV);

/// Harness configuration for one command on one domain.
pub struct ParabConfig(ExperimentConfig);

/// Rows produced by [`parab_run`].
pub struct ParabReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(ParabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure((&e).into(), e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn null(name: &str) -> Failure {
    Failure(ParabStatus::NullPointer, format!("null pointer passed for `{name}`"))
}

fn guard(f: impl FnOnce() -> Outcome<()> + UnwindSafe) -> ParabStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => {
            set_error(String::new());
            ParabStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".to_string());
            ParabStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, name: &str, value: T) -> Outcome<()> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn get<'a, T>(p: *const T, name: &str) -> Outcome<&'a T> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Outcome<&'a [f64]> {
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn string<'a>(p: *const c_char, name: &str) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(ParabStatus::InvalidUtf8, format!("`{name}` is not valid UTF-8")))
}

unsafe fn boxed<T>(out: *mut *mut T, value: T) -> Outcome<()> {
    write(out, "out", Box::into_raw(Box::new(value)))
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Copies the last error message of the calling thread into `buf` as a
/// NUL-terminated string, truncating to `len - 1` bytes. Returns the full
/// message length without the terminator; `buf` may be null to query it.
#[no_mangle]
pub unsafe extern "C" fn parab_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn parab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---- 𝕌 ----

#[no_mangle]
pub unsafe extern "C" fn parab_weight_u_new(a: f64, b: f64, out: *mut *mut ParabWeightU) -> ParabStatus {
    guard(|| boxed(out, ParabWeightU(WeightU::new(a, b)?)))
}

#[no_mangle]
pub unsafe extern "C" fn parab_weight_u_free(w: *mut ParabWeightU) {
    free(w)
}

/// Orthogonal polynomial `P_{k,n}` (not normalized) at `(x1, x2)`, `0 ≤ k ≤ n`.
#[no_mangle]
pub unsafe extern "C" fn parab_u_basis(
    w: *const ParabWeightU,
    k: usize,
    n: usize,
    x1: f64,
    x2: f64,
    out: *mut f64,
) -> ParabStatus {
    guard(|| {
        let w = get(w, "w")?;
        let x = UPoint::new(x1, x2)?;
        write(out, "out", domain_u::basis_eval(k, n, &w.0, &x)?)
    })
}

/// Reproducing kernel of the degree-`n` component at `(x, y)`.
#[no_mangle]
pub unsafe extern "C" fn parab_u_kernel(
    w: *const ParabWeightU,
    n: usize,
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
    out: *mut f64,
) -> ParabStatus {
    guard(|| {
        let w = get(w, "w")?;
        let (x, y) = (UPoint::new(x1, x2)?, UPoint::new(y1, y2)?);
        write(out, "out", domain_u::kernel_P(n, &w.0, &x, &y))
    })
}

/// `(C, δ)` kernel of order `n` at `(x, y)`.
#[no_mangle]
pub unsafe extern "C" fn parab_u_cesaro_kernel(
    w: *const ParabWeightU,
    n: usize,
    delta: f64,
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
    out: *mut f64,
) -> ParabStatus {
    guard(|| {
        let w = get(w, "w")?;
        let spec = CesaroSpec::new(n, delta)?;
        let (x, y) = (UPoint::new(x1, x2)?, UPoint::new(y1, y2)?);
        write(out, "out", domain_u::cesaro_kernel(spec, &w.0, &x, &y))
    })
}

// ---- paraboloid surface ----

#[no_mangle]
pub unsafe extern "C" fn parab_weight_v0_new(
    d: usize,
    beta: f64,
    gamma: f64,
    out: *mut *mut ParabWeightV0,
) -> ParabStatus {
    guard(|| boxed(out, ParabWeightV0(WeightV0::new(d, beta, gamma)?)))
}

#[no_mangle]
pub unsafe extern "C" fn parab_weight_v0_free(w: *mut ParabWeightV0) {
    free(w)
}

unsafe fn surface_point(w: &WeightV0, xi: *const f64, t: f64, name: &str) -> Outcome<SurfacePoint> {
    Ok(SurfacePoint::new(slice(xi, w.d, name)?.to_vec(), t)?)
}

/// Basis element `Q_{m,ℓ}^n` at the surface point `(√t ξ, t)`; `xi` is a unit
/// vector of length `d`.
#[no_mangle]
pub unsafe extern "C" fn parab_v0_basis(
    w: *const ParabWeightV0,
    n: usize,
    m: usize,
    ell: usize,
    xi: *const f64,
    t: f64,
    out: *mut f64,
) -> ParabStatus {
    guard(|| {
        let w = get(w, "w")?;
        let p = surface_point(&w.0, xi, t, "xi")?;
        write(out, "out", surface_v0::basis_Q_eval(n, m, ell, &w.0, &p)?)
    })
}

/// Reproducing kernel of the degree-`n` component at surface points.
#[no_mangle]
pub unsafe extern "C" fn parab_v0_kernel(
    w: *const ParabWeightV0,
    n: usize,
    xi: *const f64,
    t: f64,
    eta: *const f64,
    s: f64,
    out: *mut f64,
) -> ParabStatus {
    guard(|| {
        let w = get(w, "w")?;
        let p = surface_point(&w.0, xi, t, "xi")?;
        let q = surface_point(&w.0, eta, s, "eta")?;
        write(out, "out", surface_v0::kernel_P_v0(n, &w.0, &p, &q)?)
    })
}

/// `(C, δ)` kernel with one point on the rim `t = 1`; requires `β = -1/2`.
/// `xi` is the rim point.
#[no_mangle]
pub unsafe extern "C" fn parab_v0_cesaro_kernel_rim(
    w: *const ParabWeightV0,
    n: usize,
    delta: f64,
    xi: *const f64,
    eta: *const f64,
    s: f64,
    out: *mut f64,
) -> ParabStatus {
    guard(|| {
        let w = get(w, "w")?;
        let spec = CesaroSpec::new(n, delta)?;
        let xi = slice(xi, w.0.d, "xi")?;
        let q = surface_point(&w.0, eta, s, "eta")?;
        write(out, "out", surface_v0::cesaro_kernel_boundary(spec, &w.0, xi, &q)?)
    })
}

// ---- solid paraboloid ----

#[no_mangle]
pub unsafe extern "C" fn parab_weight_v_new(
    d: usize,
    beta: f64,
    gamma: f64,
    mu: f64,
    out: *mut *mut ParabWeightV,
) -> ParabStatus {
    guard(|| boxed(out, ParabWeightV(WeightV::new(d, beta, gamma, mu)?)))
}

#[no_mangle]
pub unsafe extern "C" fn parab_weight_v_free(w: *mut ParabWeightV) {
    free(w)
}

unsafe fn solid_point(w: &WeightV, x: *const f64, t: f64, name: &str) -> Outcome<SolidPoint> {
    Ok(SolidPoint::new(slice(x, w.d, name)?.to_vec(), t)?)
}

/// Basis element `𝐐_{m,(j,ℓ)}^n` at `(x, t)` with `|x|² ≤ t ≤ 1`.
#[no_mangle]
pub unsafe extern "C" fn parab_v_basis(
    w: *const ParabWeightV,
    n: usize,
    m: usize,
    j: usize,
    ell: usize,
    x: *const f64,
    t: f64,
    out: *mut f64,
) -> ParabStatus {
    guard(|| {
        let w = get(w, "w")?;
        let p = solid_point(&w.0, x, t, "x")?;
        write(
            out,
            "out",
            solid_v::basis_bQ_eval(n, m, BallIndex { j, ell }, &w.0, &p)?,
        )
    })
}

/// Reproducing kernel of the degree-`n` component; requires `β ≥ 0`, `μ ≥ 0`.
#[no_mangle]
pub unsafe extern "C" fn parab_v_kernel(
    w: *const ParabWeightV,
    n: usize,
    x: *const f64,
    t: f64,
    y: *const f64,
    s: f64,
    out: *mut f64,
) -> ParabStatus {
    guard(|| {
        let w = get(w, "w")?;
        let p = solid_point(&w.0, x, t, "x")?;
        let q = solid_point(&w.0, y, s, "y")?;
        write(out, "out", solid_v::kernel_P_v(n, &w.0, &p, &q)?)
    })
}

/// `(C, δ)` kernel with one point `(x, 1)` on the top; requires `β = 0`.
#[no_mangle]
pub unsafe extern "C" fn parab_v_cesaro_kernel_top(
    w: *const ParabWeightV,
    n: usize,
    delta: f64,
    x: *const f64,
    y: *const f64,
    s: f64,
    out: *mut f64,
) -> ParabStatus {
    guard(|| {
        let w = get(w, "w")?;
        let spec = CesaroSpec::new(n, delta)?;
        let x = slice(x, w.0.d, "x")?;
        let q = solid_point(&w.0, y, s, "y")?;
        write(out, "out", solid_v::cesaro_kernel_top(spec, &w.0, x, &q)?)
    })
}

// ---- harness ----

/// New configuration with defaults; `command` is a CLI command name such as
/// `"ortho-check"` and `domain` one of `"U"`, `"V0"`, `"V"`.
#[no_mangle]
pub unsafe extern "C" fn parab_config_new(
    command: *const c_char,
    domain: *const c_char,
    out: *mut *mut ParabConfig,
) -> ParabStatus {
    guard(|| {
        let command: Command = string(command, "command")?.parse()?;
        let domain: Domain = string(domain, "domain")?.parse()?;
        boxed(out, ParabConfig(ExperimentConfig::new(command, domain)))
    })
}

#[no_mangle]
pub unsafe extern "C" fn parab_config_free(c: *mut ParabConfig) {
    free(c)
}

/// Sets one key with the same names and syntax as a config file line.
#[no_mangle]
pub unsafe extern "C" fn parab_config_set(
    c: *mut ParabConfig,
    key: *const c_char,
    value: *const c_char,
) -> ParabStatus {
    guard(|| {
        let c = c.as_mut().ok_or_else(|| null("config"))?;
        Ok(c.0.set(string(key, "key")?, string(value, "value")?)?)
    })
}

/// Runs the configured command. Check failures are not an error: inspect
/// [`parab_report_all_pass`].
#[no_mangle]
pub unsafe extern "C" fn parab_run(c: *const ParabConfig, out: *mut *mut ParabReport) -> ParabStatus {
    guard(|| {
        let c = get(c, "config")?;
        let report = harness::run(&c.0)?;
        boxed(out, ParabReport(report))
    })
}

#[no_mangle]
pub unsafe extern "C" fn parab_report_free(r: *mut ParabReport) {
    free(r)
}

/// Number of rows, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn parab_report_len(r: *const ParabReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.rows.len())
}

/// 1 if every row passes, 0 otherwise or for a null handle.
#[no_mangle]
pub unsafe extern "C" fn parab_report_all_pass(r: *const ParabReport) -> i32 {
    r.as_ref().map_or(0, |r| r.0.all_pass() as i32)
}

/// Measured value, tolerance and pass flag of row `i`.
#[no_mangle]
pub unsafe extern "C" fn parab_report_row(
    r: *const ParabReport,
    i: usize,
    measured: *mut f64,
    tolerance: *mut f64,
    pass: *mut i32,
) -> ParabStatus {
    guard(|| {
        let r = get(r, "report")?;
        let row =
            r.0.rows
                .get(i)
                .ok_or_else(|| Failure(ParabStatus::IndexOutOfRange, format!("row {i} of {}", r.0.rows.len())))?;
        write(measured, "measured", row.measured)?;
        write(tolerance, "tolerance", row.tolerance)?;
        write(pass, "pass", row.pass as i32)
    })
}

/// Writes the report as CSV to `path`.
#[no_mangle]
pub unsafe extern "C" fn parab_report_write_csv(r: *const ParabReport, path: *const c_char) -> ParabStatus {
    guard(|| {
        let r = get(r, "report")?;
        let path = string(path, "path")?;
        let file = std::fs::File::create(path).map_err(|e| Failure(ParabStatus::Io, format!("{path}: {e}")))?;
        r.0.write_csv(std::io::BufWriter::new(file))
            .map_err(|e| Failure(ParabStatus::Io, format!("{path}: {e}")))
    })
}
