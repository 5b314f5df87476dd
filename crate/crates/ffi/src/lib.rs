//! C ABI for the mixedflow simulator.
//!
//! Every function returns an [`MfStatus`]; on failure a message is available
//! from [`mf_last_error`] on the same thread. Simulations are opaque handles
//! created by `mf_simulation_new*` and released with [`mf_simulation_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mixedflow::analysis::fit_sphere;
use mixedflow::flow::{FlowConfig, FlowEngine, FlowState};
use mixedflow::harmonics::{Coeffs, RadialField};
use mixedflow::io::parse_config;
use mixedflow::speeds::SpeedKind;
use mixedflow::Error;

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Configuration or parse error.
    Config = 3,
    /// The surface left the admissible class or a step was rejected.
    Inadmissible = 4,
    /// An iterative fit did not converge.
    NotConverged = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

/// Per-record diagnostics of a simulation.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MfDiagnostics {
    pub t: f64,
    pub h_k: f64,
    pub volume: f64,
    pub sup_g: f64,
    pub sup_rho: f64,
    pub sphere_residual_sup: f64,
}

/// Opaque simulation handle.
pub struct MfSimulation {
    engine: FlowEngine,
    state: FlowState,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> MfStatus {
    match e {
        Error::Config(_) | Error::Parse { .. } | Error::ConstraintIndex { .. } => MfStatus::Config,
        Error::BadSpeedParameter { .. } | Error::SpeedNotAdmissible(_) => MfStatus::Config,
        Error::Inadmissible { .. }
        | Error::InadmissibleSphere { .. }
        | Error::NonFinite { .. }
        | Error::StepRejected { .. }
        | Error::NegativePowerBase { .. }
        | Error::ConstraintDegenerate(_) => MfStatus::Inadmissible,
        Error::FitDiverged(_) | Error::DecayFit(_) => MfStatus::NotConverged,
        _ => MfStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (MfStatus, String)>) -> MfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MfStatus::Internal
        }
    }
}

fn lift<T>(r: mixedflow::Result<T>) -> Result<T, (MfStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (MfStatus, String) {
    (MfStatus::NullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (MfStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (MfStatus::InvalidArgument, "string is not UTF-8".into()))
}

unsafe fn sim_ref<'a>(sim: *const MfSimulation) -> Result<&'a MfSimulation, (MfStatus, String)> {
    sim.as_ref().ok_or_else(null)
}

unsafe fn sim_mut<'a>(sim: *mut MfSimulation) -> Result<&'a mut MfSimulation, (MfStatus, String)> {
    sim.as_mut().ok_or_else(null)
}

fn boxed(engine: FlowEngine, rho: RadialField) -> *mut MfSimulation {
    Box::into_raw(Box::new(MfSimulation {
        engine,
        state: FlowState { t: 0.0, rho },
    }))
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Create a simulation at `ρ = 0` with the imex integrator and default step.
/// `speed` uses the config grammar, e.g. `"power_mean m=1 beta=2"`.
///
/// # Safety
/// `speed` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_simulation_new(
    n: usize,
    radius: f64,
    k: i32,
    speed: *const c_char,
    l_max: usize,
    out: *mut *mut MfSimulation,
) -> MfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let kind: SpeedKind = read_str(speed)?.parse().map_err(|e: String| (MfStatus::Config, e))?;
        let mut cfg = lift(FlowConfig::new(n, radius, k, kind))?;
        cfg.l_max = l_max;
        let engine = lift(FlowEngine::new(cfg))?;
        let rho = RadialField::zero(engine.grid(), radius);
        *out = boxed(engine, rho);
        Ok(())
    })
}

/// Create a simulation from the text of a `key = value` config file,
/// including its initial data.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_simulation_from_config(text: *const c_char, out: *mut *mut MfSimulation) -> MfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let spec = lift(parse_config(read_str(text)?))?;
        let engine = lift(FlowEngine::new(spec.flow))?;
        let rho = lift(spec.init.build(engine.grid(), engine.config().radius))?;
        *out = boxed(engine, rho);
        Ok(())
    })
}

/// # Safety
/// `sim` must be null or a handle from `mf_simulation_new*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mf_simulation_free(sim: *mut MfSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Number of harmonic coefficients of the state.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_simulation_coeff_count(sim: *const MfSimulation, out: *mut usize) -> MfStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        *out.as_mut().ok_or_else(null)? = s.state.rho.coeffs().len();
        Ok(())
    })
}

/// Copy the coefficients (degree-major order) into `buf[0..len]`.
///
/// # Safety
/// `sim` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn mf_simulation_get_coeffs(sim: *const MfSimulation, buf: *mut f64, len: usize) -> MfStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        if buf.is_null() {
            return Err(null());
        }
        let c = s.state.rho.coeffs().as_slice();
        if len < c.len() {
            return Err((MfStatus::BufferTooSmall, format!("need {} values, got {len}", c.len())));
        }
        ptr::copy_nonoverlapping(c.as_ptr(), buf, c.len());
        Ok(())
    })
}

/// Replace the state by the given coefficients and reset time to 0.
///
/// # Safety
/// `sim` must be a live handle and `data` valid for `len` reads.
#[no_mangle]
pub unsafe extern "C" fn mf_simulation_set_coeffs(sim: *mut MfSimulation, data: *const f64, len: usize) -> MfStatus {
    guard(|| {
        let s = sim_mut(sim)?;
        if data.is_null() {
            return Err(null());
        }
        let cfg = s.engine.config();
        let values = std::slice::from_raw_parts(data, len).to_vec();
        let coeffs = lift(Coeffs::from_vec(cfg.n, cfg.l_max, values))?;
        let rho = lift(s.engine.field(coeffs))?;
        lift(rho.check_admissible())?;
        s.state = FlowState { t: 0.0, rho };
        Ok(())
    })
}

/// Advance `steps` steps of size `dt` (`dt <= 0` selects the default step)
/// with the configured integrator. On failure the state is left at the last
/// accepted step.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mf_simulation_advance(sim: *mut MfSimulation, steps: usize, dt: f64) -> MfStatus {
    guard(|| {
        let s = sim_mut(sim)?;
        let h = if dt > 0.0 { dt } else { s.engine.config().effective_dt() };
        for _ in 0..steps {
            s.state = lift(s.engine.step(&s.state, h))?;
        }
        Ok(())
    })
}

/// Diagnostics of the current state.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_simulation_diagnostics(sim: *const MfSimulation, out: *mut MfDiagnostics) -> MfStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let out = out.as_mut().ok_or_else(null)?;
        let v = lift(s.engine.evaluate_g(&s.state.rho))?;
        let d = lift(s.engine.diagnostics(&s.state, &v))?;
        *out = MfDiagnostics {
            t: d.t,
            h_k: d.h_k,
            volume: d.volume,
            sup_g: d.sup_g,
            sup_rho: d.sup_rho,
            sphere_residual_sup: d.sphere_residual_sup,
        };
        Ok(())
    })
}

/// Fit a round sphere to the state: writes `(z₀, z₁, …, z_{n+1})` to
/// `z[0..n+2]` and the sup-norm of the residual to `residual_sup`.
///
/// # Safety
/// `sim` must be a live handle, `z` valid for `len` writes and
/// `residual_sup` null or valid.
#[no_mangle]
pub unsafe extern "C" fn mf_simulation_fit_sphere(
    sim: *const MfSimulation,
    z: *mut f64,
    len: usize,
    residual_sup: *mut f64,
) -> MfStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        if z.is_null() {
            return Err(null());
        }
        let fit = lift(fit_sphere(&s.state.rho, s.engine.grid()))?;
        let coords = fit.coords.to_vec();
        if len < coords.len() {
            return Err((MfStatus::BufferTooSmall, format!("need {} values, got {len}", coords.len())));
        }
        ptr::copy_nonoverlapping(coords.as_ptr(), z, coords.len());
        if let Some(r) = residual_sup.as_mut() {
            *r = fit.residual_sup();
        }
        Ok(())
    })
}

/// Current simulation time.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_simulation_time(sim: *const MfSimulation, out: *mut f64) -> MfStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        *out.as_mut().ok_or_else(null)? = s.state.t;
        Ok(())
    })
}

/// Linearized decay rate `-F' (l-1)(l+n)/R²` of degree-`l` perturbations.
#[no_mangle]
pub extern "C" fn mf_linear_rate(n: usize, radius: f64, fprime: f64, l: usize) -> f64 {
    mixedflow::flow::linear_rate(n, radius, fprime, l)
}
