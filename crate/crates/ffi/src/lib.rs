//! C interface to the `vpsplit` solver.
//!
//! A simulation is an opaque handle created by [`vp_simulation_new`] and
//! released by [`vp_simulation_free`]. Every fallible call returns a
//! [`VpStatus`]; on failure the message is kept per thread and can be read
//! with [`vp_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vpsplit::runner::{self, RunConfig, Simulation};
use vpsplit::{DiagRecord, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidConfig = 2,
    NumericalBlowUp = 3,
    VerificationFailed = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Grid, scheme and initial condition of a simulation.
///
/// `scheme` is a NUL-terminated scheme name such as `"o6-13"`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VpConfig {
    pub dim: u32,
    pub scheme: *const c_char,
    pub nx: u32,
    pub nv: u32,
    pub k: f64,
    pub v_max: f64,
    pub amplitude: f64,
    pub order: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VpDiagnostics {
    pub t: f64,
    pub energy: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub mass: f64,
    pub l1: f64,
    pub l2: f64,
    pub f_min: f64,
    pub f_max: f64,
}

impl From<DiagRecord> for VpDiagnostics {
    fn from(r: DiagRecord) -> Self {
        Self {
            t: r.t,
            energy: r.energy,
            kinetic: r.kinetic,
            potential: r.potential,
            mass: r.mass,
            l1: r.l1,
            l2: r.l2,
            f_min: r.f_min,
            f_max: r.f_max,
        }
    }
}

/// Opaque simulation handle.
pub struct VpSimulation {
    sim: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: VpStatus, message: impl Into<String>) -> VpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = message.into());
    status
}

fn from_error(e: Error) -> VpStatus {
    let status = match e {
        Error::NonFinite { .. } => VpStatus::NumericalBlowUp,
        _ => VpStatus::InvalidConfig,
    };
    fail(status, e.to_string())
}

/// Runs `body`, converting a panic into [`VpStatus::Panic`].
fn guard(body: impl FnOnce() -> VpStatus) -> VpStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|_| fail(VpStatus::Panic, "internal panic"))
}

static DEFAULT_SCHEME: &CStr = c"strang";

/// Fills `out` with the one-dimensional Landau defaults (Strang, 256 x 256).
///
/// # Safety
/// `out` must be null or point to writable memory for one `VpConfig`.
#[no_mangle]
pub unsafe extern "C" fn vp_config_default(out: *mut VpConfig) -> VpStatus {
    if out.is_null() {
        return fail(VpStatus::NullPointer, "config pointer is null");
    }
    let d = RunConfig::default();
    // SAFETY: checked non-null above; the caller guarantees writability.
    unsafe {
        out.write(VpConfig {
            dim: d.dim as u32,
            scheme: DEFAULT_SCHEME.as_ptr(),
            nx: d.nx as u32,
            nv: d.nv as u32,
            k: d.k,
            v_max: d.v_max,
            amplitude: d.amplitude,
            order: d.order as u32,
        })
    };
    VpStatus::Ok
}

fn run_config(cfg: &VpConfig) -> Result<RunConfig, VpStatus> {
    if cfg.scheme.is_null() {
        return Err(fail(VpStatus::NullPointer, "scheme name is null"));
    }
    // SAFETY: non-null, and the caller guarantees NUL termination.
    let name = unsafe { CStr::from_ptr(cfg.scheme) };
    let name = name
        .to_str()
        .map_err(|_| fail(VpStatus::InvalidConfig, "scheme name is not UTF-8"))?;
    let rc = RunConfig {
        dim: cfg.dim as usize,
        scheme: name.to_string(),
        nx: cfg.nx as usize,
        nv: cfg.nv as usize,
        k: cfg.k,
        v_max: cfg.v_max,
        amplitude: cfg.amplitude,
        order: cfg.order as usize,
        ..RunConfig::default()
    };
    rc.validate().map_err(from_error)?;
    Ok(rc)
}

/// Creates a simulation at `t = 0` and stores its handle in `out`.
///
/// # Safety
/// `cfg` must be null or point to a valid `VpConfig` whose `scheme` is null
/// or NUL-terminated; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn vp_simulation_new(
    cfg: *const VpConfig,
    out: *mut *mut VpSimulation,
) -> VpStatus {
    guard(|| {
        if cfg.is_null() || out.is_null() {
            return fail(VpStatus::NullPointer, "null argument to vp_simulation_new");
        }
        // SAFETY: checked non-null; validity is the caller's contract.
        let cfg = unsafe { &*cfg };
        let rc = match run_config(cfg) {
            Ok(rc) => rc,
            Err(status) => return status,
        };
        match Simulation::new(&rc) {
            Ok(sim) => {
                let handle = Box::into_raw(Box::new(VpSimulation { sim }));
                // SAFETY: checked non-null above.
                unsafe { out.write(handle) };
                VpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a handle from [`vp_simulation_new`]. Null is ignored.
///
/// # Safety
/// `sim` must be null or a live handle that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn vp_simulation_free(sim: *mut VpSimulation) {
    if !sim.is_null() {
        // SAFETY: the handle came from Box::into_raw and is released once.
        drop(unsafe { Box::from_raw(sim) });
    }
}

/// Borrows the simulation behind `sim`, or reports a null handle.
///
/// # Safety
/// `sim` must be null or a live handle with no other active borrow.
unsafe fn handle<'a>(sim: *mut VpSimulation) -> Result<&'a mut VpSimulation, VpStatus> {
    // SAFETY: forwarded from the caller.
    unsafe { sim.as_mut() }.ok_or_else(|| fail(VpStatus::NullPointer, "simulation handle is null"))
}

/// Advances the simulation by `steps` steps of size `tau`.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vp_simulation_step(sim: *mut VpSimulation, tau: f64, steps: u64) -> VpStatus {
    guard(|| {
        // SAFETY: forwarded from the caller.
        let h = match unsafe { handle(sim) } {
            Ok(h) => h,
            Err(s) => return s,
        };
        if !tau.is_finite() {
            return fail(VpStatus::InvalidConfig, format!("step size {tau} is not finite"));
        }
        for _ in 0..steps {
            if let Err(e) = h.sim.step(tau) {
                return from_error(e);
            }
        }
        VpStatus::Ok
    })
}

/// Writes the current time to `out`.
///
/// # Safety
/// `sim` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn vp_simulation_time(sim: *mut VpSimulation, out: *mut f64) -> VpStatus {
    // SAFETY: forwarded from the caller.
    let h = match unsafe { handle(sim) } {
        Ok(h) => h,
        Err(s) => return s,
    };
    if out.is_null() {
        return fail(VpStatus::NullPointer, "output pointer is null");
    }
    // SAFETY: checked non-null.
    unsafe { out.write(h.sim.time()) };
    VpStatus::Ok
}

/// Measures energies, mass, norms and extrema of the current state.
///
/// # Safety
/// `sim` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn vp_simulation_diagnostics(
    sim: *mut VpSimulation,
    out: *mut VpDiagnostics,
) -> VpStatus {
    guard(|| {
        // SAFETY: forwarded from the caller.
        let h = match unsafe { handle(sim) } {
            Ok(h) => h,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(VpStatus::NullPointer, "output pointer is null");
        }
        // SAFETY: checked non-null.
        unsafe { out.write(h.sim.diagnostics().into()) };
        VpStatus::Ok
    })
}

/// Number of grid values held by the simulation.
///
/// # Safety
/// `sim` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn vp_simulation_values_len(sim: *mut VpSimulation, out: *mut usize) -> VpStatus {
    // SAFETY: forwarded from the caller.
    let h = match unsafe { handle(sim) } {
        Ok(h) => h,
        Err(s) => return s,
    };
    if out.is_null() {
        return fail(VpStatus::NullPointer, "output pointer is null");
    }
    // SAFETY: checked non-null.
    unsafe { out.write(h.sim.state().values().len()) };
    VpStatus::Ok
}

/// Copies the distribution values, x-major, into `buf` of length `len`.
///
/// # Safety
/// `sim` must be null or a live handle; `buf` must be null or valid for
/// `len` writes.
#[no_mangle]
pub unsafe extern "C" fn vp_simulation_copy_values(
    sim: *mut VpSimulation,
    buf: *mut f64,
    len: usize,
) -> VpStatus {
    // SAFETY: forwarded from the caller.
    let h = match unsafe { handle(sim) } {
        Ok(h) => h,
        Err(s) => return s,
    };
    if buf.is_null() {
        return fail(VpStatus::NullPointer, "buffer is null");
    }
    let values = h.sim.state().values();
    if len < values.len() {
        return fail(
            VpStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", values.len()),
        );
    }
    // SAFETY: buf is valid for len >= values.len() writes and cannot alias
    // the simulation's own storage.
    unsafe { ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len()) };
    VpStatus::Ok
}

/// Checks every registered coefficient set against its consistency and
/// order conditions.
#[no_mangle]
pub extern "C" fn vp_verify_schemes() -> VpStatus {
    guard(|| {
        let report = runner::verify_schemes();
        if report.passed() {
            VpStatus::Ok
        } else {
            fail(
                VpStatus::VerificationFailed,
                format!("failing schemes: {}", report.failures().join(", ")),
            )
        }
    })
}

/// Copies the calling thread's last error message into `buf` (truncated and
/// always NUL-terminated when `len > 0`). Returns the length the full
/// message needs including the terminator.
///
/// # Safety
/// `buf` must be null or valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn vp_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            // SAFETY: buf is valid for len > n writes.
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                buf.add(n).write(0);
            }
        }
        bytes.len() + 1
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_statuses() {
        let blow_up = Error::NonFinite { step: 3, time: 1.5 };
        let text = blow_up.to_string();
        assert_eq!(from_error(blow_up), VpStatus::NumericalBlowUp);
        assert_eq!(LAST_ERROR.with(|e| e.borrow().clone()), text);
        assert_eq!(from_error(Error::EmptySeries), VpStatus::InvalidConfig);
        assert_eq!(guard(|| panic!("boom")), VpStatus::Panic);
    }
}
