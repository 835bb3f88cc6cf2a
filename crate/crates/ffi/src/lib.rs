//! C ABI for the cojam simulator.
//!
//! Scenarios are opaque heap handles created by [`cojam_scenario_new`] and
//! released with [`cojam_scenario_free`]. Every fallible call returns a
//! [`CojamStatus`]; on failure [`cojam_last_error_message`] describes the
//! error for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cojam::channel::ChannelVector;
use cojam::controller::advance;
use cojam::harness::{build_scenario, ScenarioConfig};
use cojam::jamming::leakage_phi_closed_form;
use cojam::{Error, Scenario};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CojamStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Geometry = 4,
    DegenerateChannel = 5,
    Collision = 6,
    ProbeInfeasible = 7,
    Placement = 8,
    Io = 9,
    Panic = 10,
}

impl From<&Error> for CojamStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::HelperIndex { .. }
            | Error::InvalidParameter(_)
            | Error::NullingViolation { .. } => CojamStatus::InvalidArgument,
            Error::Geometry(_) | Error::CoincidentPositions => CojamStatus::Geometry,
            Error::DegenerateChannel => CojamStatus::DegenerateChannel,
            Error::Collision { .. } => CojamStatus::Collision,
            Error::ProbeInfeasible { .. } => CojamStatus::ProbeInfeasible,
            Error::Placement { .. } => CojamStatus::Placement,
            Error::Config(_) => CojamStatus::Config,
            Error::Io { .. } => CojamStatus::Io,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CojamComplex {
    pub re: f64,
    pub im: f64,
}

/// Secrecy-rate breakdown in bits per channel use.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CojamRateReport {
    /// Signed rate; negative when Eve's channel is better than Bob's.
    pub secrecy_rate: f64,
    pub rate_supremum: f64,
    pub bob_snr: f64,
    pub eve_sinr: f64,
    pub total_leakage: f64,
}

/// Opaque simulation handle.
pub struct CojamScenario {
    scenario: Scenario,
    step: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

struct Failure(CojamStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(CojamStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CojamStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CojamStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            CojamStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            CojamStatus::Panic
        }
    }
}

/// Message for the most recent failed call on this thread, or "" after a success.
/// The pointer stays valid until the next cojam call on the same thread.
#[no_mangle]
pub extern "C" fn cojam_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Builds a scenario from a TOML config (NULL for the reference scenario).
/// `helper_count` 0 keeps the config's count. On success `*out` owns a new handle.
///
/// # Safety
/// `config_toml` is NULL or a NUL-terminated UTF-8 string; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cojam_scenario_new(
    config_toml: *const c_char,
    seed: u64,
    helper_count: usize,
    out: *mut *mut CojamScenario,
) -> CojamStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let file = if config_toml.is_null() {
            ScenarioConfig::default()
        } else {
            let text = CStr::from_ptr(config_toml).to_str().map_err(|e| {
                Failure(
                    CojamStatus::InvalidArgument,
                    format!("config is not UTF-8: {e}"),
                )
            })?;
            ScenarioConfig::from_toml_str(text)?
        };
        let mut config = file.resolve()?;
        if helper_count > 0 {
            config = config.with_helper_count(helper_count);
        }
        let scenario = build_scenario(&config, seed)?;
        *out = Box::into_raw(Box::new(CojamScenario { scenario, step: 0 }));
        Ok(())
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `handle` is NULL or was returned by `cojam_scenario_new` and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cojam_scenario_free(handle: *mut CojamScenario) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Runs `n_steps` controller steps. On error the handle keeps its last good state.
///
/// # Safety
/// `handle` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn cojam_scenario_advance(
    handle: *mut CojamScenario,
    n_steps: usize,
) -> CojamStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("handle"))?;
        for _ in 0..n_steps {
            let (next, _) = advance(
                &h.scenario,
                &h.scenario.layout,
                &h.scenario.controller,
                h.step + 1,
            )?;
            h.scenario.layout = next;
            h.step += 1;
        }
        Ok(())
    })
}

/// Secrecy rate of the current helper positions.
///
/// # Safety
/// `handle` is a live handle; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cojam_scenario_rate(
    handle: *const CojamScenario,
    out: *mut CojamRateReport,
) -> CojamStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = h.scenario.rate(&h.scenario.layout)?;
        *out = CojamRateReport {
            secrecy_rate: r.secrecy_rate,
            rate_supremum: r.rate_supremum,
            bob_snr: r.bob_snr_term,
            eve_sinr: r.eve_sinr_term,
            total_leakage: r.total_leakage,
        };
        Ok(())
    })
}

/// Number of helpers and number of steps taken so far.
///
/// # Safety
/// `handle` is a live handle; each output pointer is valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn cojam_scenario_info(
    handle: *const CojamScenario,
    helper_count: *mut usize,
    steps_taken: *mut usize,
) -> CojamStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        if let Some(c) = helper_count.as_mut() {
            *c = h.scenario.layout.helpers.len();
        }
        if let Some(s) = steps_taken.as_mut() {
            *s = h.step;
        }
        Ok(())
    })
}

/// Center of helper `index` in meters.
///
/// # Safety
/// `handle` is a live handle; `x` and `y` are valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cojam_scenario_helper_position(
    handle: *const CojamScenario,
    index: usize,
    x: *mut f64,
    y: *mut f64,
) -> CojamStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        let x = x.as_mut().ok_or_else(|| null("x"))?;
        let y = y.as_mut().ok_or_else(|| null("y"))?;
        let c = h.scenario.layout.helper(index)?.center;
        (*x, *y) = (c.x, c.y);
        Ok(())
    })
}

unsafe fn channel(
    data: *const CojamComplex,
    len: usize,
    what: &str,
) -> Result<ChannelVector, Failure> {
    if data.is_null() {
        return Err(null(what));
    }
    let items = std::slice::from_raw_parts(data, len);
    Ok(ChannelVector::from_iterator(
        len,
        items.iter().map(|c| Complex64::new(c.re, c.im)),
    ))
}

/// Eve-side jamming gain `φ` of a helper with channels `h` (to Bob) and `g` (to Eve).
///
/// # Safety
/// `h` and `g` point to `n_antennas` elements each; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cojam_leakage_phi(
    h: *const CojamComplex,
    g: *const CojamComplex,
    n_antennas: usize,
    out: *mut f64,
) -> CojamStatus {
    guard(|| {
        if n_antennas < 2 {
            return Err(Failure(
                CojamStatus::InvalidArgument,
                "need at least 2 antennas".into(),
            ));
        }
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let h = channel(h, n_antennas, "h")?;
        let g = channel(g, n_antennas, "g")?;
        *out = leakage_phi_closed_form(&h, &g)?;
        Ok(())
    })
}
