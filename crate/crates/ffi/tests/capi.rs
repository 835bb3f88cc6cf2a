use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use cojam_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cojam_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn new_scenario(
    config: Option<&str>,
    seed: u64,
    helpers: usize,
) -> (CojamStatus, *mut CojamScenario) {
    let text = config.map(|c| CString::new(c).unwrap());
    let mut handle = ptr::null_mut();
    let status = unsafe {
        cojam_scenario_new(
            text.as_ref().map_or(ptr::null(), |t| t.as_ptr()),
            seed,
            helpers,
            &mut handle,
        )
    };
    (status, handle)
}

fn rate(handle: *const CojamScenario) -> CojamRateReport {
    let mut report = CojamRateReport {
        secrecy_rate: f64::NAN,
        rate_supremum: f64::NAN,
        bob_snr: f64::NAN,
        eve_sinr: f64::NAN,
        total_leakage: f64::NAN,
    };
    assert_eq!(
        unsafe { cojam_scenario_rate(handle, &mut report) },
        CojamStatus::Ok
    );
    report
}

#[test]
fn reference_scenario_lifecycle() {
    let (status, handle) = new_scenario(None, 3, 2);
    assert_eq!(status, CojamStatus::Ok, "{}", last_error());
    assert!(!handle.is_null());

    let (mut count, mut steps) = (0usize, 99usize);
    assert_eq!(
        unsafe { cojam_scenario_info(handle, &mut count, &mut steps) },
        CojamStatus::Ok
    );
    assert_eq!((count, steps), (2, 0));

    let before = rate(handle);
    assert_eq!(before.rate_supremum, 101f64.log2());
    assert_eq!(before.bob_snr, 100.0);

    let (mut x, mut y) = (0.0, 0.0);
    assert_eq!(
        unsafe { cojam_scenario_helper_position(handle, 0, &mut x, &mut y) },
        CojamStatus::Ok
    );
    assert_eq!(x, 0.75);
    assert!((y - 2.5).abs() <= 0.1);

    assert_eq!(
        unsafe { cojam_scenario_advance(handle, 5) },
        CojamStatus::Ok
    );
    assert_eq!(
        unsafe { cojam_scenario_info(handle, ptr::null_mut(), &mut steps) },
        CojamStatus::Ok
    );
    assert_eq!(steps, 5);
    let after = rate(handle);
    assert!(after.secrecy_rate.is_finite());
    assert!(after.secrecy_rate <= after.rate_supremum);

    unsafe { cojam_scenario_free(handle) };
}

#[test]
fn handle_matches_library_trajectory() {
    let (_, handle) = new_scenario(Some("steps = 4\n"), 7, 1);
    assert_eq!(
        unsafe { cojam_scenario_advance(handle, 4) },
        CojamStatus::Ok
    );
    let report = rate(handle);
    let config = cojam::harness::ScenarioConfig::from_toml_str("steps = 4\n")
        .unwrap()
        .resolve()
        .unwrap();
    let record = cojam::harness::sweep::run_cell(&config, 1, 7).unwrap();
    assert_eq!(report.secrecy_rate, record.last().rate.secrecy_rate);
    unsafe { cojam_scenario_free(handle) };
}

#[test]
fn bad_config_reports_status_and_message() {
    let (status, handle) = new_scenario(Some("wavelenght = 0.3\n"), 1, 0);
    assert_eq!(status, CojamStatus::Config);
    assert!(handle.is_null());
    assert!(last_error().contains("wavelenght"));

    let (status, _) = new_scenario(Some("seeds = []\n"), 1, 0);
    assert_eq!(status, CojamStatus::Config);
}

#[test]
fn null_pointers_rejected() {
    let mut x = 0.0;
    let status = unsafe { cojam_scenario_helper_position(ptr::null(), 0, &mut x, &mut x) };
    assert_eq!(status, CojamStatus::NullPointer);
    assert!(last_error().contains("handle"));
    assert_eq!(
        unsafe { cojam_scenario_new(ptr::null(), 1, 1, ptr::null_mut()) },
        CojamStatus::NullPointer
    );
    unsafe { cojam_scenario_free(ptr::null_mut()) };
}

#[test]
fn helper_index_out_of_range() {
    let (_, handle) = new_scenario(None, 1, 1);
    let (mut x, mut y) = (0.0, 0.0);
    let status = unsafe { cojam_scenario_helper_position(handle, 3, &mut x, &mut y) };
    assert_eq!(status, CojamStatus::InvalidArgument);
    unsafe { cojam_scenario_free(handle) };
}

#[test]
fn leakage_phi_examples() {
    let c = |re, im| CojamComplex { re, im };
    let mut phi = f64::NAN;
    let h = [c(1.0, 0.0), c(0.0, 0.0)];
    let g = [c(0.0, 0.0), c(1.0, 0.0)];
    assert_eq!(
        unsafe { cojam_leakage_phi(h.as_ptr(), g.as_ptr(), 2, &mut phi) },
        CojamStatus::Ok
    );
    assert!((phi - 1.0).abs() < 1e-15);

    let aligned = [c(1.0, 0.0), c(0.0, 0.0)];
    assert_eq!(
        unsafe { cojam_leakage_phi(h.as_ptr(), aligned.as_ptr(), 2, &mut phi) },
        CojamStatus::Ok
    );
    assert!(phi.abs() < 1e-15);

    let zero = [c(0.0, 0.0), c(0.0, 0.0)];
    let status = unsafe { cojam_leakage_phi(zero.as_ptr(), g.as_ptr(), 2, &mut phi) };
    assert_eq!(status, CojamStatus::DegenerateChannel);
    let status = unsafe { cojam_leakage_phi(h.as_ptr(), g.as_ptr(), 1, &mut phi) };
    assert_eq!(status, CojamStatus::InvalidArgument);
    let status = unsafe { cojam_leakage_phi(ptr::null(), g.as_ptr(), 2, &mut phi) };
    assert_eq!(status, CojamStatus::NullPointer);
}

#[test]
fn error_message_cleared_on_success() {
    let (status, _) = new_scenario(Some("bogus = 1\n"), 1, 0);
    assert_ne!(status, CojamStatus::Ok);
    assert!(!last_error().is_empty());
    let (status, handle) = new_scenario(None, 1, 1);
    assert_eq!(status, CojamStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe { cojam_scenario_free(handle) };
}

fn header() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("cojam.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "cojam_scenario_new",
        "cojam_scenario_free",
        "cojam_scenario_advance",
        "cojam_scenario_rate",
        "cojam_scenario_info",
        "cojam_scenario_helper_position",
        "cojam_leakage_phi",
        "cojam_last_error_message",
        "typedef struct CojamScenario CojamScenario",
        "COJAM_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(out) = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(header())
            .output()
        else {
            eprintln!("{compiler} not available; skipping");
            continue;
        };
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
