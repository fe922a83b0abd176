//! C ABI for the phasefactor toolkit.
//!
//! Conventions: handles are opaque pointers created and freed by this
//! library; every fallible call returns a [`PfStatus`] and writes its
//! result through an out-pointer; big integers cross the boundary as
//! decimal strings; strings returned through out-pointers are owned by
//! the caller and must be released with [`pf_string_free`]. On any
//! non-Ok status, [`pf_last_error`] describes the failure for the
//! current thread.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_bigint::BigUint;
use phasefactor::driver::{self, RunConfig, StopPolicy};
use phasefactor::report::ReportDocument;
use phasefactor::Error;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PfStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    Utf8 = 2,
    /// Arguments parsed but were rejected (bad integer, even modulus, ...).
    InvalidArgument = 3,
    /// The instance needs more qubits than the simulator cap allows.
    CapExceeded = 4,
    /// The run itself failed; see pf_last_error().
    RunFailed = 5,
    /// An index argument was out of range.
    IndexOutOfRange = 6,
}

/// Backend selector for [`pf_config_set_backend`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PfBackend {
    Simulator = 0,
    Injector = 1,
}

/// Stopping policy selector for [`pf_config_set_policy`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PfPolicy {
    FirstNontrivial = 0,
    /// Stop after `count` distinct nontrivial divisors.
    TargetCount = 1,
    Exhaust = 2,
}

/// Opaque factoring configuration; create with [`pf_config_new`].
pub struct PfConfig(RunConfig);

/// Opaque factoring result; create with [`pf_factor`].
pub struct PfReport {
    document: ReportDocument,
    found_nontrivial: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let cstring = CString::new(msg).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn error_status(e: &Error) -> PfStatus {
    set_error(e.to_string());
    match e {
        Error::QubitCapExceeded { .. } => PfStatus::CapExceeded,
        Error::InvalidConfig(_)
        | Error::EvenModulus { .. }
        | Error::ModulusTooSmall { .. }
        | Error::BaseOutOfRange { .. }
        | Error::ZeroShots
        | Error::ZeroWidth => PfStatus::InvalidArgument,
        _ => PfStatus::RunFailed,
    }
}

/// Last error message for the current thread, or null if none was set.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn pf_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

/// Library version as a static string; never freed by the caller.
#[no_mangle]
pub extern "C" fn pf_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

unsafe fn parse_biguint(ptr: *const c_char, what: &str) -> Result<BigUint, PfStatus> {
    if ptr.is_null() {
        set_error(format!("{what}: null pointer"));
        return Err(PfStatus::NullPointer);
    }
    let text = match CStr::from_ptr(ptr).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error(format!("{what}: not valid UTF-8"));
            return Err(PfStatus::Utf8);
        }
    };
    text.trim().parse().map_err(|_| {
        set_error(format!("{what}: `{text}` is not a decimal integer"));
        PfStatus::InvalidArgument
    })
}

unsafe fn write_string(out: *mut *mut c_char, value: String) -> PfStatus {
    if out.is_null() {
        set_error("output pointer is null");
        return PfStatus::NullPointer;
    }
    match CString::new(value) {
        Ok(s) => {
            *out = s.into_raw();
            PfStatus::Ok
        }
        Err(_) => {
            set_error("result contained an interior NUL byte");
            PfStatus::RunFailed
        }
    }
}

/// Create a configuration for factoring the decimal integer `n`.
/// Defaults: random base per run, 150 shots, 1 run, seed 0, policy
/// first-nontrivial, simulator backend, gcd shortcut off.
///
/// # Safety
/// `n_decimal` must point to a NUL-terminated string and `out` to a
/// writable pointer slot; both must stay valid for the duration of the
/// call.
#[no_mangle]
pub unsafe extern "C" fn pf_config_new(
    n_decimal: *const c_char,
    out: *mut *mut PfConfig,
) -> PfStatus {
    if out.is_null() {
        set_error("output pointer is null");
        return PfStatus::NullPointer;
    }
    let n = match parse_biguint(n_decimal, "n") {
        Ok(n) => n,
        Err(status) => return status,
    };
    *out = Box::into_raw(Box::new(PfConfig(RunConfig::new(n))));
    PfStatus::Ok
}

unsafe fn config_mut<'a>(config: *mut PfConfig) -> Result<&'a mut RunConfig, PfStatus> {
    if config.is_null() {
        set_error("config handle is null");
        return Err(PfStatus::NullPointer);
    }
    Ok(&mut (*config).0)
}

/// Pin the base instead of drawing one per run.
///
/// # Safety
/// `config` must be a live handle from [`pf_config_new`]; `a_decimal`
/// must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pf_config_set_base(
    config: *mut PfConfig,
    a_decimal: *const c_char,
) -> PfStatus {
    let cfg = match config_mut(config) {
        Ok(c) => c,
        Err(s) => return s,
    };
    match parse_biguint(a_decimal, "a") {
        Ok(a) => {
            cfg.a = Some(a);
            PfStatus::Ok
        }
        Err(s) => s,
    }
}

/// # Safety
/// `config` must be a live handle from [`pf_config_new`].
#[no_mangle]
pub unsafe extern "C" fn pf_config_set_shots(config: *mut PfConfig, shots: u64) -> PfStatus {
    match config_mut(config) {
        Ok(cfg) => {
            cfg.shots = shots;
            PfStatus::Ok
        }
        Err(s) => s,
    }
}

/// # Safety
/// `config` must be a live handle from [`pf_config_new`].
#[no_mangle]
pub unsafe extern "C" fn pf_config_set_runs(config: *mut PfConfig, runs: u32) -> PfStatus {
    match config_mut(config) {
        Ok(cfg) => {
            cfg.runs = runs;
            PfStatus::Ok
        }
        Err(s) => s,
    }
}

/// # Safety
/// `config` must be a live handle from [`pf_config_new`].
#[no_mangle]
pub unsafe extern "C" fn pf_config_set_seed(config: *mut PfConfig, seed: u64) -> PfStatus {
    match config_mut(config) {
        Ok(cfg) => {
            cfg.seed = seed;
            PfStatus::Ok
        }
        Err(s) => s,
    }
}

/// # Safety
/// `config` must be a live handle from [`pf_config_new`].
#[no_mangle]
pub unsafe extern "C" fn pf_config_set_backend(
    config: *mut PfConfig,
    backend: PfBackend,
) -> PfStatus {
    match config_mut(config) {
        Ok(cfg) => {
            cfg.backend = match backend {
                PfBackend::Simulator => driver::Backend::Simulator,
                PfBackend::Injector => driver::Backend::Injector,
            };
            PfStatus::Ok
        }
        Err(s) => s,
    }
}

/// Set the stopping policy; `count` is read only for `TargetCount`.
///
/// # Safety
/// `config` must be a live handle from [`pf_config_new`].
#[no_mangle]
pub unsafe extern "C" fn pf_config_set_policy(
    config: *mut PfConfig,
    policy: PfPolicy,
    count: u64,
) -> PfStatus {
    let cfg = match config_mut(config) {
        Ok(c) => c,
        Err(s) => return s,
    };
    cfg.policy = match policy {
        PfPolicy::FirstNontrivial => StopPolicy::FirstNontrivial,
        PfPolicy::Exhaust => StopPolicy::Exhaust,
        PfPolicy::TargetCount => {
            if count == 0 {
                set_error("target count must be at least 1");
                return PfStatus::InvalidArgument;
            }
            StopPolicy::TargetCount(count)
        }
    };
    PfStatus::Ok
}

/// Override the lower-register width; 0 restores the minimal default.
///
/// # Safety
/// `config` must be a live handle from [`pf_config_new`].
#[no_mangle]
pub unsafe extern "C" fn pf_config_set_lower_bits(
    config: *mut PfConfig,
    lower_bits: u32,
) -> PfStatus {
    match config_mut(config) {
        Ok(cfg) => {
            cfg.lower_bits = if lower_bits == 0 {
                None
            } else {
                Some(lower_bits as usize)
            };
            PfStatus::Ok
        }
        Err(s) => s,
    }
}

/// # Safety
/// `config` must be a live handle from [`pf_config_new`].
#[no_mangle]
pub unsafe extern "C" fn pf_config_set_gcd_shortcut(
    config: *mut PfConfig,
    enabled: bool,
) -> PfStatus {
    match config_mut(config) {
        Ok(cfg) => {
            cfg.gcd_shortcut = enabled;
            PfStatus::Ok
        }
        Err(s) => s,
    }
}

/// Release a configuration handle. Null is ignored.
///
/// # Safety
/// `config` must be null or a handle from [`pf_config_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pf_config_free(config: *mut PfConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Run the factoring loop and hand back a report handle.
///
/// # Safety
/// `config` must be a live handle from [`pf_config_new`]; `out` must
/// point to a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn pf_factor(config: *const PfConfig, out: *mut *mut PfReport) -> PfStatus {
    if config.is_null() || out.is_null() {
        set_error("config or output pointer is null");
        return PfStatus::NullPointer;
    }
    let run_config = &(*config).0;
    let outcome = catch_unwind(AssertUnwindSafe(|| driver::run(run_config)));
    match outcome {
        Ok(Ok(report)) => {
            let document = ReportDocument::from_report(&report);
            let found_nontrivial = !report.nontrivial_divisors().is_empty();
            *out = Box::into_raw(Box::new(PfReport {
                document,
                found_nontrivial,
            }));
            PfStatus::Ok
        }
        Ok(Err(e)) => error_status(&e),
        Err(_) => {
            set_error("internal panic during factoring run");
            PfStatus::RunFailed
        }
    }
}

unsafe fn report_ref<'a>(report: *const PfReport) -> Result<&'a PfReport, PfStatus> {
    if report.is_null() {
        set_error("report handle is null");
        return Err(PfStatus::NullPointer);
    }
    Ok(&*report)
}

/// True when the aggregated divisor set contains a divisor other than
/// 1 and n.
///
/// # Safety
/// `report` must be a live handle from [`pf_factor`].
#[no_mangle]
pub unsafe extern "C" fn pf_report_found_nontrivial(report: *const PfReport) -> bool {
    report_ref(report).map_or(false, |r| r.found_nontrivial)
}

/// Number of entries in the aggregated divisor set (trivial included).
///
/// # Safety
/// `report` must be a live handle from [`pf_factor`].
#[no_mangle]
pub unsafe extern "C" fn pf_report_divisor_count(report: *const PfReport) -> usize {
    report_ref(report).map_or(0, |r| r.document.divisors.len())
}

/// Fetch divisor `index` (ascending order) as a decimal string.
///
/// # Safety
/// `report` must be a live handle from [`pf_factor`]; `out` must point
/// to a writable pointer slot. Free the result with [`pf_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pf_report_divisor(
    report: *const PfReport,
    index: usize,
    out: *mut *mut c_char,
) -> PfStatus {
    let r = match report_ref(report) {
        Ok(r) => r,
        Err(s) => return s,
    };
    match r.document.divisors.get(index) {
        Some(d) => write_string(out, d.clone()),
        None => {
            set_error(format!(
                "divisor index {index} out of range ({} available)",
                r.document.divisors.len()
            ));
            PfStatus::IndexOutOfRange
        }
    }
}

/// Serialize the full report document as JSON.
///
/// # Safety
/// `report` must be a live handle from [`pf_factor`]; `out` must point
/// to a writable pointer slot. Free the result with [`pf_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pf_report_to_json(
    report: *const PfReport,
    out: *mut *mut c_char,
) -> PfStatus {
    let r = match report_ref(report) {
        Ok(r) => r,
        Err(s) => return s,
    };
    match r.document.to_json() {
        Ok(json) => write_string(out, json),
        Err(e) => error_status(&e),
    }
}

/// Release a report handle. Null is ignored.
///
/// # Safety
/// `report` must be null or a handle from [`pf_factor`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pf_report_free(report: *mut PfReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned through one of this library's
/// out-pointers, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Convert a sampled phase to the candidate order round(phase·n),
/// returned as a decimal string.
///
/// # Safety
/// `n_decimal` must be a NUL-terminated string; `out` must point to a
/// writable pointer slot. Free the result with [`pf_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pf_phase_to_l(
    phase: f64,
    n_decimal: *const c_char,
    out: *mut *mut c_char,
) -> PfStatus {
    let n = match parse_biguint(n_decimal, "n") {
        Ok(n) => n,
        Err(s) => return s,
    };
    match driver::phase_to_l(phase, &n) {
        Ok(l) => write_string(out, l.to_string()),
        Err(e) => error_status(&e),
    }
}

/// Extract divisors of `n` from candidate order `l` with base `a`;
/// the result is a semicolon-separated ascending list of decimals.
///
/// # Safety
/// The three input strings must be NUL-terminated; `out` must point to
/// a writable pointer slot. Free the result with [`pf_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pf_postprocess(
    l_decimal: *const c_char,
    a_decimal: *const c_char,
    n_decimal: *const c_char,
    out: *mut *mut c_char,
) -> PfStatus {
    let l = match parse_biguint(l_decimal, "l") {
        Ok(v) => v,
        Err(s) => return s,
    };
    let a = match parse_biguint(a_decimal, "a") {
        Ok(v) => v,
        Err(s) => return s,
    };
    let n = match parse_biguint(n_decimal, "n") {
        Ok(v) => v,
        Err(s) => return s,
    };
    match driver::postprocess(&l, &a, &n) {
        Ok(divisors) => {
            let joined = divisors
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(";");
            write_string(out, joined)
        }
        Err(e) => error_status(&e),
    }
}
