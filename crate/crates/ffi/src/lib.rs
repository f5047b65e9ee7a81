//! C ABI over the smoothcx engine.
//!
//! Handles are opaque and owned by the caller once returned. Every fallible call
//! returns an [`SmxStatus`]; on failure a message is kept per thread and can be read
//! with [`smx_last_error`]. Strings handed out through `char **` belong to the caller
//! and go back through [`smx_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use smoothcx::cli_io::{self, VerdictDoc};
use smoothcx::series_model::SeriesPresentation;
use smoothcx::smoothing::{analyze, build_witness_morphism, smoothable, verify_harmonic, Verdict};

/// Status codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    /// The instance has no object of the requested kind (e.g. a witness for a
    /// non-smoothable instance).
    Unavailable = 4,
    /// A report failed re-verification.
    Rejected = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmxVerdict {
    NotDiagrammatic = 0,
    NotSolvable = 1,
    IgcInfeasible = 2,
    Smoothable = 3,
}

/// Which DOT picture [`smx_export_dot`] draws.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmxDot {
    Gamma = 0,
    Biftree = 1,
    PartitionTree = 2,
    Witness = 3,
}

/// A parsed series presentation.
pub struct SmxInstance {
    sp: SeriesPresentation,
}

/// The decision for one instance together with its JSON report.
pub struct SmxReport {
    verdict: SmxVerdict,
    degree: u32,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: SmxStatus, msg: impl Into<String>) -> SmxStatus {
    set_error(msg);
    status
}

/// Runs `f`, clearing the last error first and mapping panics to `Internal`.
fn guard(f: impl FnOnce() -> SmxStatus) -> SmxStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            fail(SmxStatus::Internal, msg)
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, SmxStatus> {
    if p.is_null() {
        return Err(fail(SmxStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|e| fail(SmxStatus::InvalidUtf8, e.to_string()))
}

unsafe fn hand_out(s: String, out: *mut *mut c_char) -> SmxStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            SmxStatus::Ok
        }
        Err(_) => fail(SmxStatus::Internal, "output contains a NUL byte"),
    }
}

fn verdict_code(v: &Verdict) -> SmxVerdict {
    match v {
        Verdict::NotDiagrammatic(_) => SmxVerdict::NotDiagrammatic,
        Verdict::NotSolvable(_) => SmxVerdict::NotSolvable,
        Verdict::IgcInfeasible(_) => SmxVerdict::IgcInfeasible,
        Verdict::Smoothable(_) => SmxVerdict::Smoothable,
    }
}

/// Version string of the library. Static, never freed.
#[no_mangle]
pub extern "C" fn smx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn smx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses an instance document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn smx_instance_parse(json: *const c_char, out: *mut *mut SmxInstance) -> SmxStatus {
    guard(|| {
        if out.is_null() {
            return fail(SmxStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let json = match text(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match cli_io::parse_instance(json) {
            Ok(sp) => {
                *out = Box::into_raw(Box::new(SmxInstance { sp }));
                SmxStatus::Ok
            }
            Err(e) => fail(SmxStatus::Parse, e.to_string()),
        }
    })
}

/// # Safety
/// `inst` must come from [`smx_instance_parse`] and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn smx_instance_free(inst: *mut SmxInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Total degree of the instance's series.
///
/// # Safety
/// `inst` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn smx_instance_degree(inst: *const SmxInstance) -> u32 {
    inst.as_ref().map_or(0, |i| i.sp.degree())
}

/// Canonical JSON for the instance.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn smx_instance_to_json(inst: *const SmxInstance, out: *mut *mut c_char) -> SmxStatus {
    guard(|| {
        let (Some(inst), false) = (inst.as_ref(), out.is_null()) else {
            return fail(SmxStatus::NullPointer, "null argument");
        };
        hand_out(cli_io::serialize_instance(&inst.sp), out)
    })
}

/// Decides smoothability. With `witness` set, a smoothable verdict carries a
/// harmonic morphism that has already been verified.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn smx_decide(inst: *const SmxInstance, witness: bool, out: *mut *mut SmxReport) -> SmxStatus {
    guard(|| {
        let (Some(inst), false) = (inst.as_ref(), out.is_null()) else {
            return fail(SmxStatus::NullPointer, "null argument");
        };
        *out = ptr::null_mut();
        let sp = &inst.sp;
        let v = smoothable(sp);
        let hm = match (&v, witness) {
            (Verdict::Smoothable(w), true) => match build_witness_morphism(sp, w) {
                Ok(hm) => match verify_harmonic(&hm, sp) {
                    Ok(()) => Some(hm),
                    Err(e) => return fail(SmxStatus::Internal, format!("witness does not verify: {e}")),
                },
                Err(e) => return fail(SmxStatus::Internal, format!("witness: {e}")),
            },
            _ => None,
        };
        let json = cli_io::to_json(&cli_io::verdict_doc(sp, &v, hm.as_ref()));
        let Ok(json) = CString::new(json) else { return fail(SmxStatus::Internal, "report contains a NUL byte") };
        let report = SmxReport { verdict: verdict_code(&v), degree: hm.map_or(0, |h| h.degree()), json };
        *out = Box::into_raw(Box::new(report));
        SmxStatus::Ok
    })
}

/// # Safety
/// `rep` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn smx_report_verdict(rep: *const SmxReport, out: *mut SmxVerdict) -> SmxStatus {
    guard(|| {
        let (Some(rep), false) = (rep.as_ref(), out.is_null()) else {
            return fail(SmxStatus::NullPointer, "null argument");
        };
        *out = rep.verdict;
        SmxStatus::Ok
    })
}

/// Degree of the witness morphism, 0 when the report carries none.
///
/// # Safety
/// `rep` must be a live report handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn smx_report_witness_degree(rep: *const SmxReport) -> u32 {
    rep.as_ref().map_or(0, |r| r.degree)
}

/// The report as JSON. Borrowed from the handle; valid until [`smx_report_free`].
///
/// # Safety
/// `rep` must be a live report handle or NULL (which yields NULL).
#[no_mangle]
pub unsafe extern "C" fn smx_report_json(rep: *const SmxReport) -> *const c_char {
    rep.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// # Safety
/// `rep` must come from [`smx_decide`] and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn smx_report_free(rep: *mut SmxReport) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// Rebuilds the morphism stored in a SMOOTHABLE report and verifies it against
/// `inst`. Returns `Rejected` if it does not verify.
///
/// # Safety
/// `inst` must be a live handle and `report_json` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn smx_check_witness(inst: *const SmxInstance, report_json: *const c_char) -> SmxStatus {
    guard(|| {
        let Some(inst) = inst.as_ref() else { return fail(SmxStatus::NullPointer, "null instance") };
        let json = match text(report_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let doc: VerdictDoc = match serde_json::from_str(json) {
            Ok(d) => d,
            Err(e) => return fail(SmxStatus::Parse, e.to_string()),
        };
        let hm = match cli_io::morphism_from_doc(&inst.sp, &doc) {
            Ok(hm) => hm,
            Err(e) => return fail(SmxStatus::Rejected, e),
        };
        match verify_harmonic(&hm, &inst.sp) {
            Ok(()) => SmxStatus::Ok,
            Err(e) => fail(SmxStatus::Rejected, e.to_string()),
        }
    })
}

/// Draws one of the instance's pictures in DOT.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn smx_export_dot(inst: *const SmxInstance, what: SmxDot, out: *mut *mut c_char) -> SmxStatus {
    guard(|| {
        let (Some(inst), false) = (inst.as_ref(), out.is_null()) else {
            return fail(SmxStatus::NullPointer, "null argument");
        };
        *out = ptr::null_mut();
        let sp = &inst.sp;
        let dot = match what {
            SmxDot::Gamma => cli_io::dot_graph(sp),
            SmxDot::Biftree => match analyze(sp) {
                Ok(an) => cli_io::dot_biftree(&sp.graph, &an.bt),
                Err(v) => return fail(SmxStatus::Unavailable, v.kind()),
            },
            SmxDot::PartitionTree | SmxDot::Witness => {
                let v = smoothable(sp);
                let Verdict::Smoothable(w) = &v else { return fail(SmxStatus::Unavailable, v.kind()) };
                if what == SmxDot::PartitionTree {
                    let an = analyze(sp).expect("smoothable implies an analysis");
                    cli_io::dot_partition_tree(&sp.graph, &an.bt, &w.tree)
                } else {
                    match build_witness_morphism(sp, w) {
                        Ok(hm) => cli_io::dot_witness(sp, &hm),
                        Err(e) => return fail(SmxStatus::Internal, e.to_string()),
                    }
                }
            }
        };
        hand_out(dot, out)
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn smx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
