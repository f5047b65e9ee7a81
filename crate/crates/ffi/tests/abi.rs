use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::ptr;

use smoothcx_ffi::*;

fn data(name: &str) -> CString {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name);
    CString::new(std::fs::read_to_string(p).unwrap()).unwrap()
}

fn parse(name: &str) -> *mut SmxInstance {
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { smx_instance_parse(data(name).as_ptr(), &mut inst) }, SmxStatus::Ok);
    inst
}

fn last_error() -> String {
    let p = smx_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn decide(inst: *const SmxInstance, witness: bool) -> (SmxVerdict, String, u32) {
    unsafe {
        let mut rep = ptr::null_mut();
        assert_eq!(smx_decide(inst, witness, &mut rep), SmxStatus::Ok);
        let mut v = SmxVerdict::NotDiagrammatic;
        assert_eq!(smx_report_verdict(rep, &mut v), SmxStatus::Ok);
        let json = CStr::from_ptr(smx_report_json(rep)).to_str().unwrap().to_string();
        let deg = smx_report_witness_degree(rep);
        smx_report_free(rep);
        (v, json, deg)
    }
}

#[test]
fn verdicts_match_the_library() {
    for (name, want) in [
        ("ebif.json", SmxVerdict::Smoothable),
        ("beta_forcing.json", SmxVerdict::IgcInfeasible),
        ("nonsolvable_cycle.json", SmxVerdict::NotSolvable),
        ("lattice_3.json", SmxVerdict::Smoothable),
    ] {
        let inst = parse(name);
        let (v, json, deg) = decide(inst, true);
        assert_eq!(v, want, "{name}");
        let sp = smoothcx::cli_io::parse_instance(data(name).to_str().unwrap()).unwrap();
        assert!(json.contains(smoothcx::smoothing::smoothable(&sp).kind()));
        if v == SmxVerdict::Smoothable {
            assert_eq!(deg, unsafe { smx_instance_degree(inst) });
        } else {
            assert_eq!(deg, 0);
        }
        unsafe { smx_instance_free(inst) };
    }
}

#[test]
fn witness_report_rechecks_only_on_its_instance() {
    let ebif = parse("ebif.json");
    let other = parse("lattice_3.json");
    let (_, json, _) = decide(ebif, true);
    let json = CString::new(json).unwrap();
    unsafe {
        assert_eq!(smx_check_witness(ebif, json.as_ptr()), SmxStatus::Ok);
        assert!(smx_last_error().is_null());
        assert_ne!(smx_check_witness(other, json.as_ptr()), SmxStatus::Ok);
        assert!(!last_error().is_empty());
        let junk = CString::new("{").unwrap();
        assert_eq!(smx_check_witness(ebif, junk.as_ptr()), SmxStatus::Parse);
        smx_instance_free(ebif);
        smx_instance_free(other);
    }
}

#[test]
fn parse_errors_carry_lines() {
    let text = data("single_edge.json").into_string().unwrap().replace("\"length\": \"1\"", "\"length\": \"0\"");
    let c = CString::new(text).unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { smx_instance_parse(c.as_ptr(), &mut inst) }, SmxStatus::Parse);
    assert!(inst.is_null());
    assert!(last_error().contains("line "), "{}", last_error());
}

#[test]
fn null_and_utf8_guards() {
    unsafe {
        let mut inst = ptr::null_mut();
        assert_eq!(smx_instance_parse(ptr::null(), &mut inst), SmxStatus::NullPointer);
        let bad = [0xffu8, 0xfe, 0];
        assert_eq!(smx_instance_parse(bad.as_ptr().cast(), &mut inst), SmxStatus::InvalidUtf8);
        let mut rep = ptr::null_mut();
        assert_eq!(smx_decide(ptr::null(), false, &mut rep), SmxStatus::NullPointer);
        assert!(smx_report_json(ptr::null()).is_null());
        assert_eq!(smx_instance_degree(ptr::null()), 0);
        smx_instance_free(ptr::null_mut());
        smx_report_free(ptr::null_mut());
        smx_string_free(ptr::null_mut());
    }
}

#[test]
fn roundtrip_and_dot() {
    let inst = parse("ebif.json");
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(smx_instance_to_json(inst, &mut s), SmxStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_string();
        smx_string_free(s);
        assert_eq!(text, data("ebif.json").to_str().unwrap());

        assert_eq!(smx_export_dot(inst, SmxDot::Biftree, &mut s), SmxStatus::Ok);
        let dot = CStr::from_ptr(s).to_str().unwrap().to_string();
        smx_string_free(s);
        assert!(dot.starts_with("digraph biftree"));
        assert_eq!(dot.matches("leaf=true").count(), 4);

        let neg = parse("beta_forcing.json");
        assert_eq!(smx_export_dot(neg, SmxDot::Witness, &mut s), SmxStatus::Unavailable);
        assert!(s.is_null());
        assert_eq!(last_error(), "IGC_INFEASIBLE");
        smx_instance_free(neg);
        smx_instance_free(inst);
    }
}

#[test]
fn header_is_current() {
    let h = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/smoothcx.h")).unwrap();
    for f in ["smx_instance_parse", "smx_decide", "smx_check_witness", "smx_export_dot", "smx_string_free", "smx_last_error"] {
        assert!(h.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(h.contains("typedef struct smx_instance smx_instance;"));
    assert!(h.contains("SMX_STATUS_OK = 0"));
}
