use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use ramsey_ffi::*;

const POINT: &str = r#"{"kind":"ordered_poset","leq":[[true]],"order":[0]}"#;
const PAIR: &str = r#"{"kind":"ordered_poset","leq":[[true,false],[false,true]],"order":[0,1]}"#;
const TRIPLE: &str =
    r#"{"kind":"ordered_poset","leq":[[true,false,false],[false,true,false],[false,false,true]],"order":[0,1,2]}"#;
const M3: &str = r#"{"kind":"lattice","leq":[[true,true,true,true,true],[false,true,false,false,true],[false,false,true,false,true],[false,false,false,true,true],[false,false,false,false,true]]}"#;

fn parse(json: &str) -> *mut RwStructure {
    let c = CString::new(json).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { rw_structure_from_json(c.as_ptr(), &mut h) }, RwStatus::Ok);
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    let p = rw_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(rw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn pigeonhole_through_handles() {
    let (point, pair, triple) = (parse(POINT), parse(PAIR), parse(TRIPLE));
    let mut out = RwArrowResult::default();
    let s = unsafe { rw_check_arrow(triple, point, pair, 2, 0, &mut out) };
    assert_eq!(s, RwStatus::Ok);
    assert_eq!((out.outcome, out.a_copies, out.b_copies), (0, 3, 3));
    let s = unsafe { rw_check_arrow(pair, point, pair, 2, 0, &mut out) };
    assert_eq!(s, RwStatus::Fails);
    assert_eq!(out.outcome, 1);
    unsafe {
        rw_structure_free(point);
        rw_structure_free(pair);
        rw_structure_free(triple);
    }
}

#[test]
fn pi_handle_round_trips_through_json() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { rw_pi(3, &mut h) }, RwStatus::Ok);
    assert_eq!(unsafe { rw_structure_len(h) }, 8);
    let mut json: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { rw_structure_to_json(h, &mut json) }, RwStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
    let back = parse(&text);
    assert_eq!(unsafe { rw_structure_len(back) }, 8);
    unsafe {
        rw_string_free(json);
        rw_structure_free(back);
        rw_structure_free(h);
    }
    assert_eq!(unsafe { rw_pi(40, &mut h) }, RwStatus::Unknown);
}

#[test]
fn errors_set_status_and_message() {
    let bad = CString::new("{oops").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { rw_structure_from_json(bad.as_ptr(), &mut h) }, RwStatus::Parse);
    assert!(last_error().contains("format"));
    let cyclic = CString::new(r#"{"kind":"poset","leq":[[true,true],[true,true]]}"#).unwrap();
    assert_eq!(
        unsafe { rw_structure_from_json(cyclic.as_ptr(), &mut h) },
        RwStatus::Violation
    );
    assert_eq!(
        unsafe { rw_structure_from_json(ptr::null(), &mut h) },
        RwStatus::NullPointer
    );
    assert_eq!(unsafe { rw_structure_len(ptr::null()) }, 0);
    let m3 = parse(M3);
    let mut out = RwArrowResult::default();
    assert_eq!(
        unsafe { rw_check_arrow(m3, m3, m3, 2, 0, &mut out) },
        RwStatus::InvalidArgument
    );
    unsafe { rw_structure_free(m3) };
}

#[test]
fn identities_on_m3() {
    let m3 = parse(M3);
    let dist = CString::new("x ∧ (y ∨ z) = (x ∧ y) ∨ (x ∧ z)").unwrap();
    let modular = CString::new("(x ∧ z) ∨ (y ∧ z) = ((x ∧ z) ∨ y) ∧ z").unwrap();
    assert_eq!(unsafe { rw_satisfies_identity(m3, dist.as_ptr()) }, RwStatus::Fails);
    assert_eq!(unsafe { rw_satisfies_identity(m3, modular.as_ptr()) }, RwStatus::Ok);
    let junk = CString::new("x ∧").unwrap();
    assert_eq!(unsafe { rw_satisfies_identity(m3, junk.as_ptr()) }, RwStatus::Parse);
    unsafe { rw_structure_free(m3) };
}

#[test]
fn op_witness_checks() {
    let pair = parse(PAIR);
    let chain = parse(r#"{"kind":"poset","leq":[[true,true],[false,true]]}"#);
    assert_eq!(unsafe { rw_verify_op_witness(pair, pair, 1000) }, RwStatus::Ok);
    assert_eq!(unsafe { rw_verify_op_witness(pair, chain, 1000) }, RwStatus::Fails);
    unsafe {
        rw_structure_free(pair);
        rw_structure_free(chain);
    }
}

#[test]
fn cli_runs_in_process() {
    let args: Vec<CString> = ["ramsey", "--deterministic", "census", "--n-max", "3"]
        .iter()
        .map(|s| CString::new(*s).unwrap())
        .collect();
    let argv: Vec<*const c_char> = args.iter().map(|a| a.as_ptr()).collect();
    let mut report: *mut c_char = ptr::null_mut();
    let mut code: c_int = -1;
    assert_eq!(
        unsafe { rw_run_cli(argv.as_ptr(), argv.len(), &mut report, &mut code) },
        RwStatus::Ok
    );
    assert_eq!(code, 0);
    let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_string();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["command"], "census");
    unsafe { rw_string_free(report) };
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ramsey.h")).unwrap();
    for name in [
        "rw_last_error",
        "rw_version",
        "rw_string_free",
        "rw_structure_from_json",
        "rw_pi",
        "rw_structure_free",
        "rw_structure_len",
        "rw_structure_to_json",
        "rw_check_arrow",
        "rw_verify_op_witness",
        "rw_satisfies_identity",
        "rw_run_cli",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name}");
    }
}
