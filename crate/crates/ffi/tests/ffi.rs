use std::ffi::{CStr, CString};
use std::ptr;

use robustmo_ffi::*;

fn demo_json() -> CString {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/demo.json");
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

fn last_error() -> String {
    let p = rmo_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn load_demo() -> *mut RmoInstance {
    let mut inst = ptr::null_mut();
    let json = demo_json();
    assert_eq!(unsafe { rmo_instance_parse(json.as_ptr(), &mut inst) }, RmoStatus::Ok);
    inst
}

#[test]
fn demo_dims_oracle_and_threshold() {
    let inst = load_demo();
    let (mut n, mut m, mut k, mut d) = (0, 0, 0, 0);
    unsafe {
        assert_eq!(rmo_instance_dims(inst, &mut n, &mut m, &mut k, &mut d), RmoStatus::Ok);
        assert_eq!((n, m, k, d), (1, 2, 1, 3));

        let mut buf = [0usize; 1];
        let mut len = 0;
        assert_eq!(rmo_oracle_robust(inst, buf.as_mut_ptr(), 1, &mut len), RmoStatus::BufferTooSmall);
        assert_eq!(len, 2);
        assert!(last_error().contains("needed"));
        let mut buf = [0usize; 4];
        assert_eq!(rmo_oracle_robust(inst, buf.as_mut_ptr(), 4, &mut len), RmoStatus::Ok);
        assert_eq!(&buf[..len], &[0, 1]);
        assert!(rmo_last_error_message().is_null());

        let (mut p, mut defined) = (0, false);
        assert_eq!(rmo_wfdvp_p(inst, &mut p, &mut defined), RmoStatus::Ok);
        assert!(defined);
        assert_eq!(p, 2);
        rmo_instance_free(inst);
    }
}

#[test]
fn solve_report_accessors() {
    let inst = load_demo();
    let mut report = ptr::null_mut();
    unsafe {
        assert_eq!(rmo_solve(inst, 1, 0.0, &mut report), RmoStatus::Ok);
        let mut sol = [0usize; 3];
        let mut len = 0;
        assert_eq!(rmo_report_solutions(report, sol.as_mut_ptr(), 3, &mut len), RmoStatus::Ok);
        assert_eq!(&sol[..len], &[0, 1]);

        let mut w = [0.0; 8];
        assert_eq!(rmo_report_witness(report, 1, w.as_mut_ptr(), 8, &mut len), RmoStatus::Ok);
        assert_eq!(&w[..len], &[0.0, 2.0]);
        assert_eq!(rmo_report_witness(report, 9, w.as_mut_ptr(), 8, &mut len), RmoStatus::InvalidArgument);

        let mut lb = [0.0; 2];
        let mut alpha = 0.0;
        assert_eq!(rmo_report_bounds(report, lb.as_mut_ptr(), 2, &mut len, &mut alpha), RmoStatus::Ok);
        assert_eq!(lb, [-1.0, -1.0]);
        assert_eq!(alpha, 3.0);

        assert_eq!(rmo_solve(inst, 0, 0.0, &mut report as *mut _), RmoStatus::InvalidArgument);
        rmo_report_free(report);
        rmo_instance_free(inst);
    }
}

#[test]
fn relations_and_psi_match_definitions() {
    // A = {(0,0)}, B = {(1,1),(2,0.5)}: every b exceeds a by at least 0.5 in the best coordinate.
    let a = [0.0, 0.0];
    let b = [1.0, 1.0, 2.0, 0.5];
    unsafe {
        let mut v = 0.0;
        assert_eq!(rmo_psi(b.as_ptr(), 2, 2, a.as_ptr(), &mut v), RmoStatus::Ok);
        assert_eq!(v, -1.0);

        let mut holds = false;
        assert_eq!(
            rmo_relation_holds(RmoRelation::StrictUpper, a.as_ptr(), 1, b.as_ptr(), 2, 2, &mut holds),
            RmoStatus::Ok
        );
        assert!(holds);
        assert_eq!(
            rmo_relation_holds(RmoRelation::StrictUpper, b.as_ptr(), 2, a.as_ptr(), 1, 2, &mut holds),
            RmoStatus::Ok
        );
        assert!(!holds);

        let (mut eps, mut cert) = (0.0, false);
        assert_eq!(
            rmo_certify_strict_upper(a.as_ptr(), 1, b.as_ptr(), 2, 2, &mut eps, &mut cert),
            RmoStatus::Ok
        );
        assert!(cert);
        assert_eq!(eps, 1.0);
    }
}

#[test]
fn errors_are_reported_not_raised() {
    unsafe {
        let mut inst = ptr::null_mut();
        assert_eq!(rmo_instance_parse(ptr::null(), &mut inst), RmoStatus::NullPointer);
        let bad = CString::new("{\"name\":\"x\"}").unwrap();
        assert_eq!(rmo_instance_parse(bad.as_ptr(), &mut inst), RmoStatus::InvalidInstance);
        assert!(inst.is_null());
        let missing = CString::new("/nonexistent/instance.json").unwrap();
        assert_eq!(rmo_instance_load(missing.as_ptr(), &mut inst), RmoStatus::Io);
        assert!(last_error().contains("nonexistent"));

        let mut v = 0.0;
        let a = [f64::NAN, 0.0];
        assert_ne!(rmo_psi(a.as_ptr(), 1, 2, a.as_ptr(), &mut v), RmoStatus::Ok);
        assert_eq!(rmo_psi(a.as_ptr(), 0, 2, a.as_ptr(), &mut v), RmoStatus::InvalidArgument);
        rmo_instance_free(ptr::null_mut());
        rmo_report_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let h = include_str!("../include/robustmo.h");
    for f in [
        "rmo_instance_parse", "rmo_instance_load", "rmo_instance_free", "rmo_instance_dims",
        "rmo_oracle_robust", "rmo_wfdvp_p", "rmo_solve", "rmo_report_free", "rmo_report_solutions",
        "rmo_report_witness", "rmo_report_bounds", "rmo_psi", "rmo_relation_holds",
        "rmo_certify_strict_upper", "rmo_last_error_message",
    ] {
        assert!(h.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(h.contains("typedef struct RmoInstance RmoInstance;"));
}
