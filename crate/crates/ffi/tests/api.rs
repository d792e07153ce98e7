use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use chebband_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe {
        chebband_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn system(a: &[f64], weight: Option<&str>) -> *mut ChebbandSystem {
    let w = weight.map(|w| CString::new(w).unwrap());
    let mut out = ptr::null_mut();
    let st = unsafe {
        chebband_system_new(a.as_ptr(), a.len(), w.as_ref().map_or(ptr::null(), |w| w.as_ptr()), &mut out)
    };
    assert_eq!(st, ChebbandStatus::Ok, "{}", last_error());
    out
}

#[test]
fn chebyshev_case_through_handles() {
    let sys = system(&[-1.0, 1.0], None);
    unsafe {
        assert_eq!(chebband_system_bands(sys), 1);
        let mut cap = 0.0;
        assert_eq!(chebband_system_capacity(sys, &mut cap), ChebbandStatus::Ok);
        assert!((cap - 0.5).abs() < 1e-12);
        let mut dev = 0.0;
        assert_eq!(chebband_predict(sys, 5, &mut dev, ptr::null_mut(), 0), ChebbandStatus::Ok);
        assert!((dev - 2f64.powi(-4)).abs() < 1e-12);
        let mut r = ptr::null_mut();
        assert_eq!(chebband_remez_new(sys, 5, 0.0, &mut r), ChebbandStatus::Ok);
        let (mut d, mut lb, mut conv) = (0.0, 0.0, false);
        assert_eq!(chebband_remez_deviation(r, &mut d, &mut lb, &mut conv), ChebbandStatus::Ok);
        assert!(conv && (d - 0.0625).abs() < 1e-12 && lb <= d);
        let mut v = 0.0;
        assert_eq!(chebband_remez_eval(r, 1.0, &mut v), ChebbandStatus::Ok);
        assert!((v - 0.0625).abs() < 1e-12);
        let mut z = [0usize; 1];
        assert_eq!(chebband_remez_zeros_per_band(r, z.as_mut_ptr(), 1), ChebbandStatus::Ok);
        assert_eq!(z, [5]);
        chebband_remez_free(r);
        chebband_system_free(sys);
    }
}

#[test]
fn two_band_outputs_and_buffers() {
    let sys = system(&[-1.0, -0.5, 0.5, 1.0], Some(r#"{"type": "unit"}"#));
    unsafe {
        let mut om = [0.0; 2];
        assert_eq!(chebband_system_omega_inf(sys, om.as_mut_ptr(), 2), ChebbandStatus::Ok);
        assert!((om[0] - 0.5).abs() < 1e-9 && (om[1] - 0.5).abs() < 1e-9);
        assert_eq!(chebband_system_omega_inf(sys, om.as_mut_ptr(), 1), ChebbandStatus::BufferTooSmall);
        let mut dev = 0.0;
        let mut c = [1.0; 1];
        assert_eq!(chebband_predict(sys, 3, &mut dev, c.as_mut_ptr(), 1), ChebbandStatus::Ok);
        assert!(c[0].abs() < 1e-9);
        chebband_system_free(sys);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut out = ptr::null_mut();
    unsafe {
        let bad = [1.0, -1.0];
        assert_eq!(chebband_system_new(bad.as_ptr(), 2, ptr::null(), &mut out), ChebbandStatus::InvalidSystem);
        assert!(out.is_null());
        assert!(!last_error().is_empty());
        let odd = [0.0, 1.0, 2.0];
        assert_eq!(chebband_system_new(odd.as_ptr(), 3, ptr::null(), &mut out), ChebbandStatus::InvalidSystem);
        let w = CString::new("{oops").unwrap();
        let ok = [-1.0, 1.0];
        assert_eq!(chebband_system_new(ok.as_ptr(), 2, w.as_ptr(), &mut out), ChebbandStatus::InvalidWeight);
        assert!(last_error().contains("weight"));
        assert_eq!(chebband_system_new(ptr::null(), 2, ptr::null(), &mut out), ChebbandStatus::NullPointer);
        assert_eq!(chebband_system_capacity(ptr::null(), ptr::null_mut()), ChebbandStatus::NullPointer);
        let sys = system(&ok, None);
        let mut dev = 0.0;
        assert_eq!(chebband_predict(sys, 0, &mut dev, ptr::null_mut(), 0), ChebbandStatus::InvalidArgument);
        let mut r = ptr::null_mut();
        assert_ne!(chebband_remez_new(sys, 0, 0.0, &mut r), ChebbandStatus::Ok);
        assert!(r.is_null());
        chebband_system_free(sys);
        chebband_system_free(ptr::null_mut());
        chebband_remez_free(ptr::null_mut());
        // Truncation reports the full length.
        let mut small = [0 as std::ffi::c_char; 4];
        let full = chebband_last_error(small.as_mut_ptr(), 4);
        assert!(full >= 4 && small[3] == 0);
    }
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(chebband_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = format!("{dir}/include/chebband.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["chebband_system_new", "chebband_remez_eval", "chebband_last_error", "CHEBBAND_STATUS_OK"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let src = std::env::temp_dir().join("chebband_header_check.c");
    std::fs::write(&src, "#include \"chebband.h\"\nint main(void) { ChebbandSystem *s = 0; chebband_system_free(s); return CHEBBAND_STATUS_OK; }\n").unwrap();
    match Command::new("cc").args(["-fsyntax-only", "-std=c99", "-Wall", "-Werror", "-I", &format!("{dir}/include")]).arg(&src).status() {
        Ok(st) => assert!(st.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler; header syntax check skipped"),
    }
}
