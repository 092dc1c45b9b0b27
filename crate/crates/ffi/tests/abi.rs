use std::ffi::{c_char, CStr, CString};
use std::ptr;

use parab::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe {
        parab_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn weight_u_round_trip() {
    unsafe {
        let mut w = ptr::null_mut();
        assert_eq!(parab_weight_u_new(0.5, 0.5, &mut w), ParabStatus::Ok);
        assert!(!w.is_null());
        let mut v = f64::NAN;
        assert_eq!(parab_u_basis(w, 0, 0, 0.1, 0.2, &mut v), ParabStatus::Ok);
        assert_eq!(v, 1.0);
        // kernel at n = 0 is the constant 1 under a probability measure
        assert_eq!(parab_u_kernel(w, 0, 0.1, 0.2, -0.3, 0.5, &mut v), ParabStatus::Ok);
        assert!((v - 1.0).abs() < 1e-14);
        let mut c = f64::NAN;
        assert_eq!(
            parab_u_cesaro_kernel(w, 6, 2.0, 0.1, 0.2, 0.1, 0.2, &mut c),
            ParabStatus::Ok
        );
        assert!(c > 0.0);
        parab_weight_u_free(w);
    }
}

#[test]
fn errors_map_to_codes_and_messages() {
    unsafe {
        let mut w = ptr::null_mut();
        assert_eq!(parab_weight_u_new(0.5, -2.0, &mut w), ParabStatus::InvalidParameter);
        assert!(w.is_null());
        assert!(last_error().contains("invalid parameter"));

        assert_eq!(parab_weight_u_new(0.5, 0.5, ptr::null_mut()), ParabStatus::NullPointer);
        assert_eq!(parab_weight_u_new(0.5, 0.5, &mut w), ParabStatus::Ok);
        assert_eq!(last_error(), "");
        let mut v = 0.0;
        assert_eq!(
            parab_u_basis(w, 0, 1, 0.9, 0.2, &mut v),
            ParabStatus::PointOutsideDomain
        );
        assert_eq!(parab_u_basis(w, 3, 1, 0.0, 0.2, &mut v), ParabStatus::IndexOutOfRange);
        assert_eq!(
            parab_u_basis(ptr::null(), 0, 1, 0.0, 0.2, &mut v),
            ParabStatus::NullPointer
        );
        assert_eq!(
            parab_u_basis(w, 0, 1, 0.0, 0.2, ptr::null_mut()),
            ParabStatus::NullPointer
        );
        parab_weight_u_free(w);
        parab_weight_u_free(ptr::null_mut());

        let mut v3 = ptr::null_mut();
        assert_eq!(parab_weight_v_new(5, 0.0, 1.0, 0.5, &mut v3), ParabStatus::Ok);
        let x = [0.0; 5];
        assert_eq!(
            parab_v_basis(v3, 1, 1, 0, 0, x.as_ptr(), 0.5, &mut v),
            ParabStatus::UnsupportedDimension
        );
        parab_weight_v_free(v3);

        let mut needed = parab_last_error_message(ptr::null_mut(), 0);
        assert!(needed > 10);
        let mut small = [1 as c_char; 4];
        needed = parab_last_error_message(small.as_mut_ptr(), small.len());
        assert!(needed > 3);
        assert_eq!(small[3], 0);
    }
}

#[test]
fn surface_and_solid_kernels() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(parab_weight_v0_new(3, -0.5, 1.0, &mut s), ParabStatus::Ok);
        let xi = [0.0, 0.6, 0.8];
        let eta = [1.0, 0.0, 0.0];
        let (mut k, mut c) = (f64::NAN, f64::NAN);
        assert_eq!(
            parab_v0_kernel(s, 3, xi.as_ptr(), 0.4, eta.as_ptr(), 0.7, &mut k),
            ParabStatus::Ok
        );
        assert!(k.is_finite());
        assert_eq!(
            parab_v0_cesaro_kernel_rim(s, 5, 3.0, xi.as_ptr(), eta.as_ptr(), 0.7, &mut c),
            ParabStatus::Ok
        );
        assert!(c.is_finite());
        let bad = [1.0, 1.0, 0.0];
        assert_eq!(
            parab_v0_basis(s, 1, 0, 0, bad.as_ptr(), 0.5, &mut k),
            ParabStatus::PointOutsideDomain
        );
        parab_weight_v0_free(s);

        let mut v = ptr::null_mut();
        assert_eq!(parab_weight_v_new(2, 0.0, 1.0, 0.5, &mut v), ParabStatus::Ok);
        let (x, y) = ([0.2, -0.1], [0.3, 0.3]);
        let (mut a, mut b) = (f64::NAN, f64::NAN);
        assert_eq!(
            parab_v_kernel(v, 2, x.as_ptr(), 0.5, y.as_ptr(), 0.4, &mut a),
            ParabStatus::Ok
        );
        assert_eq!(
            parab_v_kernel(v, 2, y.as_ptr(), 0.4, x.as_ptr(), 0.5, &mut b),
            ParabStatus::Ok
        );
        assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        assert_eq!(
            parab_v_cesaro_kernel_top(v, 4, 2.0, x.as_ptr(), y.as_ptr(), 0.4, &mut a),
            ParabStatus::Ok
        );
        assert!(a.is_finite());
        parab_weight_v_free(v);
    }
}

#[test]
fn harness_through_handles() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("rows.csv").to_str().unwrap()).unwrap();
    let (cmd, dom) = (CString::new("ortho-check").unwrap(), CString::new("V0").unwrap());
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(parab_config_new(cmd.as_ptr(), dom.as_ptr(), &mut c), ParabStatus::Ok);
        for (k, v) in [("d", "3"), ("beta", "0"), ("gamma", "1"), ("N", "4")] {
            let (k, v) = (CString::new(k).unwrap(), CString::new(v).unwrap());
            assert_eq!(parab_config_set(c, k.as_ptr(), v.as_ptr()), ParabStatus::Ok);
        }
        let (k, v) = (CString::new("colour").unwrap(), CString::new("red").unwrap());
        assert_eq!(parab_config_set(c, k.as_ptr(), v.as_ptr()), ParabStatus::InvalidConfig);

        let mut r = ptr::null_mut();
        assert_eq!(parab_run(c, &mut r), ParabStatus::Ok);
        assert_eq!(parab_report_len(r), 1);
        assert_eq!(parab_report_all_pass(r), 1);
        let (mut m, mut t, mut p) = (0.0, 0.0, 0);
        assert_eq!(parab_report_row(r, 0, &mut m, &mut t, &mut p), ParabStatus::Ok);
        assert!(m <= t && p == 1);
        assert_eq!(
            parab_report_row(r, 1, &mut m, &mut t, &mut p),
            ParabStatus::IndexOutOfRange
        );
        assert_eq!(parab_report_write_csv(r, path.as_ptr()), ParabStatus::Ok);
        parab_report_free(r);
        parab_config_free(c);
    }
    let csv = std::fs::read_to_string(dir.path().join("rows.csv")).unwrap();
    assert!(csv.contains("ortho:V0:N=004"));

    let bad = CString::new("frobnicate").unwrap();
    let mut c = ptr::null_mut();
    unsafe {
        assert_eq!(
            parab_config_new(bad.as_ptr(), dom.as_ptr(), &mut c),
            ParabStatus::InvalidConfig
        );
        assert_eq!(parab_report_len(ptr::null()), 0);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(parab_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
