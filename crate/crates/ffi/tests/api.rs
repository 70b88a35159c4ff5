use std::ffi::{c_char, CStr, CString};
use std::ptr;

use qtomo_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe {
        qtomo_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn bloch(x: f64, y: f64, z: f64) -> *mut QtomoState {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { qtomo_state_from_bloch(x, y, z, &mut s) }, QtomoStatus::Ok);
    s
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(qtomo_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn state_round_trip_and_metrics() {
    unsafe {
        let a = bloch(0.3, -0.2, 0.5);
        assert_eq!(qtomo_state_dim(a), 2);
        let mut c = [0.0; 3];
        assert_eq!(qtomo_state_pauli(a, c.as_mut_ptr(), 3), QtomoStatus::Ok);
        for (got, want) in c.iter().zip([0.3, -0.2, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        let mut b = ptr::null_mut();
        assert_eq!(qtomo_state_from_pauli(2, c.as_ptr(), 3, &mut b), QtomoStatus::Ok);
        let mut f = 0.0;
        assert_eq!(qtomo_fidelity(a, b, &mut f), QtomoStatus::Ok);
        assert!((f - 1.0).abs() < 1e-9);
        let mut d = 1.0;
        assert_eq!(qtomo_trace_distance(a, b, &mut d), QtomoStatus::Ok);
        assert!(d < 1e-9);

        // Orthogonal pure states.
        let up = bloch(0.0, 0.0, 1.0);
        let down = bloch(0.0, 0.0, -1.0);
        assert_eq!(qtomo_fidelity(up, down, &mut f), QtomoStatus::Ok);
        assert!(f.abs() < 1e-9);
        assert_eq!(qtomo_trace_distance(up, down, &mut d), QtomoStatus::Ok);
        assert!((d - 1.0).abs() < 1e-9);

        for s in [a, b, up, down] {
            qtomo_state_free(s);
        }
        qtomo_state_free(ptr::null_mut());
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(qtomo_state_from_bloch(1.0, 1.0, 0.0, &mut s), QtomoStatus::InvalidState);
        assert!(s.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(qtomo_state_from_bloch(0.0, 0.0, 0.0, ptr::null_mut()), QtomoStatus::NullPointer);
        assert!(last_error().contains("out"));

        let c = [0.0; 3];
        assert_eq!(qtomo_state_from_pauli(3, c.as_ptr(), 3, &mut s), QtomoStatus::InvalidArgument);
        assert_eq!(qtomo_state_from_pauli(4, c.as_ptr(), 3, &mut s), QtomoStatus::InvalidArgument);

        let bell = {
            let mut b = ptr::null_mut();
            assert_eq!(qtomo_state_bell(&mut b), QtomoStatus::Ok);
            b
        };
        let mut buf = [0.0; 3];
        assert_eq!(qtomo_state_pauli(bell, buf.as_mut_ptr(), 3), QtomoStatus::BufferTooSmall);
        let one = bloch(0.0, 0.0, 0.0);
        let mut f = 0.0;
        assert_eq!(qtomo_fidelity(bell, one, &mut f), QtomoStatus::InvalidArgument);

        let setting = CString::new("nonsense").unwrap();
        let mut r = ptr::null_mut();
        let st = qtomo_simulate(one, setting.as_ptr(), 1.0, 0.0, 0.01, 1.0, 0.4, 5, 1, &mut r);
        assert_eq!(st, QtomoStatus::InvalidArgument);
        assert!(last_error().contains("nonsense"));

        let missing = CString::new("/nonexistent/records.ctom").unwrap();
        assert_eq!(qtomo_records_read(missing.as_ptr(), &mut r), QtomoStatus::Data);

        qtomo_state_free(bell);
        qtomo_state_free(one);
    }
}

#[test]
fn truncated_error_buffer() {
    unsafe {
        let mut s = ptr::null_mut();
        qtomo_state_from_bloch(2.0, 0.0, 0.0, &mut s);
        let full = qtomo_last_error(ptr::null_mut(), 0);
        let mut buf = [1 as c_char; 5];
        assert_eq!(qtomo_last_error(buf.as_mut_ptr(), buf.len()), full);
        assert_eq!(buf[4], 0);
    }
}

#[test]
fn simulate_write_read_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("r.ctom").to_str().unwrap()).unwrap();
    unsafe {
        let truth = bloch(0.4, 0.5, -0.3);
        let setting = CString::new("XYZ").unwrap();
        let omega = 1.5 * std::f64::consts::TAU / 2.0;
        let mut recs = ptr::null_mut();
        let st = qtomo_simulate(truth, setting.as_ptr(), omega, 0.0, 0.01, 2.0, 0.4, 1500, 5, &mut recs);
        assert_eq!(st, QtomoStatus::Ok, "{}", last_error());
        assert_eq!(qtomo_records_len(recs), 1500);
        assert_eq!(qtomo_records_write(recs, path.as_ptr()), QtomoStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(qtomo_records_read(path.as_ptr(), &mut back), QtomoStatus::Ok);
        assert_eq!(qtomo_records_len(back), 1500);

        let mut est = ptr::null_mut();
        let mut spread = f64::NAN;
        assert_eq!(qtomo_estimate_bme(back, 4000, 9, &mut est, &mut spread), QtomoStatus::Ok);
        assert!(spread.is_finite() && spread > 0.0);
        let mut f = 0.0;
        qtomo_fidelity(truth, est, &mut f);
        assert!(f > 0.97, "BME fidelity {f}");

        let mut est2 = ptr::null_mut();
        assert_eq!(qtomo_estimate_mle(back, 2, 3, &mut est2), QtomoStatus::Ok);
        qtomo_fidelity(truth, est2, &mut f);
        assert!(f > 0.95, "MLE fidelity {f}");

        for s in [truth, est, est2] {
            qtomo_state_free(s);
        }
        qtomo_records_free(recs);
        qtomo_records_free(back);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/qtomo.h")).unwrap();
    for name in [
        "qtomo_version",
        "qtomo_last_error",
        "qtomo_state_from_bloch",
        "qtomo_state_from_pauli",
        "qtomo_state_bell",
        "qtomo_state_pauli",
        "qtomo_state_free",
        "qtomo_fidelity",
        "qtomo_trace_distance",
        "qtomo_simulate",
        "qtomo_records_read",
        "qtomo_records_write",
        "qtomo_records_len",
        "qtomo_records_free",
        "qtomo_estimate_bme",
        "qtomo_estimate_mle",
        "QTOMO_STATUS_BUFFER_TOO_SMALL",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"qtomo.h\"\nint main(void) { QtomoState *s = 0; QtomoStatus st = qtomo_state_from_bloch(0, 0, 1, &s); qtomo_state_free(s); return st != QTOMO_STATUS_OK; }\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}
