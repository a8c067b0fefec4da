use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use spherepack_ffi::*;

fn last_error() -> String {
    let p = sp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn solve_inspect_save_and_reload() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("p4.txt").to_str().unwrap()).unwrap();
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(sp_solve(4, SP_KIND_SPHERE, 0.0, 1, 2, &mut out), SpStatus::Ok);
        assert!(sp_last_error_message().is_null());
        let ratio = sp_outcome_ratio(out);
        assert!((ratio - (6f64.sqrt() - 2.0)).abs() < 1e-5, "{ratio}");
        assert!((sp_outcome_r0_min(out) - 0.5 / ratio).abs() < 1e-15);
        assert_eq!(sp_outcome_len(out), 4);

        let mut centers = [0.0; 12];
        assert_eq!(sp_outcome_centers(out, centers.as_mut_ptr(), 12), SpStatus::Ok);
        let mut valid = false;
        let r0 = sp_outcome_r0_min(out);
        assert_eq!(
            sp_verify_exact(centers.as_ptr(), 4, 0.5, r0, SP_KIND_SPHERE, &mut valid),
            SpStatus::Ok
        );
        assert!(valid);
        let mut energy = -1.0;
        assert_eq!(
            sp_total_energy(centers.as_ptr(), 4, 0.5, r0, SP_KIND_SPHERE, &mut energy),
            SpStatus::Ok
        );
        assert_eq!(energy, 0.0);

        let mut short = [0.0; 11];
        assert_eq!(
            sp_outcome_centers(out, short.as_mut_ptr(), 11),
            SpStatus::InvalidArgument
        );
        assert!(last_error().contains("12"));

        assert_eq!(sp_outcome_save(out, path.as_ptr()), SpStatus::Ok);
        let mut loaded = ptr::null_mut();
        assert_eq!(sp_packing_load(path.as_ptr(), &mut loaded), SpStatus::Ok);
        assert_eq!(sp_packing_len(loaded), 4);
        assert_eq!(sp_packing_r0(loaded), r0);
        assert_eq!(sp_packing_radius(loaded), 0.5);
        let mut kind = 99;
        assert_eq!(sp_packing_kind(loaded, &mut kind), SpStatus::Ok);
        assert_eq!(kind, SP_KIND_SPHERE);
        let mut again = [0.0; 12];
        assert_eq!(sp_packing_centers(loaded, again.as_mut_ptr(), 12), SpStatus::Ok);
        assert_eq!(again, centers);

        sp_packing_free(loaded);
        sp_outcome_free(out);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(sp_solve(3, 7, 0.0, 0, 1, &mut out), SpStatus::InvalidArgument);
        assert!(out.is_null());
        assert!(last_error().contains("kind"));

        assert_eq!(sp_solve(0, SP_KIND_CUBE, 0.0, 0, 1, &mut out), SpStatus::InvalidArgument);
        assert_eq!(sp_solve(3, SP_KIND_CUBE, 0.0, 0, 0, &mut out), SpStatus::InvalidArgument);
        assert_eq!(sp_solve(3, SP_KIND_CUBE, 0.0, 0, 1, ptr::null_mut()), SpStatus::NullPointer);

        let mut ratio = 0.0;
        assert_eq!(sp_record_ratio(13, SP_KIND_SPHERE, &mut ratio), SpStatus::Ok);
        assert_eq!(ratio, 0.33333332);
        assert_eq!(sp_record_ratio(1000, SP_KIND_CUBE, &mut ratio), SpStatus::NotInTable);
        assert_eq!(sp_record_ratio(3, SP_KIND_CUBE, ptr::null_mut()), SpStatus::NullPointer);

        let mut valid = true;
        assert_eq!(
            sp_verify_exact(ptr::null(), 2, 0.5, 1.0, SP_KIND_CUBE, &mut valid),
            SpStatus::NullPointer
        );
        let overlapping = [0.0, 0.0, 0.0, 0.5, 0.0, 0.0];
        assert_eq!(
            sp_verify_exact(overlapping.as_ptr(), 2, 0.5, 2.0, SP_KIND_CUBE, &mut valid),
            SpStatus::Ok
        );
        assert!(!valid);
        assert_eq!(
            sp_verify_exact(overlapping.as_ptr(), 2, 0.5, -1.0, SP_KIND_CUBE, &mut valid),
            SpStatus::InvalidArgument
        );
        let nan = [f64::NAN, 0.0, 0.0];
        let mut energy = 0.0;
        assert_eq!(
            sp_total_energy(nan.as_ptr(), 1, 0.5, 2.0, SP_KIND_SPHERE, &mut energy),
            SpStatus::InvalidArgument
        );

        let missing = CString::new("/nonexistent/dir/packing.txt").unwrap();
        let mut loaded = ptr::null_mut();
        assert_eq!(sp_packing_load(missing.as_ptr(), &mut loaded), SpStatus::Io);
        assert!(loaded.is_null());
        assert_eq!(sp_packing_load(ptr::null(), &mut loaded), SpStatus::NullPointer);

        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.txt");
        std::fs::write(&bad, "n=2\nkind=cube\nr0=1\nr=0.5\n1 0 0 0\n").unwrap();
        let bad = CString::new(bad.to_str().unwrap()).unwrap();
        assert_eq!(sp_packing_load(bad.as_ptr(), &mut loaded), SpStatus::Parse);
        assert!(last_error().contains("line"));

        assert!(sp_outcome_ratio(ptr::null()).is_nan());
        assert_eq!(sp_packing_len(ptr::null()), 0);
        sp_outcome_free(ptr::null_mut());
        sp_packing_free(ptr::null_mut());
    }
}

#[test]
fn success_clears_previous_error() {
    unsafe {
        let mut ratio = 0.0;
        assert_eq!(sp_record_ratio(0, SP_KIND_CUBE, &mut ratio), SpStatus::NotInTable);
        assert!(!sp_last_error_message().is_null());
        assert_eq!(sp_record_ratio(2, SP_KIND_CUBE, &mut ratio), SpStatus::Ok);
        assert!(sp_last_error_message().is_null());
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(sp_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

const HEADER: &str = include_str!("../include/spherepack.h");

#[test]
fn header_declares_the_whole_interface() {
    for name in [
        "sp_last_error_message",
        "sp_version",
        "sp_solve",
        "sp_outcome_free",
        "sp_outcome_ratio",
        "sp_outcome_r0_min",
        "sp_outcome_len",
        "sp_outcome_centers",
        "sp_outcome_save",
        "sp_packing_load",
        "sp_packing_free",
        "sp_packing_len",
        "sp_packing_r0",
        "sp_packing_radius",
        "sp_packing_kind",
        "sp_packing_centers",
        "sp_verify_exact",
        "sp_total_energy",
        "sp_record_ratio",
        "typedef struct SpOutcome SpOutcome;",
        "typedef struct SpPacking SpPacking;",
        "SP_STATUS_UPPER_BOUND_INFEASIBLE = 3",
        "#define SP_KIND_CUBE 1",
    ] {
        assert!(HEADER.contains(name), "header lacks {name}");
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
        r#"#include "spherepack.h"
int main(void) {
    SpOutcome *o = NULL;
    if (sp_solve(5, SP_KIND_CUBE, 0.0, 1, 5, &o) != SP_STATUS_OK) return 1;
    double xyz[15];
    sp_outcome_centers(o, xyz, 15);
    double ratio = sp_outcome_ratio(o);
    sp_outcome_free(o);
    return ratio > 0.5 ? 0 : 1;
}
"#,
    )
    .unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", include])
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
        .ok_or(())
}
