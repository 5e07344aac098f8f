use std::ffi::{CStr, CString};
use std::ptr;

use nonlocal_graphs_ffi::*;

fn last_error() -> String {
    let p = nlg_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn coarse(s: f64) -> NlgSolveParams {
    NlgSolveParams {
        s,
        cells_per_unit: 16,
        truncation: 2.0,
        ..nlg_solve_params_default()
    }
}

#[test]
fn linear_datum_is_reproduced() {
    unsafe {
        let mut datum = ptr::null_mut();
        assert_eq!(nlg_datum_linear(1.0, 0.0, &mut datum), NlgStatus::Ok);
        let mut sol = ptr::null_mut();
        assert_eq!(nlg_solve(datum, &coarse(0.5), &mut sol), NlgStatus::Ok);
        assert!(nlg_solution_converged(sol));
        assert!(nlg_solution_gradient_norm(sol) <= 1e-9);
        let n = nlg_solution_len(sol);
        assert_eq!(n, 16 * 5 + 1);
        let (mut x, mut u) = (vec![0.0; n], vec![0.0; n]);
        assert_eq!(nlg_solution_copy(sol, x.as_mut_ptr(), u.as_mut_ptr(), n), NlgStatus::Ok);
        let dev = x.iter().zip(&u).map(|(x, u)| (x - u).abs()).fold(0.0f64, f64::max);
        assert!(dev <= 5.0 / 16.0, "{dev}");
        assert_eq!(nlg_solution_copy(sol, x.as_mut_ptr(), ptr::null_mut(), n - 1), NlgStatus::Failed);
        nlg_solution_free(sol);
        nlg_datum_free(datum);
    }
}

#[test]
fn two_bump_jumps_are_symmetric() {
    unsafe {
        let mut datum = ptr::null_mut();
        assert_eq!(nlg_datum_two_bump(0.5, 0.125, &mut datum), NlgStatus::Ok);
        let mut sol = ptr::null_mut();
        assert_eq!(nlg_solve(datum, &coarse(0.1), &mut sol), NlgStatus::Ok);
        let l = nlg_solution_wall_jump(sol, NlgBoundary::Left);
        let r = nlg_solution_wall_jump(sol, NlgBoundary::Right);
        assert!(l > 0.0 && (l - r).abs() < 1e-9, "{l} {r}");
        nlg_solution_free(sol);
        nlg_datum_free(datum);
    }
}

#[test]
fn bumps_constructor_checks_arrays() {
    unsafe {
        let mut datum = ptr::null_mut();
        let (c, w, h) = ([-0.5, 1.5], [0.3, 0.3], [1.0, -1.0]);
        assert_eq!(nlg_datum_bumps(0.0, 0.0, c.as_ptr(), w.as_ptr(), h.as_ptr(), 2, &mut datum), NlgStatus::Ok);
        nlg_datum_free(datum);
        let bad_w = [0.3, -1.0];
        assert_eq!(
            nlg_datum_bumps(0.0, 0.0, c.as_ptr(), bad_w.as_ptr(), h.as_ptr(), 2, &mut datum),
            NlgStatus::InvalidDatum
        );
        assert_eq!(
            nlg_datum_bumps(0.0, 0.0, ptr::null(), w.as_ptr(), h.as_ptr(), 2, &mut datum),
            NlgStatus::NullPointer
        );
    }
}

#[test]
fn errors_have_codes_and_messages() {
    unsafe {
        let mut datum = ptr::null_mut();
        assert_eq!(nlg_datum_linear(0.0, 0.0, &mut datum), NlgStatus::Ok);
        let mut sol = ptr::null_mut();
        assert_eq!(nlg_solve(datum, &coarse(1.5), &mut sol), NlgStatus::InvalidOrder);
        assert!(sol.is_null());
        assert!(last_error().contains("1.5"));
        let mut p = coarse(0.5);
        p.cells_per_unit = 4;
        assert_eq!(nlg_solve(datum, &p, &mut sol), NlgStatus::InvalidGrid);
        assert_eq!(nlg_solve(ptr::null(), &p, &mut sol), NlgStatus::NullPointer);
        assert!(last_error().contains("datum"));

        let mut capped = coarse(0.1);
        capped.max_iterations = 1;
        let mut bump = ptr::null_mut();
        assert_eq!(nlg_datum_two_bump(0.5, 0.125, &mut bump), NlgStatus::Ok);
        assert_eq!(nlg_solve(bump, &capped, &mut sol), NlgStatus::NotConverged);
        assert!(!sol.is_null() && !nlg_solution_converged(sol));
        nlg_solution_free(sol);
        nlg_datum_free(bump);
        nlg_datum_free(datum);

        assert_eq!(nlg_solution_len(ptr::null()), 0);
        assert!(nlg_solution_gradient_norm(ptr::null()).is_nan());
        nlg_datum_free(ptr::null_mut());
        nlg_solution_free(ptr::null_mut());
    }
}

#[test]
fn disk_curvature_scales() {
    unsafe {
        let mut a = NlgCurvature::default();
        let mut b = NlgCurvature::default();
        assert_eq!(nlg_disk_curvature(0.5, 1.0, 0.3, 1e-8, &mut a), NlgStatus::Ok);
        assert_eq!(nlg_disk_curvature(0.5, 4.0, 1.1, 1e-8, &mut b), NlgStatus::Ok);
        assert!((a.value - 14.832_597_418_410_975).abs() < 1e-6);
        assert!((b.value * 2.0 - a.value).abs() < 1e-5, "{} {}", a.value, b.value);
        assert_eq!(nlg_disk_curvature(0.5, -1.0, 0.0, 1e-8, &mut a), NlgStatus::InvalidConfig);
    }
}

#[test]
fn scenario_round_trip() {
    let toml = CString::new("schema_version = 1\nscenario = \"flat\"\nh = \"1/16\"\nL = 2.0\nlevels = 1\n").unwrap();
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(nlg_run_scenario(toml.as_ptr(), ptr::null(), &mut json), NlgStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        nlg_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["scenario"], "flat");
        assert!(v.get("timings").is_none());

        let bad = CString::new("schema_version = 1\nscenario = \"flat\"\nbogus = 1\n").unwrap();
        let mut json = ptr::null_mut();
        assert_eq!(nlg_run_scenario(bad.as_ptr(), ptr::null(), &mut json), NlgStatus::InvalidConfig);
        assert!(last_error().contains("bogus"));
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(nlg_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/nonlocal_graphs.h")).unwrap();
    let source = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let names: Vec<&str> = source
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(names.len() >= 15);
    for name in names {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

/// Compiles and runs a C program against the static library when a C compiler is available.
#[test]
fn c_program_links() {
    let manifest = env!("CARGO_MANIFEST_DIR");
    let tmp = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let profile_dir = tmp.parent().unwrap().join(if cfg!(debug_assertions) { "debug" } else { "release" });
    let lib = profile_dir.join("libnonlocal_graphs_ffi.a");
    if !lib.exists() || std::process::Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let exe = tmp.join("nlg_smoke");
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(format!("{manifest}/tests/smoke.c"))
        .arg(format!("-I{manifest}/include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success());
    let run = std::process::Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}: {}", run.status.code(), String::from_utf8_lossy(&run.stdout));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("n=81 "));
}
