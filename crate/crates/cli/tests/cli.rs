use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use normsurf_cli::coeffs;
use normsurf_cli::mesh::read_csv;
use normsurf_cli::report::RunReport;
use normsurf_core::separable::{preset, PRESET_NAMES};
use tempfile::TempDir;

fn normsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normsurf")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_report(p: &Path) -> RunReport {
    serde_json::from_slice(&fs::read(p).unwrap()).unwrap()
}

#[test]
fn data_files_match_presets() {
    for name in PRESET_NAMES {
        let loaded = coeffs::load(&data(&format!("{name}.json"))).unwrap();
        assert_eq!(loaded, preset(name).unwrap().coeffs, "{name}");
    }
}

#[test]
fn translation_example_run() {
    let dir = TempDir::new().unwrap();
    let (obj, csv, rep) = (dir.path().join("t.obj"), dir.path().join("t.csv"), dir.path().join("t.json"));
    let out = normsurf(&[
        "gen", "translation", "--m", "2", "--a", "1", "--grid", "40",
        "--out-mesh", path_str(&obj), "--out-mesh", path_str(&csv), "--out-report", path_str(&rep),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let text = fs::read_to_string(&obj).unwrap();
    let nv = text.lines().filter(|l| l.starts_with("v ")).count();
    assert_eq!(nv, 1600);
    for line in text.lines().filter(|l| l.starts_with("f ")) {
        for idx in line.split_whitespace().skip(1) {
            let i: usize = idx.parse().unwrap();
            assert!((1..=nv).contains(&i));
        }
    }

    let report = read_report(&rep);
    assert_eq!(report.family, "translation");
    assert_eq!(report.grid, [40, 40]);
    assert!(report.max_abs_h_analytic.unwrap() < 1e-8);
    assert!(report.wall_ms.is_some());

    // The report's maximum is recomputed from the vertex table.
    let rows = read_csv(fs::File::open(&csv).map(std::io::BufReader::new).unwrap()).unwrap();
    assert_eq!(rows.len(), 1600);
    let max = rows.iter().filter_map(|r| r.h).map(f64::abs).fold(0.0, f64::max);
    assert_eq!(Some(max), report.max_abs_h_analytic);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let run = |tag: &str, timing: bool| {
        let obj = dir.path().join(format!("{tag}.obj"));
        let rep = dir.path().join(format!("{tag}.json"));
        let mut args = vec![
            "gen", "separable", "--preset", "example6.1", "--m", "3", "--grid", "30", "--oracle",
            "--out-mesh", path_str(&obj), "--out-report", path_str(&rep),
        ];
        if !timing {
            args.push("--no-timing");
        }
        assert_eq!(normsurf(&args).status.code(), Some(0));
        (fs::read(obj).unwrap(), fs::read(rep).unwrap())
    };
    let a = run("a", false);
    let b = run("b", false);
    assert_eq!(a, b);
    let timed = run("c", true);
    assert_eq!(timed.0, a.0);
    let reports = [&a.1, &timed.1].map(|bytes| serde_json::from_slice::<RunReport>(bytes).unwrap().comparable());
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn separable_presets() {
    let rejected = normsurf(&["gen", "separable", "--preset", "example6.3"]);
    assert_eq!(rejected.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&rejected.stderr);
    assert!(msg.contains("positivity domain empty") && msg.contains("Z(w) <= 0"), "{msg}");

    let dir = TempDir::new().unwrap();
    let rep = dir.path().join("r.json");
    let ok = normsurf(&["gen", "separable", "--preset", "example6.4", "--m", "2", "--out-report", path_str(&rep)]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let report = read_report(&rep);
    assert!(report.domain_nonempty);
    assert!(report.constraint_residuals.unwrap().iter().all(|r| r.abs() < 1e-13));
}

#[test]
fn separable_from_coefficient_file_with_anchor() {
    let file = data("example6.2.json");
    let out = normsurf(&[
        "gen", "separable", "--coeffs", path_str(&file), "--anchor", "-1,-1", "--signs", "+,-,+", "--grid", "20",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn homothetical_run() {
    let dir = TempDir::new().unwrap();
    let rep = dir.path().join("h.json");
    let out = normsurf(&[
        "gen", "homothetical", "--m", "3", "--a", "-0.5", "--b", "0.2", "--c2", "2", "--swapped",
        "--grid", "25", "--out-report", path_str(&rep),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_report(&rep);
    assert!(report.skipped_vertices > 0);
    assert!(report.max_abs_h_analytic.unwrap() < 1e-7);
}

#[test]
fn threshold_controls_exit_code() {
    let out = normsurf(&["gen", "translation", "--grid", "10", "--h-threshold", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_parameters_exit_2() {
    for args in [
        &["gen", "translation", "--a", "0"][..],
        &["gen", "translation", "--m", "0"],
        &["gen", "translation", "--window", "-9,9,-1,1"],
        &["gen", "homothetical", "--c2", "0"],
        &["gen", "separable", "--preset", "example6.9"],
        &["gen", "separable", "--preset", "example6.4", "--signs", "++"],
        &["gen", "separable", "--preset", "example6.4", "--window", "0.5"],
    ] {
        assert_eq!(normsurf(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unwritable_output_exits_4() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing").join("mesh.obj");
    let out = normsurf(&["gen", "translation", "--grid", "5", "--window", "0.5", "--out-mesh", path_str(&missing)]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn check_exit_codes() {
    let ok = normsurf(&["check", path_str(&data("example6.1.json"))]);
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8_lossy(&ok.stdout);
    assert_eq!(text.lines().filter(|l| l.ends_with("= 0.000e0")).count(), 6, "{text}");

    let rejected = normsurf(&["check", path_str(&data("example6.3.json"))]);
    assert_eq!(rejected.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&rejected.stdout).contains("Z(w) <= 0"));

    let dir = TempDir::new().unwrap();
    let corrupt = dir.path().join("bad.json");
    fs::write(&corrupt, r#"{"case": "trig", "b": 1, "p": [1, 1"#).unwrap();
    assert_eq!(normsurf(&["check", path_str(&corrupt)]).status.code(), Some(2));
    assert_eq!(normsurf(&["check", path_str(&dir.path().join("absent.json"))]).status.code(), Some(2));
}

#[test]
fn verify_fast_passes_quickly() {
    let start = Instant::now();
    let out = normsurf(&["verify", "fast"]);
    let secs = start.elapsed().as_secs_f64();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(secs < 30.0, "{secs}s");
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 failed"));
}

#[test]
fn verify_detects_injected_fault() {
    let out = normsurf(&["verify", "fast", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
}
