//! Acceptance run: one pass/fail line per criterion.
//!
//! Criteria 1 to 10 run the tagged checks of the full verification tier
//! in-process; 6 additionally drives the binary through the rejection
//! paths, and 11 times `normsurf verify full` as a subprocess.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use normsurf_cli::verify::{checks, Tier, VerifyOptions};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_normsurf"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn in_process(criterion: u8) -> (bool, String) {
    let opts = VerifyOptions::new(Tier::Full);
    let mut ok = true;
    let mut details = Vec::new();
    for check in checks().into_iter().filter(|c| c.criterion == Some(criterion)) {
        let r = check.run(&opts);
        ok &= r.passed;
        details.push(format!("{}: {}", r.name, r.detail));
    }
    (ok && !details.is_empty(), details.join("; "))
}

fn end_to_end_rejection() -> (bool, String) {
    let check = binary().arg("check").arg(data("example6.3.json")).output().expect("run check");
    let gen = binary()
        .args(["gen", "separable", "--preset", "example6.3"])
        .output()
        .expect("run gen");
    let message = String::from_utf8_lossy(&gen.stderr);
    let ok = check.status.code() == Some(1)
        && gen.status.code() == Some(3)
        && message.contains("positivity domain empty");
    (ok, format!("binary: check exit {:?}, gen exit {:?}", check.status.code(), gen.status.code()))
}

fn full_suite_subprocess() -> (bool, String) {
    let start = Instant::now();
    let out = binary().args(["verify", "full"]).output().expect("run verify");
    let secs = start.elapsed().as_secs_f64();
    let ok = out.status.success() && secs < 300.0;
    (ok, format!("verify full exit {:?} in {secs:.1}s", out.status.code()))
}

fn main() -> ExitCode {
    let mut failed = 0;
    for criterion in 1..=11u8 {
        let (ok, detail) = match criterion {
            6 => {
                let (a, da) = in_process(6);
                let (b, db) = end_to_end_rejection();
                (a && b, format!("{da}; {db}"))
            }
            11 => full_suite_subprocess(),
            n => in_process(n),
        };
        if !ok {
            failed += 1;
        }
        println!("criterion {criterion:>2}: {}  {detail}", if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
