use std::fs;
use std::process::{Command, Output};

fn ksreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ksreg")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn verify_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = ksreg(&["verify", "--seed", "7", "--samples", "100", "--out", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    }
    let (ja, jb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ja, jb);
    let report: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(report["seed"], 7);
    assert_eq!(report["passed"], true);
    assert!(report["prng"].as_str().unwrap().contains("ChaCha20"));
}

#[test]
fn verify_csv_has_comment_header() {
    let out = ksreg(&["verify", "--samples", "20", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# prng="));
    assert!(text.lines().nth(1).unwrap().starts_with("suite,passed"));
}

#[test]
fn zero_tolerance_fails_with_listing() {
    let out = ksreg(&["verify", "--samples", "20", "--tolerance", "0"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("orbit_space_float"));
}

#[test]
fn bad_configuration_is_a_usage_error() {
    assert_eq!(code(&ksreg(&["verify", "--samples", "0"])), 2);
    assert_eq!(code(&ksreg(&["verify", "--tolerance", "-1"])), 2);
    assert_eq!(code(&ksreg(&["verify", "--format", "xml"])), 2);
    assert_eq!(code(&ksreg(&["orbit", "--state", "1,2,3"])), 2);
    assert_eq!(code(&ksreg(&["orbit", "--state", "1,0,0,0,0,0,0,0"])), 2);
    assert_eq!(code(&ksreg(&["bench", "--grid", ""])), 2);
}

#[test]
fn orbit_writes_three_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let out = ksreg(&[
        "orbit", "--state", "circular", "--format", "csv", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    for name in ["oscillator.csv", "ks_image.csv", "kepler.csv", "report.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let kepler = fs::read_to_string(dir.path().join("kepler.csv")).unwrap();
    assert!(kepler.starts_with("t,x1,x2,x3,y1,y2,y3,energy,J1,J2,J3,e1,e2,e3\n"));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(report["max_deviation"].as_f64().unwrap() < 1e-6);
}

#[test]
fn collision_seed_reports_collision_times() {
    let dir = tempfile::tempdir().unwrap();
    let out = ksreg(&["orbit", "--state", "collision", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    let tau = report["oscillator_collision_time"].as_f64().unwrap();
    let t = report["collision_time"].as_f64().unwrap();
    assert!((tau - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert!((t - std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(report["kepler_side"], "collapsing");
}

#[test]
fn bench_table() {
    let out = ksreg(&["bench", "--grid", "1e-3", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "ell,method,steps,max_energy_drift,periapsis_error,failed");
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().any(|l| l.contains("ks_regularized") && l.ends_with("false")));
}

#[test]
fn table_json() {
    let out = ksreg(&["table"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["fields"].as_array().unwrap().len(), 16);
    assert!(v["discrepancies"].is_array());
}
