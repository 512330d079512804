use std::process::{Command, Output};

fn qbounds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbounds"))
        .args(args)
        .env_remove("QBOUNDS_CONFIG")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn parity_bounds_report() {
    let out = qbounds(&["bounds", "--function", "parity", "--n", "2", "--c", "16"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["deg"], 2);
    assert_eq!(v["xpoly0"], 2);
    let m = v["madv"][0]["madv0"].as_f64().unwrap();
    assert!((2.0 - 1e-9..=2.5 + 1e-9).contains(&m), "{m}");
    assert!(v.get("timestamp").is_none());
}

#[test]
fn or3_report_stamps_every_check() {
    let out = qbounds(&["bounds", "--function", "or", "--n", "3", "--eps", "0.3333", "--c", "1024"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 8);
    assert!(checks.iter().all(|c| c["pass"] == true && c["tolerance"].is_number()));
    assert!(v["madv"][0]["eps_lower"]["sdp"].is_number());
}

#[test]
fn and2_from_table() {
    let out = qbounds(&["bounds", "--table", "0x8", "--n", "2", "--format", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("deg") && l.trim_end().ends_with('2')), "{text}");
}

#[test]
fn reports_are_reproducible() {
    let args = ["bounds", "--function", "maj", "--n", "3", "--eps", "0.25", "--c", "2^10"];
    assert_eq!(qbounds(&args).stdout, qbounds(&args).stdout);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qbounds(&["bounds", "--function", "nope", "--n", "2"]).status.code(), Some(2));
    assert_eq!(qbounds(&["bounds", "--function", "or", "--n", "2", "--c", "0.5"]).status.code(), Some(2));
    assert_eq!(qbounds(&["bounds", "--n", "2"]).status.code(), Some(2));
    assert_eq!(qbounds(&["sweep-c", "--function", "or", "--n", "2", "--c-grid", "x"]).status.code(), Some(2));
}

fn sweep(args: &[&str]) -> Vec<Vec<f64>> {
    let out = qbounds(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("c,madv0_sdp,lower,upper,xpoly0"));
    lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn or3_sweep_gap_shrinks() {
    let rows = sweep(&["sweep-c", "--function", "or", "--n", "3", "--c-grid", "2^2..2^20:3"]);
    assert_eq!(rows.len(), 7);
    // δ̂ = tr[Π_{≥3}Φ] = 1/2 for OR₃, so the gap is at most (3 + 1)/log₂c.
    for r in rows {
        let (c, madv, x0) = (r[0], r[1], r[4]);
        assert!((madv - x0).abs() <= 4.0 / c.log2() + 1e-4, "{r:?}");
    }
}

#[test]
fn parity_sweep_lower_envelope_is_constant() {
    for r in sweep(&["sweep-c", "--function", "parity", "--n", "2", "--c-grid", "2^2..2^20:6"]) {
        assert!((r[2] - 2.0).abs() < 1e-9 && (r[1] - 2.0).abs() < 1e-6, "{r:?}");
    }
}

#[test]
fn constant_sweep_is_zero() {
    for r in sweep(&["sweep-c", "--table", "0x0", "--n", "2", "--c-grid", "2^4,2^10"]) {
        assert!(r[1].abs() < 1e-6 && r[2].abs() < 1e-9 && r[4] == 0.0, "{r:?}");
    }
}

#[test]
fn verify_quick_is_deterministic() {
    let a = qbounds(&["verify", "--seed", "3", "--level", "quick"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    let b = qbounds(&["verify", "--seed", "3", "--level", "quick"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["failed"], 0);
}

#[test]
fn injected_defect_is_caught() {
    let out = qbounds(&["verify", "--level", "quick", "--inject-defect"]);
    assert_eq!(out.status.code(), Some(4));
    let v = json(&out);
    assert_eq!(v["failed"], 1);
}

#[test]
fn config_from_environment() {
    let dir = std::env::temp_dir().join(format!("qbounds-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.toml");
    std::fs::write(&good, "seed = 11\n[tolerances]\nsdp_max_iterations = 20000\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qbounds"))
        .args(["audit", "--n", "2", "--queries", "2"])
        .env("QBOUNDS_CONFIG", &good)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "seed = \"x\"\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qbounds"))
        .args(["audit"])
        .env("QBOUNDS_CONFIG", &bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn audit_exports_trajectory() {
    let path = std::env::temp_dir().join(format!("qbounds-traj-{}.json", std::process::id()));
    let out = qbounds(&["audit", "--seed", "4", "--trajectory", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let traj: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(traj["seed"], 4);
    assert_eq!(traj["gram"].as_array().unwrap().len(), 4);
}
