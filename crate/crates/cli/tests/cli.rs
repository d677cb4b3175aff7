use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn msmlab(args: &[&str], config: &str, dir: &Path) -> Output {
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_msmlab"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("error report is JSON")
}

const SIMULATE: &str = r#"{"schema_version":1,"command":"simulate","alpha":1.5,
    "hurst":{"kind":"constant","h_lo":0.8,"h_hi":0.8},"mode":"lfsm",
    "window":{"t0":-2.0,"t_end":1.0,"gamma":0.05},
    "grid":{"start":0.0,"end":1.0,"n_points":33},"replicates":3,"seed":42}"#;

#[test]
fn simulate_writes_paths_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = msmlab(&["simulate", "--out", out.to_str().unwrap()], SIMULATE, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let listed: Vec<&str> = manifest["files"].as_array().unwrap().iter().map(|f| f["path"].as_str().unwrap()).collect();
    assert_eq!(listed, ["path_0.csv", "path_1.csv", "path_2.csv"]);
    let mut on_disk: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "manifest.json")
        .collect();
    on_disk.sort();
    assert_eq!(on_disk, listed);
    let csv = std::fs::read_to_string(out.join("path_0.csv")).unwrap();
    assert!(csv.starts_with("t,value\n"));
    assert_eq!(csv.lines().count(), 34);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    msmlab(&["simulate", "--out", a.to_str().unwrap()], SIMULATE, dir.path());
    msmlab(&["simulate", "--seed", "43", "--out", b.to_str().unwrap()], SIMULATE, dir.path());
    let x = std::fs::read(a.join("path_0.csv")).unwrap();
    let y = std::fs::read(b.join("path_0.csv")).unwrap();
    assert_ne!(x, y);
    let manifest = std::fs::read_to_string(b.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 43"));
}

#[test]
fn config_errors_exit_2_with_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"schema_version":1,"command":"estimate","alpha":0.8,
        "hurst":{"kind":"constant","h_lo":0.9,"h_hi":0.7},
        "window":"auto","grid":{"start":0.0,"end":1.0,"n_points":1025},"seed":1,
        "estimate":{"interval":[0.0,1.0]}}"#;
    let o = msmlab(&["estimate"], cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr_json(&o);
    let problems = err["problems"].as_array().unwrap();
    let text = serde_json::to_string(problems).unwrap();
    assert!(text.contains("h_lo > 1/α unsatisfiable"), "{text}");
    assert!(text.contains("h_lo ≤ h_hi violated"), "{text}");
    assert!(problems.iter().all(|p| p.get("field").is_some() && p.get("got").is_some()));
}

#[test]
fn unknown_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SIMULATE.replace("\"seed\":42", "\"seed\":42,\"verbose\":true");
    let o = msmlab(&["simulate"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn resource_cap_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"schema_version":1,"command":"simulate","alpha":1.9,
        "hurst":{"kind":"constant","h_lo":0.8,"h_hi":0.8},
        "window":{"t0":-1000.0,"t_end":1.0,"gamma":0.001},
        "grid":{"start":0.0,"end":1.0,"n_points":11},"seed":1}"#;
    let o = msmlab(&["simulate"], cfg, dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lambda"));
}

#[test]
fn verify_reports_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let cfg = r#"{"schema_version":1,"command":"verify","alpha":1.5,
        "hurst":{"kind":"constant","h_lo":0.8,"h_hi":0.8},
        "window":"auto","grid":{"start":0.0,"end":1.0,"n_points":2},"seed":1,
        "verify":{"sampler_draws":100000}}"#;
    let o = msmlab(&["verify", "--out", out.to_str().unwrap()], cfg, dir.path());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out.join("verify.json")).unwrap()).unwrap();
    let names: Vec<&str> = report["kernel_slopes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["far_past", "near_past", "new_mass"]);
    assert_eq!(report["sampler"].as_array().unwrap().len(), 3);
    let pass = report["pass"].as_bool().unwrap();
    assert_eq!(o.status.code(), Some(if pass { 0 } else { 5 }));
}

#[test]
fn figures_share_one_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f");
    let cfg = r#"{"schema_version":1,"command":"figures","alpha":1.8,
        "hurst":{"kind":"rough_weierstrass","params":{"a":0.8122523963562356,"b":2.0,"terms":20},
                 "h_lo":0.75,"h_hi":0.95},
        "window":{"t0":-1.0,"t_end":1.0,"gamma":0.2},
        "grid":{"start":0.0,"end":1.0,"n_points":1025},"replicates":2,"seed":3,
        "figures":{"interval":[0.0,1.0]}}"#;
    let o = msmlab(&["figures", "--out", out.to_str().unwrap()], cfg, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let column = |name: &str| -> Vec<String> {
        std::fs::read_to_string(out.join(name))
            .unwrap()
            .lines()
            .map(|l| l.split(',').next().unwrap().to_string())
            .collect()
    };
    let h = column("hurst.csv");
    assert_eq!(h.len(), 1026);
    assert_eq!(h, column("x_path.csv"));
    assert_eq!(h, column("y_path.csv"));
    assert!(out.join("figures.json").exists());
}

#[test]
fn auto_window_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a");
    let cfg = SIMULATE.replace(r#"{"t0":-2.0,"t_end":1.0,"gamma":0.05}"#, r#""auto""#);
    let o = msmlab(&["simulate", "--out", out.to_str().unwrap()], &cfg, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["resolved"]["auto"], Value::Bool(true));
    assert!(manifest["resolved"]["window"]["gamma"].as_f64().unwrap() > 0.0);
}
