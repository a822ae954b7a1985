use std::fs;
use std::process::{Command, Output};

fn rfk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfk")).args(args).env_remove("RFK_SEED").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn strip_timing(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(m) => {
            m.remove("wall_time_ms");
            m.values_mut().for_each(strip_timing);
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[test]
fn verify_pass_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = rfk(&["verify", "--space", "cpn", "--n", "2", "--C", "1", "--C1", "0", "--cZ", "0.5", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let j: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(j["overall"], "PASS");
    assert_eq!(j["verdicts"]["extension"], "PASS");
    assert_eq!(j["config"]["params"]["cZ"], 0.5);
    assert_eq!(j["seed"], rfk_core::DEFAULT_SEED);
}

#[test]
fn verify_fail_exit_one() {
    let o = rfk(&["verify", "--space", "sphere", "--n", "4", "--C", "2", "--C1", "3"]);
    assert_eq!(code(&o), 1);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("overall: FAIL"));
}

#[test]
fn cayley_report_skips_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let o = rfk(&["verify", "--space", "cayley", "--n", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let j: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(j["verdicts"]["w_oracle"], "SKIPPED");
    assert_eq!(j["verdicts"]["det_constancy"], "PASS");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&rfk(&["verify", "--space", "sphere", "--n", "3", "--cZ", "1"])), 2);
    assert_eq!(code(&rfk(&["verify", "--space", "torus", "--n", "3"])), 2);
    assert_eq!(code(&rfk(&["verify", "--space", "cpn", "--n", "2", "--C", "abc"])), 2);
    assert_eq!(code(&rfk(&["verify", "--frobnicate"])), 2);
    assert_eq!(code(&rfk(&["verify", "--space", "cpn"])), 2);
    assert_eq!(code(&rfk(&["profile", "--space", "hpn", "--n", "1", "--grid", "0:8:5"])), 2);
    assert_eq!(code(&rfk(&["sweep", "--space", "cpn", "--n", "1", "--sweep", "Q=1"])), 2);
}

#[test]
fn io_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("x.csv");
    assert_eq!(code(&rfk(&["profile", "--space", "hpn", "--n", "1", "--out", bad.to_str().unwrap()])), 3);
    let missing_cfg = dir.path().join("nope.json");
    assert_eq!(code(&rfk(&["verify", "--config", missing_cfg.to_str().unwrap()])), 3);
}

#[test]
fn profile_csv_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("prof.csv");
    let o = rfk(&["profile", "--space", "hpn", "--n", "1", "--grid", "1e-3:8:100:log", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 101);
    assert!(text.starts_with("x,f_prime,f_double_prime,wH_min_eig,wStar_min_eig,det_product,f_U,h\n"));
    assert!(!text.contains('\r'));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"space": "cpn", "n": 1, "params": {"C": 1.0, "C1": 0.0, "cZ": 0.0}, "grid": "1e-2:4:10:log", "seed": 7}"#,
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let o = rfk(&["verify", "--config", cfg.to_str().unwrap(), "--cZ", "0.3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let j: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(j["config"]["params"]["cZ"], 0.3);
    assert_eq!(j["config"]["grid"], "0.01:4:10:log");
    assert_eq!(j["seed"], 7);
    assert_eq!(j["verdicts"]["z2_invariance"], "SKIPPED");
}

#[test]
fn seed_env_override_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |p: &std::path::Path| {
        vec!["verify".to_string(), "--space".into(), "sphere".into(), "--n".into(), "3".into(), "--out".into(), p.to_str().unwrap().into()]
    };
    for p in [&a, &b] {
        let o = Command::new(env!("CARGO_BIN_EXE_rfk")).args(args(p)).env("RFK_SEED", "12345").output().unwrap();
        assert_eq!(code(&o), 0);
    }
    let mut ja: serde_json::Value = serde_json::from_str(&fs::read_to_string(&a).unwrap()).unwrap();
    let mut jb: serde_json::Value = serde_json::from_str(&fs::read_to_string(&b).unwrap()).unwrap();
    assert_eq!(ja["seed"], 12345);
    strip_timing(&mut ja);
    strip_timing(&mut jb);
    assert_eq!(ja, jb);
    let o = Command::new(env!("CARGO_BIN_EXE_rfk")).args(args(&a)).env("RFK_SEED", "x").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn sweep_writes_one_report_per_combination() {
    let dir = tempfile::tempdir().unwrap();
    let o = rfk(&[
        "sweep", "--space", "cpn", "--n", "1", "--grid", "1e-2:4:8:log", "--sweep", "C=0.5,1,2", "--sweep", "C1=0,0.5",
        "--out-dir", dir.path().to_str().unwrap(),
    ]);
    // C1 > 0 fails extension
    assert_eq!(code(&o), 1);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 6);
    let ok = rfk(&["sweep", "--space", "cpn", "--n", "1", "--grid", "1e-2:4:8:log", "--sweep", "cZ=0,0.5"]);
    assert_eq!(code(&ok), 0);
    let ok = rfk(&["sweep", "--space", "hpn", "--n", "1", "--grid", "1e-2:4:8:log", "--sweep", "C=1,2"]);
    assert_eq!(code(&ok), 0);
}

#[test]
fn completeness_subcommand() {
    let o = rfk(&["completeness", "--space", "cpn", "--n", "2", "--cZ", "-0.5", "--grid", "1e-2:8:12:log"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    let json_end = text.rfind('}').unwrap();
    let j: serde_json::Value = serde_json::from_str(&text[..=json_end]).unwrap();
    assert_eq!(j["report"]["divergent"], true);
    assert_eq!(j["geodesic_field"].as_array().unwrap().len(), 12);
}
