use proptest::prelude::*;
use rfk_core::report::{
    overall_verdict, profile_csv_string, run_verify, strip_timing, sweep_configs, Check, GridSpec, RunConfig,
    Spacing, SweepAxis, Verdict,
};
use rfk_core::{Error, Family, RadialParams};

fn cfg(f: Family, n: u32, c: f64, c1: f64, cz: f64) -> RunConfig {
    RunConfig::new(f, n, RadialParams::new(c, c1, cz))
}

#[test]
fn grid_parsing_and_points() {
    let g: GridSpec = "1e-3:8:50:log".parse().unwrap();
    assert_eq!(g, GridSpec::default());
    let p = g.points();
    assert_eq!(p.len(), 50);
    assert_eq!(p[0], 1e-3);
    assert_eq!(p[49], 8.0);
    assert!(p.windows(2).all(|w| w[1] > w[0]));
    let lin: GridSpec = "1:3:5:linear".parse().unwrap();
    assert_eq!(lin.spacing, Spacing::Linear);
    assert_eq!(lin.points(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
    assert_eq!("0.5:2:3".parse::<GridSpec>().unwrap().spacing, Spacing::Log);
    for bad in ["0:8:50:log", "1:8:1:log", "a:8:50", "1:8:50:cubic", "1:8", "2:1:5"] {
        assert!(matches!(bad.parse::<GridSpec>(), Err(Error::Argument(_))), "{bad}");
    }
}

#[test]
fn config_json_round_trip_and_defaults() {
    let c = RunConfig::from_json_str(r#"{"space": "cpn", "n": 2, "params": {"C": 1.0, "C1": 0.0, "cZ": 0.5}}"#).unwrap();
    assert_eq!(c.grid, GridSpec::default());
    assert_eq!(c.checks, Check::ALL.to_vec());
    assert_eq!(c.seed, rfk_core::DEFAULT_SEED);
    let back = RunConfig::from_json_str(&serde_json::to_string(&c).unwrap()).unwrap();
    assert_eq!(back, c);
    assert!(RunConfig::from_json_str(r#"{"space": "torus", "n": 2}"#).is_err());
    let bad = cfg(Family::Sphere, 3, 1.0, 0.0, 1.0);
    assert!(matches!(bad.validate(), Err(Error::Parameter(_))));
}

#[test]
fn cp2_run_passes() {
    let r = run_verify(&cfg(Family::ComplexProj, 2, 1.0, 0.0, 0.5)).unwrap();
    for o in &r.checks {
        let want = if o.check == Check::Z2Invariance { Verdict::Skipped } else { Verdict::Pass };
        assert_eq!(o.verdict, want, "{:?}: {}", o.check, o.diagnostic);
    }
    assert_eq!(r.overall, Verdict::Pass);
    assert_eq!(r.exit_code(), 0);
    let j = r.to_json();
    assert_eq!(j["overall"], "PASS");
    assert_eq!(j["schema_version"], 1);
    assert_eq!(j["verdicts"]["extension"], "PASS");
    let res = j["checks"]["w_oracle"]["residual"].as_str().unwrap();
    assert_eq!(res.split('e').next().unwrap().replace(['-', '.'], "").len(), 17);
}

#[test]
fn sphere4_with_c1_fails_only_extension() {
    let r = run_verify(&cfg(Family::Sphere, 4, 2.0, 3.0, 0.0)).unwrap();
    for c in [Check::Structure, Check::Commutation, Check::Positivity, Check::WOracle, Check::DetConstancy] {
        assert_eq!(r.verdict(c), Verdict::Pass, "{c:?}");
    }
    assert_eq!(r.verdict(Check::Extension), Verdict::Fail);
    assert_eq!(r.verdict(Check::Bernoulli), Verdict::Skipped);
    assert_eq!(r.overall, Verdict::Fail);
    assert_eq!(r.exit_code(), 1);
}

#[test]
fn cayley_skips_structural_checks() {
    let r = run_verify(&cfg(Family::Cayley, 2, 1.0, 0.0, 0.0)).unwrap();
    for c in [Check::ModelBuild, Check::Structure, Check::Commutation, Check::WOracle, Check::Z2Invariance] {
        assert_eq!(r.verdict(c), Verdict::Skipped, "{c:?}");
    }
    for c in [Check::Positivity, Check::DetConstancy, Check::Extension, Check::Completeness] {
        assert_eq!(r.verdict(c), Verdict::Pass, "{c:?}");
    }
    assert_eq!(r.overall, Verdict::Pass);
    assert_eq!(r.to_json()["verdicts"]["w_oracle"], "SKIPPED");
}

#[test]
fn unselected_checks_are_skipped() {
    let mut c = cfg(Family::QuatProj, 1, 1.0, 0.0, 0.0);
    c.checks = vec![Check::DetConstancy];
    let r = run_verify(&c).unwrap();
    assert_eq!(r.verdict(Check::DetConstancy), Verdict::Pass);
    assert_eq!(r.verdict(Check::Positivity), Verdict::Skipped);
    assert_eq!(r.overall, Verdict::Pass);
    c.checks.clear();
    let r = run_verify(&c).unwrap();
    // model_build still runs
    assert_eq!(r.overall, Verdict::Pass);
}

#[test]
fn reports_are_deterministic() {
    let c = cfg(Family::Sphere, 3, 1.5, 0.0, 0.0);
    let mut a = run_verify(&c).unwrap().to_json();
    let mut b = run_verify(&c).unwrap().to_json();
    strip_timing(&mut a);
    strip_timing(&mut b);
    assert_eq!(a, b);
    assert!(a.get("wall_time_ms").is_none());
}

#[test]
fn profile_csv_shape() {
    let mut c = cfg(Family::QuatProj, 1, 1.0, 0.0, 0.0);
    c.grid = "1e-3:8:100:log".parse().unwrap();
    let csv = profile_csv_string(&c).unwrap();
    assert!(!csv.contains('\r'));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 101);
    assert_eq!(lines[0], "x,f_prime,f_double_prime,wH_min_eig,wStar_min_eig,det_product,f_U,h");
    let rows: Vec<Vec<f64>> =
        lines[1..].iter().map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    let d0 = rows[0][5];
    assert!(rows.iter().all(|r| ((r[5] - d0) / d0).abs() < 1e-8));
    assert!(rows.windows(2).all(|w| w[1][7] > w[0][7]));
}

#[test]
fn sweep_is_cartesian() {
    let base = cfg(Family::ComplexProj, 1, 1.0, 0.0, 0.0);
    let axes: Vec<SweepAxis> = ["C=0.5,1,2", "cZ=0,0.5"].iter().map(|s| s.parse().unwrap()).collect();
    let all = sweep_configs(&base, &axes);
    assert_eq!(all.len(), 6);
    assert_eq!(all[1].params, RadialParams::new(0.5, 0.0, 0.5));
    assert_eq!(all[5].params, RadialParams::new(2.0, 0.0, 0.5));
    assert!("D=1".parse::<SweepAxis>().is_err());
    assert!("C=1,x".parse::<SweepAxis>().is_err());
}

fn verdict() -> impl Strategy<Value = Verdict> {
    prop_oneof![Just(Verdict::Pass), Just(Verdict::Fail), Just(Verdict::Skipped)]
}

proptest! {
    #[test]
    fn overall_rule(vs in proptest::collection::vec(verdict(), 0..12)) {
        let o = overall_verdict(vs.iter().copied());
        let expect_pass = !vs.contains(&Verdict::Fail) && vs.contains(&Verdict::Pass);
        prop_assert_eq!(o == Verdict::Pass, expect_pass);
        prop_assert!(o != Verdict::Skipped);
    }
}
