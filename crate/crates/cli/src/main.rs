//! `rfk`: verify invariant Ricci-flat Kähler metrics on tangent bundles of
//! rank-one symmetric spaces.
//!
//! Exit codes: 0 overall PASS, 1 any FAIL, 2 usage or parameter error,
//! 3 I/O error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rfk_core::completeness::{analyze_completeness, verify_geodesic_field};
use rfk_core::report::{
    params_tag, run_verify, sweep_configs, write_profile_csv, Check, GridSpec, RunConfig, SweepAxis, Verdict,
    VerificationReport,
};
use rfk_core::algebra::build_model;
use rfk_core::{Family, RadialParams};

const SEED_ENV: &str = "RFK_SEED";

#[derive(Parser, Debug)]
#[command(name = "rfk", version, about = "Invariant Ricci-flat Kähler metrics on tangent bundles of rank-one symmetric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the verification suite and emit a JSON report.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the radial profile table as CSV.
    Profile {
        #[command(flatten)]
        run: RunArgs,
        /// CSV destination (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Level-set distance and unit radial geodesic field.
    Completeness {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the cartesian product of parameter values, one report each.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// `NAME=v1,v2,...` with NAME one of C, C1, cZ; repeatable.
        #[arg(long = "sweep", required = true)]
        axes: Vec<String>,
        /// Directory for the per-combination reports.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// JSON file with RunConfig fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// sphere, rpn, cpn, hpn or cayley.
    #[arg(long)]
    space: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long = "C")]
    c: Option<f64>,
    #[arg(long = "C1")]
    c1: Option<f64>,
    #[arg(long = "cZ", allow_hyphen_values = true)]
    c_z: Option<f64>,
    /// min:max:count[:log|linear]
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of checks to run.
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    #[arg(long)]
    tol_structural: Option<f64>,
    #[arg(long)]
    tol_oracle: Option<f64>,
    #[arg(long)]
    tol_det: Option<f64>,
}

enum Failure {
    Usage(String),
    Io(String),
}

impl From<rfk_core::Error> for Failure {
    fn from(e: rfk_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn build_config(args: &RunArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
            RunConfig::from_json_str(&text)?
        }
        None => {
            let (Some(space), Some(n)) = (&args.space, args.n) else {
                return Err(Failure::Usage("--space and --n are required without --config".into()));
            };
            RunConfig::new(space.parse::<Family>()?, n, RadialParams::default())
        }
    };
    if let Some(space) = &args.space {
        cfg.space = space.parse()?;
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(c) = args.c {
        cfg.params.c = c;
    }
    if let Some(c1) = args.c1 {
        cfg.params.c1 = c1;
    }
    if let Some(c_z) = args.c_z {
        cfg.params.c_z = c_z;
    }
    if let Some(grid) = &args.grid {
        cfg.grid = grid.parse::<GridSpec>()?;
    }
    if let Ok(raw) = std::env::var(SEED_ENV) {
        cfg.seed = raw
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}='{raw}' is not an unsigned integer")))?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(list) = &args.checks {
        cfg.checks = list.iter().map(|s| s.parse::<Check>()).collect::<Result<_, _>>()?;
    }
    if let Some(t) = args.tol_structural {
        cfg.tolerances.structural = t;
    }
    if let Some(t) = args.tol_oracle {
        cfg.tolerances.oracle = t;
    }
    if let Some(t) = args.tol_det {
        cfg.tolerances.det = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_summary(report: &VerificationReport) {
    println!("{} {:?}", report.space.label(), report.config.params);
    for o in &report.checks {
        println!("  {:<14} {:<7} {}", o.check.name(), o.verdict.to_string(), o.diagnostic);
    }
    println!("overall: {}", report.overall);
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn verify(run: &RunArgs, out: Option<&Path>) -> Result<u8, Failure> {
    let cfg = build_config(run)?;
    let report = run_verify(&cfg)?;
    print_summary(&report);
    if let Some(path) = out.or(cfg.report_path.as_deref()) {
        write_text(path, &report.to_json_string())?;
    }
    Ok(report.exit_code() as u8)
}

fn profile(run: &RunArgs, out: Option<&Path>) -> Result<u8, Failure> {
    let cfg = build_config(run)?;
    match out.or(cfg.profile_path.as_deref()) {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| io_failure(path, e))?;
            let mut w = io::BufWriter::new(file);
            write_profile_csv(&cfg, &mut w)?;
            w.flush().map_err(|e| io_failure(path, e))?;
        }
        None => write_profile_csv(&cfg, io::stdout().lock())?,
    }
    Ok(0)
}

fn completeness(run: &RunArgs, out: Option<&Path>) -> Result<u8, Failure> {
    let cfg = build_config(run)?;
    let desc = cfg.validate()?;
    let grid = cfg.grid.points();
    let report = analyze_completeness(&desc, cfg.params, &grid)?;
    let mut value = serde_json::json!({ "space": desc.label(), "report": report });
    if desc.family == Family::ComplexProj {
        let model = build_model(&desc)?;
        let fields = grid
            .iter()
            .map(|&x| verify_geodesic_field(&model, cfg.params, x))
            .collect::<Result<Vec<_>, _>>()?;
        value["geodesic_field"] = serde_json::to_value(fields).expect("serializable");
    }
    let text = serde_json::to_string_pretty(&value).expect("serializable") + "\n";
    match out {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    println!(
        "h(1, 30) = {:.6e}, growth exponent {:.4}: {}",
        report.h_1_30,
        report.growth_exponent,
        if report.divergent { "divergent" } else { "bounded" }
    );
    Ok(if report.divergent && report.invariants_hold() { 0 } else { 1 })
}

fn sweep(run: &RunArgs, axes: &[String], out_dir: Option<&Path>) -> Result<u8, Failure> {
    let base = build_config(run)?;
    let axes = axes.iter().map(|a| a.parse::<SweepAxis>()).collect::<Result<Vec<_>, _>>()?;
    let configs = sweep_configs(&base, &axes);
    for cfg in &configs {
        cfg.validate()?;
    }
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    }
    let mut any_fail = false;
    for cfg in &configs {
        let report = run_verify(cfg)?;
        any_fail |= report.overall != Verdict::Pass;
        println!("{} {}: {}", report.space.label(), params_tag(cfg.params), report.overall);
        if let Some(dir) = out_dir {
            let path = dir.join(format!("report_{}_{}.json", report.space.label(), params_tag(cfg.params)));
            write_text(&path, &report.to_json_string())?;
        }
    }
    Ok(u8::from(any_fail))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = match &cli.command {
        Command::Verify { run, out } => verify(run, out.as_deref()),
        Command::Profile { run, out } => profile(run, out.as_deref()),
        Command::Completeness { run, out } => completeness(run, out.as_deref()),
        Command::Sweep { run, axes, out_dir } => sweep(run, axes, out_dir.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            ExitCode::from(3)
        }
    }
}
