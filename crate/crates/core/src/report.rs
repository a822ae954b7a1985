//! Verification runs: configuration, the ordered check suite, and the JSON /
//! CSV artifacts.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::algebra::{build_model, structure_report, AlgebraModel};
use crate::completeness::{analyze_completeness, bernoulli_ode_check, f_u_with, verify_geodesic_field};
use crate::error::{Error, Result};
use crate::profiles::RadialProfile;
use crate::registry::{lookup_space, validate_params, Family, RadialParams, SpaceDescriptor};
use crate::verifier::{
    check_commutation, check_det_constancy, check_extension, check_positivity, check_z2_invariance, compare_oracle,
    cp_grouped_product, expected_det_constant, w_closed_form_with, TOL_DET, TOL_ORACLE, TOL_STRUCTURAL,
};
use crate::{DEFAULT_SEED, VERSION};

pub const SCHEMA_VERSION: u32 = 1;

/// Residuals are written with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

/// `min:max:count:spacing`, e.g. `1e-3:8:50:log`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { min: 1e-3, max: 8.0, count: 50, spacing: Spacing::Log }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.min > 0.0) {
            return Err(Error::Argument(format!("grid min must be positive, got {}", self.min)));
        }
        if !(self.max.is_finite() && self.max > self.min) {
            return Err(Error::Argument(format!("grid max must exceed min, got {}..{}", self.min, self.max)));
        }
        if self.count < 2 {
            return Err(Error::Argument(format!("grid count must be at least 2, got {}", self.count)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    return self.max;
                }
                let s = k as f64 / last;
                match self.spacing {
                    Spacing::Log => self.min * (self.max / self.min).powf(s),
                    Spacing::Linear => self.min + (self.max - self.min) * s,
                }
            })
            .collect()
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sp = match self.spacing {
            Spacing::Log => "log",
            Spacing::Linear => "linear",
        };
        write!(f, "{}:{}:{}:{}", self.min, self.max, self.count, sp)
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 && parts.len() != 4 {
            return Err(Error::Argument(format!("grid '{s}' is not of the form min:max:count[:log|linear]")));
        }
        let num = |t: &str| {
            t.trim().parse::<f64>().map_err(|_| Error::Argument(format!("malformed number '{t}' in grid '{s}'")))
        };
        let count = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Argument(format!("malformed count '{}' in grid '{s}'", parts[2])))?;
        let spacing = match parts.get(3).map(|t| t.trim()) {
            None | Some("log") => Spacing::Log,
            Some("linear") | Some("lin") => Spacing::Linear,
            Some(other) => return Err(Error::Argument(format!("unknown grid spacing '{other}'"))),
        };
        let g = GridSpec { min: num(parts[0])?, max: num(parts[1])?, count, spacing };
        g.validate()?;
        Ok(g)
    }
}

impl Serialize for GridSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub structural: f64,
    pub oracle: f64,
    pub det: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { structural: TOL_STRUCTURAL, oracle: TOL_ORACLE, det: TOL_DET }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("structural", self.structural), ("oracle", self.oracle), ("det", self.det)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Argument(format!("tolerance '{name}' must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    ModelBuild,
    Structure,
    Commutation,
    Positivity,
    WOracle,
    DetConstancy,
    Extension,
    Z2Invariance,
    Completeness,
    Bernoulli,
}

impl Check {
    /// Execution order.
    pub const ALL: [Check; 10] = [
        Check::ModelBuild,
        Check::Structure,
        Check::Commutation,
        Check::Positivity,
        Check::WOracle,
        Check::DetConstancy,
        Check::Extension,
        Check::Z2Invariance,
        Check::Completeness,
        Check::Bernoulli,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::ModelBuild => "model_build",
            Check::Structure => "structure",
            Check::Commutation => "commutation",
            Check::Positivity => "positivity",
            Check::WOracle => "w_oracle",
            Check::DetConstancy => "det_constancy",
            Check::Extension => "extension",
            Check::Z2Invariance => "z2_invariance",
            Check::Completeness => "completeness",
            Check::Bernoulli => "bernoulli",
        }
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::Argument(format!("unknown check '{s}'")))
    }
}

fn default_checks() -> Vec<Check> {
    Check::ALL.to_vec()
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub space: Family,
    pub n: u32,
    #[serde(default)]
    pub params: RadialParams,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(space: Family, n: u32, params: RadialParams) -> Self {
        Self {
            space,
            n,
            params,
            grid: GridSpec::default(),
            tolerances: Tolerances::default(),
            seed: DEFAULT_SEED,
            checks: default_checks(),
            report_path: None,
            profile_path: None,
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Argument(format!("config: {e}")))
    }

    /// Resolves the space and enforces the parameter and grid constraints.
    pub fn validate(&self) -> Result<SpaceDescriptor> {
        let desc = lookup_space(self.space, self.n)?;
        validate_params(&desc, self.params)?;
        self.grid.validate()?;
        self.tolerances.validate()?;
        Ok(desc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub check: Check,
    pub verdict: Verdict,
    /// The residual compared against the check's tolerance, if any.
    pub residual: Option<f64>,
    pub diagnostic: String,
    pub details: Value,
    pub wall_time_ms: f64,
}

impl CheckOutcome {
    fn skipped(check: Check, why: impl Into<String>) -> Self {
        Self { check, verdict: Verdict::Skipped, residual: None, diagnostic: why.into(), details: Value::Null, wall_time_ms: 0.0 }
    }

    fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict,
            "residual": self.residual.map(fmt_f64),
            "diagnostic": self.diagnostic,
            "details": self.details,
            "wall_time_ms": self.wall_time_ms,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub config: RunConfig,
    pub space: SpaceDescriptor,
    pub checks: Vec<CheckOutcome>,
    pub overall: Verdict,
    pub wall_time_ms: f64,
}

/// `PASS` iff nothing failed and at least one check passed.
pub fn overall_verdict(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut any_pass = false;
    for v in verdicts {
        match v {
            Verdict::Fail => return Verdict::Fail,
            Verdict::Pass => any_pass = true,
            Verdict::Skipped => {}
        }
    }
    if any_pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

impl VerificationReport {
    pub fn verdict(&self, check: Check) -> Verdict {
        self.outcome(check).map_or(Verdict::Skipped, |o| o.verdict)
    }

    pub fn outcome(&self, check: Check) -> Option<&CheckOutcome> {
        self.checks.iter().find(|o| o.check == check)
    }

    pub fn exit_code(&self) -> i32 {
        if self.overall == Verdict::Pass {
            0
        } else {
            1
        }
    }

    /// The full report. Keys are sorted; `wall_time_ms` fields are the only
    /// run-to-run variation.
    pub fn to_json(&self) -> Value {
        let mut verdicts = Map::new();
        let mut checks = Map::new();
        for o in &self.checks {
            verdicts.insert(o.check.name().into(), json!(o.verdict));
            checks.insert(o.check.name().into(), o.to_json());
        }
        json!({
            "schema_version": SCHEMA_VERSION,
            "version": VERSION,
            "seed": self.config.seed,
            "config": self.config,
            "space": {
                "label": self.space.label(),
                "dim": self.space.dim,
                "m_eps": self.space.m_eps,
                "m_half": self.space.m_half,
                "h": self.space.h_label,
            },
            "verdicts": verdicts,
            "checks": checks,
            "overall": self.overall,
            "wall_time_ms": self.wall_time_ms,
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write_json(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.to_json_string())
    }
}

/// Removes every `wall_time_ms` key, for comparing reports across runs.
pub fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("wall_time_ms");
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

struct Outcome {
    pass: bool,
    residual: Option<f64>,
    diagnostic: String,
    details: Value,
}

struct Runner<'a> {
    config: &'a RunConfig,
    desc: SpaceDescriptor,
    profile: RadialProfile,
    grid: Vec<f64>,
    model: Option<AlgebraModel>,
}

const Z2_POINTS: [f64; 3] = [0.3, 1.0, 3.0];
const BERNOULLI_RANGE: (f64, f64) = (0.5, 3.0);
const BERNOULLI_TOL: f64 = 1e-6;
const GEODESIC_TOL: f64 = 1e-9;

impl Runner<'_> {
    fn model(&self) -> std::result::Result<&AlgebraModel, String> {
        self.model.as_ref().ok_or_else(|| format!("no matrix model for {}", self.desc.label()))
    }

    fn structure(&self) -> Result<Outcome> {
        let m = self.model().map_err(Error::InternalInconsistency)?;
        let r = structure_report(m)?;
        let residual = [r.pairing_residual, r.sigma_residual, r.gram_residual, r.cp_bracket_residual.unwrap_or(0.0)]
            .into_iter()
            .fold(0.0, f64::max);
        let pass = r.multiplicities_match
            && residual < self.config.tolerances.structural
            && r.t_orthogonality_residual < crate::algebra::TOL_T
            && r.t_square_residual < crate::algebra::TOL_T;
        Ok(Outcome {
            pass,
            residual: Some(residual),
            diagnostic: format!(
                "multiplicities (m_eps, m_half, dim h) = {:?}, expected ({}, {}, {})",
                r.multiplicities, self.desc.m_eps, self.desc.m_half, self.desc.h_dim
            ),
            details: json!({
                "multiplicities_match": r.multiplicities_match,
                "pairing_residual": fmt_f64(r.pairing_residual),
                "sigma_residual": fmt_f64(r.sigma_residual),
                "gram_residual": fmt_f64(r.gram_residual),
                "t_orthogonality_residual": fmt_f64(r.t_orthogonality_residual),
                "t_square_residual": fmt_f64(r.t_square_residual),
                "cp_bracket_residual": r.cp_bracket_residual.map(fmt_f64),
            }),
        })
    }

    fn commutation(&self) -> Result<Outcome> {
        let m = self.model().map_err(Error::InternalInconsistency)?;
        let (mut rel, mut k, mut mm): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for &x in &self.grid {
            let r = check_commutation(m, self.config.params, x)?;
            rel = rel.max(r.relative());
            k = k.max(r.k);
            mm = mm.max(r.m);
        }
        Ok(Outcome {
            pass: rel < self.config.tolerances.structural,
            residual: Some(rel),
            diagnostic: "k- and m-commutation relations over the grid, relative to 1 + largest term".into(),
            details: json!({ "k_residual_abs": fmt_f64(k), "m_residual_abs": fmt_f64(mm) }),
        })
    }

    fn positivity(&self) -> Result<Outcome> {
        let mut worst_wh = f64::INFINITY;
        let mut worst_ws = f64::INFINITY;
        let mut failures = Vec::new();
        let mut disagreements = 0;
        for &x in &self.grid {
            let p = check_positivity(&w_closed_form_with(&self.profile, x)?);
            worst_wh = worst_wh.min(p.wh_min_eig);
            worst_ws = worst_ws.min(p.wstar_min_eig);
            if !p.positive {
                failures.push(x);
            }
            if !p.determinant_test_agrees {
                disagreements += 1;
            }
        }
        Ok(Outcome {
            pass: failures.is_empty() && disagreements == 0,
            residual: None,
            diagnostic: if failures.is_empty() {
                "w_H and w_* positive-definite at every grid point".into()
            } else {
                format!("not positive-definite at {} grid points, first x = {}", failures.len(), failures[0])
            },
            details: json!({
                "min_wh_eigenvalue": fmt_f64(worst_wh),
                "min_wstar_eigenvalue": fmt_f64(worst_ws),
                "minor_test_disagreements": disagreements,
            }),
        })
    }

    fn oracle(&self) -> Result<Outcome> {
        let m = self.model().map_err(Error::InternalInconsistency)?;
        let r = compare_oracle(m, self.config.params, &self.grid)?;
        Ok(Outcome {
            pass: r.max_rel_error < self.config.tolerances.oracle
                && r.max_holomorphic_residual < self.config.tolerances.structural,
            residual: Some(r.max_rel_error),
            diagnostic: format!("worst entry at x = {}", r.worst_x),
            details: json!({
                "max_rel_error": fmt_f64(r.max_rel_error),
                "holomorphic_residual": fmt_f64(r.max_holomorphic_residual),
                "worst_x": r.worst_x,
            }),
        })
    }

    fn det_constancy(&self) -> Result<Outcome> {
        let d = check_det_constancy(&self.desc, self.config.params, &self.grid)?;
        let tol = self.config.tolerances.det;
        let mut pass = d.max_rel_deviation < tol;
        let mut details = Map::new();
        details.insert("constant".into(), json!(fmt_f64(d.constant)));
        details.insert("max_rel_deviation".into(), json!(fmt_f64(d.max_rel_deviation)));
        details.insert(
            "predicted_constant".into(),
            json!(fmt_f64(expected_det_constant(&self.desc, self.config.params))),
        );
        if self.desc.family == Family::ComplexProj {
            let n = self.desc.n as i32;
            let want = 4f64.powi(n - 1) * self.config.params.c.powi(n);
            let mut worst: f64 = 0.0;
            for &x in &self.grid {
                worst = worst.max((cp_grouped_product(&self.profile, x)? / want - 1.0).abs());
            }
            pass &= worst < tol;
            details.insert("grouped_product_expected".into(), json!(fmt_f64(want)));
            details.insert("grouped_product_max_rel_error".into(), json!(fmt_f64(worst)));
        }
        Ok(Outcome {
            pass,
            residual: Some(d.max_rel_deviation),
            diagnostic: "det w_H * det w_* across the grid".into(),
            details: Value::Object(details),
        })
    }

    fn extension(&self) -> Result<Outcome> {
        let r = check_extension(&self.desc, self.config.params)?;
        Ok(Outcome {
            pass: r.passes,
            residual: r.max_limit_error.is_finite().then_some(r.max_limit_error),
            diagnostic: r.diagnostic.clone(),
            details: json!({
                "kernel_converges": r.kernel_converges,
                "last_kernel_value": fmt_f64(r.kernel_values.last().map_or(f64::NAN, |v| v.1)),
                "limit_eigenvalues": r.limit_eigenvalues.iter().copied().map(fmt_f64).collect::<Vec<_>>(),
                "expected_limit_eigenvalues":
                    r.expected_limit_eigenvalues.iter().copied().map(fmt_f64).collect::<Vec<_>>(),
                "limits_positive": r.limits_positive,
            }),
        })
    }

    fn z2(&self) -> Result<Outcome> {
        let m = self.model().map_err(Error::InternalInconsistency)?;
        let mut worst: f64 = 0.0;
        let mut label = String::new();
        for (i, &x) in Z2_POINTS.iter().enumerate() {
            let r = check_z2_invariance(m, self.config.params, x, self.config.seed.wrapping_add(i as u64))?;
            worst = worst.max(r.max_residual);
            label = r.reflection;
        }
        Ok(Outcome {
            pass: worst < self.config.tolerances.structural,
            residual: Some(worst),
            diagnostic: format!("Delta-form invariance under {label}"),
            details: json!({ "points": Z2_POINTS, "samples_per_point": 8 }),
        })
    }

    fn completeness(&self) -> Result<Outcome> {
        let r = analyze_completeness(&self.desc, self.config.params, &self.grid)?;
        let mut pass = r.divergent && r.invariants_hold();
        let mut details = Map::new();
        details.insert("h_1_30".into(), json!(fmt_f64(r.h_1_30)));
        details.insert("growth_exponent".into(), json!(fmt_f64(r.growth_exponent)));
        details.insert("divergent".into(), json!(r.divergent));
        details.insert("h_end".into(), json!(fmt_f64(*r.h.last().unwrap_or(&0.0))));
        let mut residual = None;
        if let Some(m) = self.model.as_ref().filter(|m| m.cp().is_some()) {
            let mut worst: f64 = 0.0;
            for &x in &self.grid {
                worst = worst.max(verify_geodesic_field(m, self.config.params, x)?.max_residual());
            }
            pass &= worst < GEODESIC_TOL;
            residual = Some(worst);
            details.insert("geodesic_field_residual".into(), json!(fmt_f64(worst)));
        }
        let diagnostic = if self.config.params.c1 > 0.0 {
            "h diverges at infinity; with C1 > 0 the metric lives on the punctured bundle (see extension)".into()
        } else {
            format!("h(1, 30) = {:.6}", r.h_1_30)
        };
        Ok(Outcome { pass, residual, diagnostic, details: Value::Object(details) })
    }

    fn bernoulli(&self) -> Result<Outcome> {
        let (x0, x1) = BERNOULLI_RANGE;
        let r = bernoulli_ode_check(self.config.params, self.desc.n, x0, x1)?;
        Ok(Outcome {
            pass: r.max_rel_deviation < BERNOULLI_TOL,
            residual: Some(r.max_rel_deviation),
            diagnostic: format!("Runge-Kutta vs closed form on [{x0}, {x1}]"),
            details: json!({ "steps": r.steps, "numeric_end": fmt_f64(r.numeric_end), "closed_end": fmt_f64(r.closed_end) }),
        })
    }

    fn skip_reason(&self, check: Check) -> Option<String> {
        if !self.config.checks.contains(&check) {
            return Some("not selected".into());
        }
        let needs_model = matches!(
            check,
            Check::Structure | Check::Commutation | Check::WOracle | Check::Z2Invariance
        );
        if needs_model && self.model.is_none() {
            return Some(format!("no matrix model for {}", self.desc.label()));
        }
        match check {
            Check::Z2Invariance => {
                let sphere = matches!(self.desc.family, Family::Sphere | Family::RealProj);
                (!sphere).then(|| "Z2 quotient applies to the sphere models only".into())
            }
            Check::Bernoulli => (self.desc.family != Family::ComplexProj)
                .then(|| "Bernoulli reduction applies to cpn only".into()),
            _ => None,
        }
    }

    fn run(&self, check: Check) -> Result<Outcome> {
        match check {
            Check::ModelBuild => unreachable!("handled by run_verify"),
            Check::Structure => self.structure(),
            Check::Commutation => self.commutation(),
            Check::Positivity => self.positivity(),
            Check::WOracle => self.oracle(),
            Check::DetConstancy => self.det_constancy(),
            Check::Extension => self.extension(),
            Check::Z2Invariance => self.z2(),
            Check::Completeness => self.completeness(),
            Check::Bernoulli => self.bernoulli(),
        }
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Runs the selected checks in order. Errors inside a check become FAIL
/// with the error as diagnostic; only an invalid configuration is an `Err`.
pub fn run_verify(config: &RunConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let desc = config.validate()?;
    let profile = RadialProfile::new(&desc, config.params)?;
    let grid = config.grid.points();

    let t = Instant::now();
    let (model, build) = if !desc.has_matrix_model {
        (None, CheckOutcome::skipped(Check::ModelBuild, format!("no matrix model for {}", desc.label())))
    } else {
        match build_model(&desc) {
            Ok(m) => {
                let o = CheckOutcome {
                    check: Check::ModelBuild,
                    verdict: Verdict::Pass,
                    residual: None,
                    diagnostic: format!("dim g = {}, matrix size {}", m.dim_g(), m.size()),
                    details: json!({ "dim_g": m.dim_g(), "matrix_size": m.size(), "inner_scale": m.inner_scale() }),
                    wall_time_ms: ms(t),
                };
                (Some(m), o)
            }
            Err(e) => (
                None,
                CheckOutcome {
                    check: Check::ModelBuild,
                    verdict: Verdict::Fail,
                    residual: None,
                    diagnostic: e.to_string(),
                    details: Value::Null,
                    wall_time_ms: ms(t),
                },
            ),
        }
    };

    let runner = Runner { config, desc: desc.clone(), profile, grid, model };
    let mut checks = vec![build];
    for check in Check::ALL.into_iter().skip(1) {
        if let Some(why) = runner.skip_reason(check) {
            checks.push(CheckOutcome::skipped(check, why));
            continue;
        }
        let t = Instant::now();
        let outcome = match runner.run(check) {
            Ok(o) => CheckOutcome {
                check,
                verdict: if o.pass { Verdict::Pass } else { Verdict::Fail },
                residual: o.residual,
                diagnostic: o.diagnostic,
                details: o.details,
                wall_time_ms: 0.0,
            },
            Err(e) => CheckOutcome {
                check,
                verdict: Verdict::Fail,
                residual: None,
                diagnostic: e.to_string(),
                details: Value::Null,
                wall_time_ms: 0.0,
            },
        };
        checks.push(CheckOutcome { wall_time_ms: ms(t), ..outcome });
    }
    let overall = overall_verdict(checks.iter().map(|o| o.verdict));
    Ok(VerificationReport { config: config.clone(), space: desc, checks, overall, wall_time_ms: ms(start) })
}

pub const CSV_HEADER: &str = "x,f_prime,f_double_prime,wH_min_eig,wStar_min_eig,det_product,f_U,h";

/// One CSV row per grid point; `h` is measured from the first grid point.
pub fn write_profile_csv<W: Write>(config: &RunConfig, mut out: W) -> Result<()> {
    let desc = config.validate()?;
    let profile = RadialProfile::new(&desc, config.params)?;
    let grid = config.grid.points();
    let io_err = |e: io::Error| Error::Numeric(format!("write failed: {e}"));
    writeln!(out, "{CSV_HEADER}").map_err(io_err)?;
    let mut h = 0.0;
    for (i, &x) in grid.iter().enumerate() {
        if i > 0 {
            h += crate::completeness::h_distance_with(&profile, grid[i - 1], x)?;
        }
        let block = w_closed_form_with(&profile, x)?;
        let pos = check_positivity(&block);
        let row = [
            x,
            profile.f_prime(x)?,
            profile.f_double_prime(x)?,
            pos.wh_min_eig,
            pos.wstar_min_eig,
            block.det_product(),
            f_u_with(&profile, x)?,
            h,
        ];
        let line: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(out, "{}", line.join(",")).map_err(io_err)?;
    }
    Ok(())
}

pub fn profile_csv_string(config: &RunConfig) -> Result<String> {
    let mut buf = Vec::new();
    write_profile_csv(config, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV is ASCII"))
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    C,
    C1,
    CZ,
}

/// `NAME=v1,v2,...` with `NAME` one of `C`, `C1`, `cZ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, vals) =
            s.split_once('=').ok_or_else(|| Error::Argument(format!("sweep '{s}' is not of the form NAME=v1,v2")))?;
        let param = match name.trim() {
            "C" => SweepParam::C,
            "C1" => SweepParam::C1,
            "cZ" => SweepParam::CZ,
            other => return Err(Error::Argument(format!("unknown sweep parameter '{other}' (use C, C1 or cZ)"))),
        };
        let values = vals
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Argument(format!("malformed number '{v}' in sweep"))))
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return Err(Error::Argument(format!("sweep '{s}' has no values")));
        }
        Ok(SweepAxis { param, values })
    }
}

/// The cartesian product of the axes applied to `base`, in row-major order.
pub fn sweep_configs(base: &RunConfig, axes: &[SweepAxis]) -> Vec<RunConfig> {
    let mut out = vec![base.clone()];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.values.len());
        for cfg in &out {
            for &v in &axis.values {
                let mut c = cfg.clone();
                match axis.param {
                    SweepParam::C => c.params.c = v,
                    SweepParam::C1 => c.params.c1 = v,
                    SweepParam::CZ => c.params.c_z = v,
                }
                next.push(c);
            }
        }
        out = next;
    }
    out
}

/// Short tag for file names: `C=1_C1=0_cZ=0.5`.
pub fn params_tag(p: RadialParams) -> String {
    format!("C={}_C1={}_cZ={}", p.c, p.c1, p.c_z)
}
