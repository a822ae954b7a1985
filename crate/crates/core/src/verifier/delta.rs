use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{check_positivity, w_closed_form_with};
use crate::algebra::{AlgebraModel, Element};
use crate::error::{Error, Result};
use crate::numerics::linalg::{hermitian_eigenvalues, CMatrix};
use crate::numerics::special::{sech_m1_over_sq, sech_quartic_kernel};
use crate::profiles::RadialProfile;
use crate::registry::{Family, RadialParams, SpaceDescriptor};

/// Point `w ∈ 𝔪` and the two tangent vectors `(ξ₁,u₁)`, `(ξ₂,u₂)` with
/// `ξᵢ ∈ 𝔤`, `uᵢ ∈ 𝔪`.
#[derive(Debug, Clone)]
pub struct DeltaArgs {
    pub w: Element,
    pub u1: Element,
    pub u2: Element,
    pub xi1: Element,
    pub xi2: Element,
}

impl DeltaArgs {
    pub fn conjugated(&self, k: &CMatrix) -> DeltaArgs {
        DeltaArgs {
            w: self.w.conjugated(k),
            u1: self.u1.conjugated(k),
            u2: self.u2.conjugated(k),
            xi1: self.xi1.conjugated(k),
            xi2: self.xi2.conjugated(k),
        }
    }
}

/// The 2-form Δ on `G × 𝔪` at `(e, w)`, extending `ω̃` across `w = 0` when
/// `C₁ = 0`.
pub fn delta_form_eval(model: &AlgebraModel, profile: &RadialProfile, args: &DeltaArgs) -> Result<f64> {
    let ip = |a: &Element, b: &Element| model.inner(a, b);
    let DeltaArgs { w, u1, u2, xi1, xi2 } = args;
    let r = model.norm(w);
    if r == 0.0 && profile.params().c1 > 0.0 {
        return Err(Error::SingularExtension(format!(
            "Delta at w = 0 requires C1 = 0, got C1 = {}",
            profile.params().c1
        )));
    }
    let k1 = profile.kernel_fp_over_r(r)?;
    let k2 = profile.kernel_fp_slope(r)?;
    let br = xi1.bracket(xi2);
    let mut val = -k1 * ip(w, &br) + k1 * (ip(u1, xi2) - ip(u2, xi1))
        + k2 * (ip(u1, w) * ip(w, xi2) - ip(u2, w) * ip(w, xi1));

    let cz = profile.params().c_z;
    if cz != 0.0 {
        let cp = model
            .cp()
            .ok_or_else(|| Error::Parameter("cZ != 0 requires a cpn model".into()))?;
        let i_op = |v: &Element| cp.z0.bracket(v);
        let k3 = sech_m1_over_sq(r);
        let k4 = sech_quartic_kernel(r);
        let (iw, iu1, iu2) = (i_op(w), i_op(u1), i_op(u2));
        let iww = iw.bracket(w);
        val -= cz * (k3 * ip(&iww, &br) - ip(&cp.z0, &br));
        val += cz * k4 * (ip(u1, w) * ip(&iww, xi2) - ip(u2, w) * ip(&iww, xi1));
        val += cz * k4 * (ip(u1, &iw) * ip(w, u2) - ip(u2, &iw) * ip(w, u1));
        val += 2.0 * cz * k3 * (ip(&iu1.bracket(w), xi2) - ip(&iu2.bracket(w), xi1) + ip(u1, &iu2));
    }
    Ok(val)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionReport {
    pub passes: bool,
    /// `(x_m, f'(x_m)/x_m)` along `x_m = 2^{−m}`.
    pub kernel_values: Vec<(f64, f64)>,
    pub kernel_converges: bool,
    pub limit_eigenvalues: Vec<f64>,
    /// Closed-form limits; empty when `C₁ > 0`.
    pub expected_limit_eigenvalues: Vec<f64>,
    pub max_limit_error: f64,
    pub limits_positive: bool,
    pub diagnostic: String,
}

const EXTENSION_STEPS: i32 = 24;

/// Extension of the metric over the zero section.
pub fn check_extension(desc: &SpaceDescriptor, params: RadialParams) -> Result<ExtensionReport> {
    let profile = RadialProfile::new(desc, params)?;
    let mut kernel_values = Vec::new();
    for m in 1..=EXTENSION_STEPS {
        let x = 2f64.powi(-m);
        kernel_values.push((x, profile.f_prime(x)? / x));
    }
    let n = kernel_values.len();
    let ratio = kernel_values[n - 1].1 / kernel_values[n - 2].1;
    let kernel_converges = (ratio - 1.0).abs() < 1e-6;

    let x_last = kernel_values[n - 1].0;
    let block = w_closed_form_with(&profile, x_last)?;
    let mut limit_eigenvalues = hermitian_eigenvalues(&block.wh);
    for b in &block.wstar {
        limit_eigenvalues.extend(hermitian_eigenvalues(b));
    }
    limit_eigenvalues.sort_by(f64::total_cmp);
    let limits_positive = check_positivity(&block).positive;

    let mut expected = Vec::new();
    if params.c1 == 0.0 {
        let slope = profile.slope_at_zero()?;
        if desc.family == Family::ComplexProj {
            let cz = params.c_z.abs();
            for _ in 0..desc.n {
                expected.push(2.0 * slope - 2.0 * cz);
                expected.push(2.0 * slope + 2.0 * cz);
            }
        } else {
            expected = vec![2.0 * slope; desc.dim];
        }
        expected.sort_by(f64::total_cmp);
    }
    let max_limit_error = if expected.len() == limit_eigenvalues.len() {
        expected
            .iter()
            .zip(&limit_eigenvalues)
            .map(|(e, l)| (e - l).abs() / e.abs().max(1.0))
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let passes = kernel_converges && limits_positive && max_limit_error < 1e-6;
    let diagnostic = if !kernel_converges {
        format!(
            "f'(x)/x diverges as x -> 0: {:.6e} at x = {:.3e} (ratio {:.4} per halving)",
            kernel_values[n - 1].1, x_last, ratio
        )
    } else if !limits_positive {
        "limit Hermitian matrices are not positive-definite".to_string()
    } else if max_limit_error >= 1e-6 {
        format!("limit eigenvalues off by {max_limit_error:.3e}")
    } else {
        "w(0) exists and is positive-definite".to_string()
    };
    Ok(ExtensionReport {
        passes,
        kernel_values,
        kernel_converges,
        limit_eigenvalues,
        expected_limit_eigenvalues: expected,
        max_limit_error,
        limits_positive,
        diagnostic,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Z2Report {
    pub passes: bool,
    pub max_residual: f64,
    pub samples: usize,
    pub reflection: String,
}

/// The element of `K₁ \ K` used for the quotient by ℤ₂.
fn reflection(model: &AlgebraModel) -> Result<(CMatrix, String)> {
    let d = model.desc();
    let size = model.size();
    match d.family {
        Family::Sphere | Family::RealProj => {
            // diag(−1, 1, …, 1, −1): the image of diag(1, …, 1, −1) ∈ O(n).
            let mut k = CMatrix::identity(size, size);
            k[(0, 0)] = Complex64::new(-1.0, 0.0);
            k[(size - 1, size - 1)] = Complex64::new(-1.0, 0.0);
            Ok((k, format!("diag(-1, 1, ..., 1, -1) in SO({size})")))
        }
        Family::ComplexProj if d.n == 1 => {
            // exp(πX) = E₁₂ − E₂₁
            let k = CMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(0.0, 0.0),
                    Complex64::new(1.0, 0.0),
                    Complex64::new(-1.0, 0.0),
                    Complex64::new(0.0, 0.0),
                ],
            );
            Ok((k, "exp(pi X) in SU(2)".to_string()))
        }
        _ => Err(Error::Domain(format!(
            "Z2 quotient is defined for sphere models and cpn(1), not {}",
            d.label()
        ))),
    }
}

fn random_in(model: &AlgebraModel, rng: &mut ChaCha8Rng, keep_m: bool) -> Element {
    let c: Vec<f64> = model
        .blocks()
        .iter()
        .map(|b| if !keep_m || b.in_m() { rng.gen_range(-1.0..1.0) } else { 0.0 })
        .collect();
    model.from_coords(&c)
}

/// Right invariance of Δ under the reflection, on seeded random samples with
/// `‖w‖ = x`.
pub fn check_z2_invariance(model: &AlgebraModel, params: RadialParams, x: f64, seed: u64) -> Result<Z2Report> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    let (k, label) = reflection(model)?;
    let profile = RadialProfile::new(model.desc(), params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const SAMPLES: usize = 8;
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let w = random_in(model, &mut rng, true);
        let w = w.scale(x / model.norm(&w));
        let args = DeltaArgs {
            w,
            u1: random_in(model, &mut rng, true),
            u2: random_in(model, &mut rng, true),
            xi1: random_in(model, &mut rng, false),
            xi2: random_in(model, &mut rng, false),
        };
        let base = delta_form_eval(model, &profile, &args)?;
        let moved = delta_form_eval(model, &profile, &args.conjugated(&k))?;
        worst = worst.max((base - moved).abs() / (1.0 + base.abs()));
    }
    Ok(Z2Report { passes: worst < super::TOL_STRUCTURAL, max_residual: worst, samples: SAMPLES, reflection: label })
}
