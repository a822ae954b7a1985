//! Radial data of the Ricci-flat family: `f'`, `f''`, the vector-function
//! `a(x)` and the removable-singularity kernels used by the Δ-form.
//!
//! For the integral families `f'^m = C·I(x) + C₁` with
//! `I(x) = ∫₀ˣ sinh(2t)^{m_ε} sinh(t)^{m_{ε/2}} dt`; everything is carried in
//! the log domain so that `x` up to a few hundred stays finite. For `ℂPⁿ`,
//! `f'² = (Cⁿ sinh^{2n}x + C₁)^{1/n} + c_Z² tanh²x`.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::algebra::{AlgebraModel, Element};
use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate, Tolerance};
use crate::numerics::special::{ln_cosh, ln_sinh, log_add_exp, sinhc, sinhc_slope, tanhc, tanhc_slope};
use crate::registry::{validate_params, Family, RadialParams, SpaceDescriptor};

const QUAD_TOL: Tolerance = Tolerance::new(0.0, 1e-13);

/// Below this radius the Δ kernels use the rescaled integral representation.
const SMALL_R: f64 = 1.0;

/// Above this `x` the `m_{ε/2} = 0` integral uses the closed antiderivative.
const CLOSED_FORM_FROM: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Integral { me: i32, mh: i32, m: i32 },
    Cp { n: i32 },
}

/// Radial profile of one member of the family on one space.
#[derive(Debug)]
pub struct RadialProfile {
    desc: SpaceDescriptor,
    params: RadialParams,
    shape: Shape,
    ln_integral_cache: RwLock<HashMap<u64, f64>>,
}

impl Clone for RadialProfile {
    fn clone(&self) -> Self {
        let cache = self.ln_integral_cache.read().map(|c| c.clone()).unwrap_or_default();
        RadialProfile {
            desc: self.desc.clone(),
            params: self.params,
            shape: self.shape,
            ln_integral_cache: RwLock::new(cache),
        }
    }
}

fn check_x(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("x must be positive, got {x}")))
    }
}

fn binomial(k: i32, j: i32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * f64::from(k - i) / f64::from(i + 1))
}

impl RadialProfile {
    pub fn new(desc: &SpaceDescriptor, params: RadialParams) -> Result<Self> {
        let params = validate_params(desc, params)?;
        let shape = if desc.family == Family::ComplexProj {
            Shape::Cp { n: desc.n as i32 }
        } else {
            Shape::Integral { me: desc.m_eps as i32, mh: desc.m_half as i32, m: desc.m_total as i32 }
        };
        Ok(RadialProfile { desc: desc.clone(), params, shape, ln_integral_cache: RwLock::new(HashMap::new()) })
    }

    /// Profile with the integral formula forced, for cross-checks on `ℂP¹`.
    pub fn with_multiplicities(desc: &SpaceDescriptor, params: RadialParams, m_eps: usize, m_half: usize) -> Result<Self> {
        let mut p = RadialProfile::new(desc, params)?;
        p.shape = Shape::Integral { me: m_eps as i32, mh: m_half as i32, m: (m_eps + m_half + 1) as i32 };
        Ok(p)
    }

    pub fn desc(&self) -> &SpaceDescriptor {
        &self.desc
    }

    pub fn params(&self) -> RadialParams {
        self.params
    }

    /// `ln I(x)` for the integral families.
    pub fn ln_integral(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        let Shape::Integral { me, mh, .. } = self.shape else {
            return Err(Error::Domain("the multiplicity integral is not used for cpn".into()));
        };
        if mh == 0 && x >= CLOSED_FORM_FROM {
            return Ok(ln_integral_closed(me, x));
        }
        if let Some(v) = self.ln_integral_cache.read().ok().and_then(|c| c.get(&x.to_bits()).copied()) {
            return Ok(v);
        }
        let v = ln_integral_quadrature(me, mh, x)?;
        if let Ok(mut c) = self.ln_integral_cache.write() {
            c.insert(x.to_bits(), v);
        }
        Ok(v)
    }

    fn ln_f_prime_integral(&self, x: f64, m: i32) -> Result<f64> {
        let RadialParams { c, c1, .. } = self.params;
        let ln_i = self.ln_integral(x)?;
        let ln_c1 = if c1 > 0.0 { c1.ln() } else { f64::NEG_INFINITY };
        Ok(log_add_exp(c.ln() + ln_i, ln_c1) / f64::from(m))
    }

    /// `ln(Cⁿ sinh^{2n}x + C₁)`.
    fn ln_g(&self, x: f64, n: i32) -> f64 {
        let RadialParams { c, c1, .. } = self.params;
        let nf = f64::from(n);
        let ln_c1 = if c1 > 0.0 { c1.ln() } else { f64::NEG_INFINITY };
        log_add_exp(nf * c.ln() + 2.0 * nf * ln_sinh(x), ln_c1)
    }

    pub fn f_prime(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        match self.shape {
            Shape::Integral { m, .. } => Ok(self.ln_f_prime_integral(x, m)?.exp()),
            Shape::Cp { n } => {
                let g = (self.ln_g(x, n) / f64::from(n)).exp();
                let t = self.params.c_z * x.tanh();
                Ok((g + t * t).sqrt())
            }
        }
    }

    pub fn f_double_prime(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        let c = self.params.c;
        match self.shape {
            Shape::Integral { me, mh, m } => {
                let mf = f64::from(m);
                let ln_fp = self.ln_f_prime_integral(x, m)?;
                let ln_g = f64::from(me) * ln_sinh(2.0 * x) + f64::from(mh) * ln_sinh(x);
                Ok((c.ln() + ln_g - mf.ln() - (mf - 1.0) * ln_fp).exp())
            }
            Shape::Cp { .. } => {
                let fp = self.f_prime(x)?;
                let sech = 1.0 / x.cosh();
                let cz = self.params.c_z;
                Ok((self.cp_main_term(x)? + cz * cz * x.tanh() * sech * sech) / fp)
            }
        }
    }

    /// For `ℂPⁿ`, `f'f'' = Cⁿ sinh^{2n−1}x cosh x · G^{(1−n)/n} + c_Z² tanh x sech²x`
    /// with `G = Cⁿ sinh^{2n}x + C₁`; returns the first term.
    pub fn cp_main_term(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        let Shape::Cp { n } = self.shape else {
            return Err(Error::Domain("cp_main_term is defined for cpn only".into()));
        };
        let nf = f64::from(n);
        let ln_main = nf * self.params.c.ln() + (2.0 * nf - 1.0) * ln_sinh(x) + ln_cosh(x)
            + (1.0 - nf) / nf * self.ln_g(x, n);
        Ok(ln_main.exp())
    }

    /// `(Cⁿ sinh^{2n}x + C₁)^{1/n}` for `ℂPⁿ`.
    pub fn cp_root_term(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        let Shape::Cp { n } = self.shape else {
            return Err(Error::Domain("cp_root_term is defined for cpn only".into()));
        };
        Ok((self.ln_g(x, n) / f64::from(n)).exp())
    }

    /// `lim_{x→0} f'(x)/x` when `C₁ = 0`: `(2^{m_ε}C/m)^{1/m}` or `√(C + c_Z²)`.
    pub fn slope_at_zero(&self) -> Result<f64> {
        let RadialParams { c, c1, c_z } = self.params;
        if c1 > 0.0 {
            return Err(Error::SingularExtension(format!(
                "f'(x)/x diverges as x -> 0 for C1 = {c1} > 0"
            )));
        }
        Ok(match self.shape {
            Shape::Integral { me, m, .. } => (2f64.powi(me) * c / f64::from(m)).powf(1.0 / f64::from(m)),
            Shape::Cp { .. } => (c + c_z * c_z).sqrt(),
        })
    }

    /// `f'(r)/r`, extended to `r = 0` when `C₁ = 0`.
    pub fn kernel_fp_over_r(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return self.slope_at_zero();
        }
        check_x(r)?;
        if self.params.c1 == 0.0 && r < SMALL_R {
            return Ok(self.small_r_kernels(r)?.0);
        }
        Ok(self.f_prime(r)? / r)
    }

    /// `(1/r)(f'(r)/r)' = (r f''(r) − f'(r))/r³`, extended to `r = 0` when
    /// `C₁ = 0`.
    pub fn kernel_fp_slope(&self, r: f64) -> Result<f64> {
        if r < 0.0 || !r.is_finite() {
            return Err(Error::Domain(format!("radius must be nonnegative, got {r}")));
        }
        if r == 0.0 && self.params.c1 > 0.0 {
            return Err(Error::SingularExtension(format!(
                "(r f'' - f')/r^3 diverges as r -> 0 for C1 = {} > 0",
                self.params.c1
            )));
        }
        if self.params.c1 == 0.0 && r < SMALL_R {
            return Ok(self.small_r_kernels(r)?.1);
        }
        Ok((r * self.f_double_prime(r)? - self.f_prime(r)?) / (r * r * r))
    }

    /// `(f'/r, (r f'' − f')/r³)` for `C₁ = 0` via even analytic
    /// representations, valid down to `r = 0`.
    fn small_r_kernels(&self, r: f64) -> Result<(f64, f64)> {
        let RadialParams { c, c_z, .. } = self.params;
        match self.shape {
            Shape::Cp { .. } => {
                let (s, t) = (sinhc(r), tanhc(r));
                let q = (c * s * s + c_z * c_z * t * t).sqrt();
                let dq = (c * s * sinhc_slope(r) + c_z * c_z * t * tanhc_slope(r)) / q;
                Ok((q, dq))
            }
            Shape::Integral { me, mh, m } => {
                // f'(r)/r = (C·J(r))^{1/m}, J(r) = ∫₀¹ (2u)^{m_ε} u^{m_{ε/2}} S(2ru)^{m_ε} S(ru)^{m_{ε/2}} du
                let (mef, mhf, mf) = (f64::from(me), f64::from(mh), f64::from(m));
                let weight = move |u: f64| (2.0 * u).powi(me) * u.powi(mh);
                let j = integrate(
                    |u| weight(u) * sinhc(2.0 * r * u).powi(me) * sinhc(r * u).powi(mh),
                    0.0,
                    1.0,
                    QUAD_TOL,
                )?
                .value;
                let dj_over_r = integrate(
                    |u| {
                        let (a, b) = (sinhc(2.0 * r * u), sinhc(r * u));
                        let mut v = 0.0;
                        if me > 0 {
                            v += mef * 4.0 * u * u * sinhc_slope(2.0 * r * u) * a.powi(me - 1) * b.powi(mh);
                        }
                        if mh > 0 {
                            v += mhf * u * u * sinhc_slope(r * u) * a.powi(me) * b.powi(mh - 1);
                        }
                        weight(u) * v
                    },
                    0.0,
                    1.0,
                    QUAD_TOL,
                )?
                .value;
                let k1 = (c * j).powf(1.0 / mf);
                let k2 = k1 / (mf * j) * dj_over_r;
                Ok((k1, k2))
            }
        }
    }

    /// Evaluate `f'` and `f''` on a grid, asserting positivity.
    pub fn positive_on(&self, grid: &[f64]) -> Result<()> {
        for &x in grid {
            let (a, b) = (self.f_prime(x)?, self.f_double_prime(x)?);
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::InternalInconsistency(format!(
                    "f'({x}) = {a}, f''({x}) = {b}: profile not positive"
                )));
            }
        }
        Ok(())
    }
}

fn ln_integral_quadrature(me: i32, mh: i32, x: f64) -> Result<f64> {
    let ln_g = |t: f64| f64::from(me) * ln_sinh(2.0 * t) + f64::from(mh) * ln_sinh(t);
    let top = ln_g(x);
    let r = integrate(|t| if t <= 0.0 { 0.0 } else { (ln_g(t) - top).exp() }, 0.0, x, QUAD_TOL)?;
    if !(r.value > 0.0) {
        return Err(Error::Numeric(format!("multiplicity integral vanished at x = {x}")));
    }
    Ok(top + r.value.ln())
}

/// `ln ∫₀ˣ sinh(2t)^k dt` from `sinh(2t)^k = 2^{−k} Σ_j (−1)^j C(k,j) e^{2(k−2j)t}`,
/// scaled by `e^{−2kx}`. Accurate once `x` is of order one.
fn ln_integral_closed(k: i32, x: f64) -> f64 {
    let kf = f64::from(k);
    let scale = -2.0 * kf * x;
    let mut sum = 0.0;
    for j in 0..=k {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let p = f64::from(k - 2 * j);
        let term = if k == 2 * j {
            x * scale.exp()
        } else {
            ((2.0 * p * x + scale).exp() - scale.exp()) / (2.0 * p)
        };
        sum += sign * binomial(k, j) * term;
    }
    2.0 * kf * x - kf * std::f64::consts::LN_2 + sum.ln()
}

/// Coefficients of `a(x) = α X + β Z + γ Y + c₁ Z₁` (`ℂPⁿ`), or `α X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ACoefficients {
    pub x: f64,
    pub z: f64,
    pub y: f64,
    pub z1: f64,
}

/// The vector-function `a(x) = f'X + c_Z φ Z + c_Y ψ Y + c₁ Z₁` with
/// `φ = 1/cosh`, `ψ = 1/sinh`. The family fixes `c₁ = −c_Z/2`, `c_Y = 0`;
/// other values are accepted for negative controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorFunctionA {
    pub c_z: f64,
    pub c1: f64,
    pub c_y: f64,
}

impl VectorFunctionA {
    pub fn canonical(params: RadialParams) -> Self {
        VectorFunctionA { c_z: params.c_z, c1: -0.5 * params.c_z, c_y: 0.0 }
    }

    pub fn coefficients(&self, profile: &RadialProfile, x: f64) -> Result<ACoefficients> {
        let fp = profile.f_prime(x)?;
        Ok(ACoefficients { x: fp, z: self.c_z / x.cosh(), y: self.c_y / x.sinh(), z1: self.c1 })
    }

    pub fn derivative_coefficients(&self, profile: &RadialProfile, x: f64) -> Result<ACoefficients> {
        let fpp = profile.f_double_prime(x)?;
        let (s, c) = (x.sinh(), x.cosh());
        Ok(ACoefficients { x: fpp, z: -self.c_z * s / (c * c), y: -self.c_y * c / (s * s), z1: 0.0 })
    }

    fn assemble(&self, model: &AlgebraModel, k: ACoefficients) -> Result<Element> {
        let mut out = model.x().scale(k.x);
        if k.z != 0.0 || k.y != 0.0 || k.z1 != 0.0 {
            let cp = model.cp().ok_or_else(|| {
                Error::Parameter(format!("a(x) has Y, Z, Z1 terms only on cpn, not {}", model.desc().label()))
            })?;
            out.axpy(k.z, &cp.z);
            out.axpy(k.y, &cp.y);
            out.axpy(k.z1, &cp.z1);
        }
        Ok(out)
    }

    pub fn eval(&self, model: &AlgebraModel, profile: &RadialProfile, x: f64) -> Result<Element> {
        self.assemble(model, self.coefficients(profile, x)?)
    }

    pub fn eval_prime(&self, model: &AlgebraModel, profile: &RadialProfile, x: f64) -> Result<Element> {
        self.assemble(model, self.derivative_coefficients(profile, x)?)
    }
}

pub fn f_prime(desc: &SpaceDescriptor, params: RadialParams, x: f64) -> Result<f64> {
    RadialProfile::new(desc, params)?.f_prime(x)
}

pub fn f_double_prime(desc: &SpaceDescriptor, params: RadialParams, x: f64) -> Result<f64> {
    RadialProfile::new(desc, params)?.f_double_prime(x)
}

/// `a(x)` with the family's coefficients.
pub fn vector_a(model: &AlgebraModel, params: RadialParams, x: f64) -> Result<Element> {
    let profile = RadialProfile::new(model.desc(), params)?;
    VectorFunctionA::canonical(params).eval(model, &profile, x)
}

/// `a'(x)` with the family's coefficients.
pub fn vector_a_prime(model: &AlgebraModel, params: RadialParams, x: f64) -> Result<Element> {
    let profile = RadialProfile::new(model.desc(), params)?;
    VectorFunctionA::canonical(params).eval_prime(model, &profile, x)
}
