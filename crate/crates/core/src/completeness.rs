//! Unit radial geodesic field, level-set distance and the Bernoulli
//! reduction of the Ricci-flat equation on `ℂPⁿ`.

use std::cell::RefCell;

use serde::Serialize;

use crate::algebra::{AlgebraModel, Block, Element, TangentVector};
use crate::error::{Error, Result};
use crate::numerics::ode::{self, OdeOptions};
use crate::numerics::quadrature::{integrate, Tolerance};
use crate::profiles::RadialProfile;
use crate::registry::{Family, RadialParams, SpaceDescriptor};

const H_TOL: Tolerance = Tolerance::new(1e-10, 1e-13);

/// Far end of the divergence test and the bound `h(1, x)` must exceed there.
pub const DIVERGENCE_X: f64 = 30.0;
pub const DIVERGENCE_BOUND: f64 = 50.0;

fn phi(x: f64) -> f64 {
    1.0 / x.cosh()
}

fn phi_prime(x: f64) -> f64 {
    -x.tanh() / x.cosh()
}

/// `f'f'' + c_Z² φ φ'`. For `ℂPⁿ` the `c_Z²` parts cancel identically and
/// only `Cⁿ sinh^{2n−1} cosh · G^{(1−n)/n}` is left.
fn radicand(profile: &RadialProfile, x: f64) -> Result<f64> {
    if profile.desc().family == Family::ComplexProj {
        profile.cp_main_term(x)
    } else {
        Ok(profile.f_prime(x)? * profile.f_double_prime(x)?)
    }
}

/// Reciprocal speed `f_U = (f' / (f'f'' + c_Z² φφ'))^{1/2}` of the unit
/// radial geodesic field.
pub fn f_u_with(profile: &RadialProfile, x: f64) -> Result<f64> {
    let den = radicand(profile, x)?;
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::InternalInconsistency(format!(
            "f'f'' + cZ^2 phi phi' = {den:e} is not positive at x = {x}"
        )));
    }
    Ok((profile.f_prime(x)? / den).sqrt())
}

pub fn f_u(desc: &SpaceDescriptor, params: RadialParams, x: f64) -> Result<f64> {
    f_u_with(&RadialProfile::new(desc, params)?, x)
}

/// `h(c) − h(b) = ∫_b^c ds / f_U(s)`, the distance between the level sets.
pub fn h_distance_with(profile: &RadialProfile, b: f64, c: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::Domain(format!("h_distance needs b > 0, got {b}")));
    }
    if b > c {
        return Err(Error::Argument(format!("h_distance needs b <= c, got b = {b}, c = {c}")));
    }
    let failure = RefCell::new(None);
    let r = integrate(
        |s| match f_u_with(profile, s) {
            Ok(v) => 1.0 / v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        b,
        c,
        H_TOL,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(r?.value)
}

pub fn h_distance(desc: &SpaceDescriptor, params: RadialParams, b: f64, c: f64) -> Result<f64> {
    h_distance_with(&RadialProfile::new(desc, params)?, b, c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub params: RadialParams,
    pub grid: Vec<f64>,
    pub f_u: Vec<f64>,
    /// `h(x) = ∫_{grid[0]}^x ds / f_U`.
    pub h: Vec<f64>,
    pub h_1_30: f64,
    /// Least-squares slope of `ln h(1, x)` against `ln f'(x)` on `[10, 30]`.
    pub growth_exponent: f64,
    pub divergent: bool,
}

impl CompletenessReport {
    pub fn invariants_hold(&self) -> bool {
        self.f_u.iter().all(|&v| v > 0.0) && self.h.windows(2).all(|w| w[1] > w[0])
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Slope of `ln h(1, x)` vs `ln f'(x)` over `x = 10, 11, …, 30`. Since
/// `1/f_U ~ f'^{1/2}` once `f'` grows exponentially, this tends to 1/2;
/// on `ℂPⁿ` it is the `(√C sinh x)^{1/2}` scaling.
pub fn growth_exponent(profile: &RadialProfile) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut h = h_distance_with(profile, 1.0, 10.0)?;
    let mut prev = 10.0;
    for k in 10..=30 {
        let x = f64::from(k);
        if x > prev {
            h += h_distance_with(profile, prev, x)?;
            prev = x;
        }
        xs.push(profile.f_prime(x)?.ln());
        ys.push(h.ln());
    }
    Ok(least_squares_slope(&xs, &ys))
}

/// `f_U` and `h` on `grid`, plus the divergence verdict
/// `h(1, 30) > 50` with a positive growth exponent.
pub fn analyze_completeness(desc: &SpaceDescriptor, params: RadialParams, grid: &[f64]) -> Result<CompletenessReport> {
    if grid.is_empty() {
        return Err(Error::Argument("empty grid".into()));
    }
    let profile = RadialProfile::new(desc, params)?;
    let f_u = grid.iter().map(|&x| f_u_with(&profile, x)).collect::<Result<Vec<_>>>()?;
    let mut h = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    h.push(0.0);
    for w in grid.windows(2) {
        acc += h_distance_with(&profile, w[0], w[1])?;
        h.push(acc);
    }
    let h_1_30 = h_distance_with(&profile, 1.0, DIVERGENCE_X)?;
    let growth = growth_exponent(&profile)?;
    Ok(CompletenessReport {
        params: profile.params(),
        grid: grid.to_vec(),
        f_u,
        h,
        h_1_30,
        growth_exponent: growth,
        divergent: h_1_30 > DIVERGENCE_BOUND && growth > 0.0,
    })
}

/// Residuals of the unit radial field `U = f_U·(b Y, ∂x)`, `b = −c_Z φ'/f'`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicFieldReport {
    pub x: f64,
    pub f_u: f64,
    /// `|ω(JU, U) − 1|`.
    pub unit_residual: f64,
    /// `max_ξ |g(U, (ξ, 0))|` over a basis of `𝔪 ⊕ 𝔨⁺`.
    pub orthogonality_residual: Option<f64>,
    /// `|ω((Z, 0), Ỹ)|` for the untilted `Ỹ = (0, ∂x)`; `Z` lies in `J` of
    /// the orbit directions, so this is the orthogonality defect at `b = 0`.
    pub untilted_defect: Option<f64>,
    /// `|a f'' + c_Z c φ' − 1|`.
    pub hamiltonian_relation_residual: Option<f64>,
    /// `max |ω((ξ, t), H) − t|` over a basis.
    pub hamiltonian_residual: Option<f64>,
    /// `|ω(JH, H) − f_U²|`.
    pub hamiltonian_norm_residual: Option<f64>,
}

impl GeodesicFieldReport {
    pub fn max_residual(&self) -> f64 {
        [
            Some(self.unit_residual),
            self.orthogonality_residual,
            self.hamiltonian_relation_residual,
            self.hamiltonian_residual,
            self.hamiltonian_norm_residual,
        ]
        .into_iter()
        .flatten()
        .fold(0.0, f64::max)
    }
}

/// The Kähler form at `(o, x)` on `ℂPⁿ`, built from the Lie bracket:
/// `−⟨f'X + c_Z(φ−1)Z − c_Z Z₀, [ξ₁, ξ₂]⟩ + f''(t₁⟨X,ξ₂⟩ − t₂⟨X,ξ₁⟩)
///  + c_Z φ'(t₁⟨Z,ξ₂⟩ − t₂⟨Z,ξ₁⟩)`.
struct KahlerForm<'a> {
    model: &'a AlgebraModel,
    base: Element,
    z: Element,
    fpp: f64,
    cz_phi_prime: f64,
}

impl KahlerForm<'_> {
    fn eval(&self, u: &TangentVector, v: &TangentVector) -> f64 {
        let m = self.model;
        let x = m.x();
        -m.inner(&self.base, &u.v.bracket(&v.v))
            + self.fpp * (u.t * m.inner(x, &v.v) - v.t * m.inner(x, &u.v))
            + self.cz_phi_prime * (u.t * m.inner(&self.z, &v.v) - v.t * m.inner(&self.z, &u.v))
    }

    /// `g(u, v) = ω(Ju, v)`.
    fn metric(&self, x: f64, u: &TangentVector, v: &TangentVector) -> Result<f64> {
        Ok(self.eval(&self.model.apply_jc(x, u)?, v))
    }
}

/// Checks the unit radial geodesic field and the Hamiltonian field of the
/// coordinate `x` on a `ℂPⁿ` model. With `c_Z = 0` only `‖U‖ = 1` is checked.
pub fn verify_geodesic_field(model: &AlgebraModel, params: RadialParams, x: f64) -> Result<GeodesicFieldReport> {
    let cp = model
        .cp()
        .ok_or_else(|| Error::Domain("geodesic field check needs a cpn model".into()))?;
    let profile = RadialProfile::new(model.desc(), params)?;
    let p = profile.params();
    let cz = p.c_z;
    let fp = profile.f_prime(x)?;
    let fpp = profile.f_double_prime(x)?;
    let fu = f_u_with(&profile, x)?;
    let (ph, php) = (phi(x), phi_prime(x));

    let mut base = model.x().scale(fp);
    base.axpy(cz * (ph - 1.0), &cp.z);
    base.axpy(-cz, &cp.z0);
    let omega = KahlerForm { model, base, z: cp.z.clone(), fpp, cz_phi_prime: cz * php };
    let zero = Element::zeros(model.size());

    let b = if cz == 0.0 { 0.0 } else { -cz * php / fp };
    let u = TangentVector { v: cp.y.scale(fu * b), t: fu };
    let unit_residual = (omega.metric(x, &u, &u)? - 1.0).abs();

    if cz == 0.0 {
        return Ok(GeodesicFieldReport {
            x,
            f_u: fu,
            unit_residual,
            orthogonality_residual: None,
            untilted_defect: None,
            hamiltonian_relation_residual: None,
            hamiltonian_residual: None,
            hamiltonian_norm_residual: None,
        });
    }

    let orbit: Vec<&Element> = model
        .basis_g()
        .iter()
        .zip(model.blocks())
        .filter(|(_, &blk)| blk != Block::H)
        .map(|(e, _)| e)
        .collect();
    let mut orth: f64 = 0.0;
    for xi in &orbit {
        let v = TangentVector { v: (*xi).clone(), t: 0.0 };
        orth = orth.max(omega.metric(x, &u, &v)?.abs());
    }
    let untilted = TangentVector { v: zero.clone(), t: 1.0 };
    let z_dir = TangentVector { v: cp.z.clone(), t: 0.0 };
    let untilted_defect = omega.eval(&z_dir, &untilted).abs();

    let c = cz * ph / (fpp * fp + cz * cz * php * ph);
    let a = c * fp / (cz * ph);
    let relation = (a * fpp + cz * c * php - 1.0).abs();
    let mut hv = model.x().scale(a);
    hv.axpy(c, &cp.z);
    let ham = TangentVector { v: hv, t: 0.0 };
    let mut ham_res: f64 = 0.0;
    for xi in &orbit {
        let v = TangentVector { v: (*xi).clone(), t: 0.0 };
        ham_res = ham_res.max(omega.eval(&v, &ham).abs());
    }
    let dx = TangentVector { v: zero, t: 1.0 };
    ham_res = ham_res.max((omega.eval(&dx, &ham) - 1.0).abs());
    let norm_res = (omega.metric(x, &ham, &ham)? - fu * fu).abs();

    Ok(GeodesicFieldReport {
        x,
        f_u: fu,
        unit_residual,
        orthogonality_residual: Some(orth),
        untilted_defect: Some(untilted_defect),
        hamiltonian_relation_residual: Some(relation),
        hamiltonian_residual: Some(ham_res),
        hamiltonian_norm_residual: Some(norm_res),
    })
}

/// `g₂(x) = cosh²x · (Cⁿ sinh^{2n}x + C₁)^{1/n}`.
pub fn bernoulli_closed_form(params: RadialParams, n: u32, x: f64) -> f64 {
    let nf = f64::from(n);
    let g = params.c.powf(nf) * x.sinh().powf(2.0 * nf) + params.c1;
    x.cosh().powi(2) * g.powf(1.0 / nf)
}

/// Right-hand side `2 tanh x · g₂ + 2Cⁿ cosh³x sinh x (cosh²x sinh²x / g₂)^{n−1}`.
pub fn bernoulli_rhs(params: RadialParams, n: u32, x: f64, g2: f64) -> f64 {
    let (s, c) = (x.sinh(), x.cosh());
    let ratio = c * c * s * s / g2;
    2.0 * x.tanh() * g2 + 2.0 * params.c.powi(n as i32) * c.powi(3) * s * ratio.powi(n as i32 - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BernoulliReport {
    pub n: u32,
    pub x0: f64,
    pub x1: f64,
    /// Largest relative deviation at the checkpoints.
    pub max_rel_deviation: f64,
    pub numeric_end: f64,
    pub closed_end: f64,
    pub steps: usize,
}

const BERNOULLI_CHECKPOINTS: usize = 10;

/// Integrates the Bernoulli equation from the closed-form value at `x0`
/// and compares with the closed form at ten evenly spaced checkpoints up to `x1`.
pub fn bernoulli_ode_check(params: RadialParams, n: u32, x0: f64, x1: f64) -> Result<BernoulliReport> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if !(x0 > 0.0 && x1 > x0) {
        return Err(Error::Argument(format!("need 0 < x0 < x1, got x0 = {x0}, x1 = {x1}")));
    }
    let opts = OdeOptions { rel_tol: 1e-9, abs_tol: 1e-12, ..OdeOptions::default() };
    let mut y = bernoulli_closed_form(params, n, x0);
    let mut at = x0;
    let mut worst: f64 = 0.0;
    let mut steps = 0;
    let mut closed = y;
    for k in 1..=BERNOULLI_CHECKPOINTS {
        let next = x0 + (x1 - x0) * k as f64 / BERNOULLI_CHECKPOINTS as f64;
        let sol = ode::integrate(|x, g| bernoulli_rhs(params, n, x, g), at, y, next, opts)?;
        y = sol.y;
        steps += sol.accepted;
        at = next;
        closed = bernoulli_closed_form(params, n, next);
        worst = worst.max(((y - closed) / closed).abs());
    }
    Ok(BernoulliReport { n, x0, x1, max_rel_deviation: worst, numeric_end: y, closed_end: closed, steps })
}
