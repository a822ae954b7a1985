use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{w_closed_form_with, HermitianBlock, Source, TOL_STRUCTURAL};
use crate::algebra::{AlgebraModel, CElement, Element, Root};
use crate::error::{Error, Result};
use crate::numerics::linalg::CMatrix;
use crate::profiles::{RadialProfile, VectorFunctionA};
use crate::registry::{Family, RadialParams};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Complexified tangent vector `(ξ, t·∂/∂x)` at `(e, x)`.
#[derive(Debug, Clone)]
pub struct ZField {
    pub label: String,
    pub xi: CElement,
    pub t: Complex64,
}

impl ZField {
    pub fn conj(&self) -> ZField {
        ZField { label: format!("conj {}", self.label), xi: self.xi.conj(), t: self.t.conj() }
    }
}

fn cinner(model: &AlgebraModel, a: &Element, v: &CElement) -> Complex64 {
    Complex64::new(model.inner(a, &v.re), model.inner(a, &v.im))
}

/// `ω̃((ξ₁,t₁),(ξ₂,t₂)) = t₁⟨a',ξ₂⟩ − t₂⟨a',ξ₁⟩ − ⟨a,[ξ₁,ξ₂]⟩`, extended
/// complex-bilinearly.
pub fn omega_tilde(model: &AlgebraModel, a: &Element, a_prime: &Element, u: &ZField, v: &ZField) -> Complex64 {
    u.t * cinner(model, a_prime, &v.xi) - v.t * cinner(model, a_prime, &u.xi)
        - cinner(model, a, &u.xi.bracket(&v.xi))
}

/// `Z^X = (X, −i)` followed by `Z^ξ = (R_xξ − iS_xξ, 0)` for the bases of
/// `𝔪_ε` and `𝔪_{ε/2}`.
pub fn z_fields(model: &AlgebraModel, x: f64) -> Result<Vec<ZField>> {
    let mut out = vec![ZField { label: "X".into(), xi: CElement::real(model.x().clone()), t: -I }];
    for root in Root::BOTH {
        let tag = match root {
            Root::Eps => "eps",
            Root::Half => "half",
        };
        for (j, xi) in model.basis_m(root).iter().enumerate() {
            let r = model.apply_r(x, xi)?;
            let s = model.apply_s(x, xi)?;
            out.push(ZField { label: format!("{tag}{}", j + 1), xi: CElement::new(r, -&s), t: Complex64::new(0.0, 0.0) });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct OracleOutput {
    pub block: HermitianBlock,
    /// Full matrix `i·ω̃(T_j, T̄_k)` in the order `X, 𝔪_ε, 𝔪_{ε/2}`.
    pub full: CMatrix,
    /// `max |ω̃(T_j, T_k)|`.
    pub holomorphic_residual: f64,
}

/// `w_{jk} = i·ω̃(T_j, T̄_k)` evaluated from brackets.
pub fn w_structural_oracle(model: &AlgebraModel, params: RadialParams, x: f64) -> Result<OracleOutput> {
    let profile = RadialProfile::new(model.desc(), params)?;
    let va = VectorFunctionA::canonical(profile.params());
    let a = va.eval(model, &profile, x)?;
    let ap = va.eval_prime(model, &profile, x)?;
    let fields = z_fields(model, x)?;
    let conj: Vec<ZField> = fields.iter().map(ZField::conj).collect();
    let p = fields.len();
    let mut full = CMatrix::zeros(p, p);
    let mut holo: f64 = 0.0;
    for j in 0..p {
        for k in 0..p {
            full[(j, k)] = I * omega_tilde(model, &a, &ap, &fields[j], &conj[k]);
            holo = holo.max(omega_tilde(model, &a, &ap, &fields[j], &fields[k]).norm());
        }
    }
    let split = if model.desc().family == Family::ComplexProj { 2 } else { 1 };
    let wh = full.view((0, 0), (split, split)).into_owned();
    let mut wstar = Vec::new();
    let step = if model.desc().family == Family::ComplexProj { 2 } else { 1 };
    let mut at = split;
    while at < p {
        wstar.push(full.view((at, at), (step, step)).into_owned());
        at += step;
    }
    Ok(OracleOutput {
        block: HermitianBlock { x, wh, wstar, source: Source::StructuralOracle, wh_det: None },
        full,
        holomorphic_residual: holo,
    })
}

/// Absolute residuals of the two commutation relations and the largest
/// norm among the individual terms. The `S`-terms grow like `1/x²`, so near
/// the zero section the absolute residual sits at rounding level times that.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutationResiduals {
    pub k: f64,
    pub m: f64,
    pub k_scale: f64,
    pub m_scale: f64,
}

impl CommutationResiduals {
    /// `max(k / (1 + k_scale), m / (1 + m_scale))`.
    pub fn relative(&self) -> f64 {
        (self.k / (1.0 + self.k_scale)).max(self.m / (1.0 + self.m_scale))
    }
}

/// Both commutation residuals with the family's coefficients.
pub fn check_commutation(model: &AlgebraModel, params: RadialParams, x: f64) -> Result<CommutationResiduals> {
    check_commutation_with(model, params, VectorFunctionA::canonical(params), x)
}

/// `max_ξ ‖(R ad_{aᵏ} R + S ad_{aᵏ} S + (R² + S²) ad_{z_𝔥})ξ‖` and
/// `max_ξ ‖(R ad_{aᵐ} S − S ad_{aᵐ} R)ξ‖` over the basis of `𝔪⁺`, where
/// `aᵏ = c_Z φ Z`, `z_𝔥 = c₁ Z₁`, `aᵐ = c_Y ψ Y`.
pub fn check_commutation_with(
    model: &AlgebraModel,
    params: RadialParams,
    va: VectorFunctionA,
    x: f64,
) -> Result<CommutationResiduals> {
    let profile = RadialProfile::new(model.desc(), params)?;
    let k = va.coefficients(&profile, x)?;
    let zero = Element::zeros(model.size());
    let (ak, zh, am) = match model.cp() {
        Some(cp) => (cp.z.scale(k.z), cp.z1.scale(k.z1), cp.y.scale(k.y)),
        None => {
            if k.z != 0.0 || k.z1 != 0.0 || k.y != 0.0 {
                return Err(Error::Parameter("Y, Z, Z1 components require a cpn model".into()));
            }
            (zero.clone(), zero.clone(), zero.clone())
        }
    };
    let r = |v: &Element| model.apply_r(x, v);
    let s = |v: &Element| model.apply_s(x, v);
    let mut out = CommutationResiduals { k: 0.0, m: 0.0, k_scale: 0.0, m_scale: 0.0 };
    for xi in model.basis_m_eps().iter().chain(model.basis_m_half()) {
        let rx = r(xi)?;
        let sx = s(xi)?;
        let zx = zh.bracket(xi);
        let k_terms = [r(&ak.bracket(&rx))?, s(&ak.bracket(&sx))?, r(&r(&zx)?)?, s(&s(&zx)?)?];
        let m_terms = [r(&am.bracket(&sx))?, s(&am.bracket(&rx))?];
        let line1 = &(&k_terms[0] + &k_terms[1]) + &(&k_terms[2] + &k_terms[3]);
        let line2 = &m_terms[0] - &m_terms[1];
        out.k = out.k.max(model.norm(&line1));
        out.m = out.m.max(model.norm(&line2));
        out.k_scale = k_terms.iter().map(|t| model.norm(t)).fold(out.k_scale, f64::max);
        out.m_scale = m_terms.iter().map(|t| model.norm(t)).fold(out.m_scale, f64::max);
    }
    Ok(out)
}

/// Jacobi form of `dω^a = 0`: `⟨a, [[u,v],w] + [[v,w],u] + [[w,u],v]⟩`.
pub fn closedness_residual(model: &AlgebraModel, a: &Element, u: &Element, v: &Element, w: &Element) -> f64 {
    let t = &(&u.bracket(v).bracket(w) + &v.bracket(w).bracket(u)) + &w.bracket(u).bracket(v);
    model.inner(a, &t).abs()
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    /// Dimension of the null space of `ω̃` on `𝔤 × ℝ`.
    pub nullity: usize,
    pub expected: usize,
    /// `max |ω̃((ζ,0), ·)|` over `ζ` in the basis of `𝔥`.
    pub h_residual: f64,
}

/// Null space of the real 2-form `ω̃` at `(e, x)` by singular values.
pub fn kernel_report(model: &AlgebraModel, params: RadialParams, x: f64) -> Result<KernelReport> {
    let profile = RadialProfile::new(model.desc(), params)?;
    let va = VectorFunctionA::canonical(profile.params());
    let a = va.eval(model, &profile, x)?;
    let ap = va.eval_prime(model, &profile, x)?;
    let basis = model.basis_g();
    let d = basis.len();
    let mut vecs: Vec<ZField> = basis
        .iter()
        .map(|b| ZField { label: String::new(), xi: CElement::real(b.clone()), t: Complex64::new(0.0, 0.0) })
        .collect();
    vecs.push(ZField { label: "d/dx".into(), xi: CElement::zeros(model.size()), t: Complex64::new(1.0, 0.0) });
    let mut m = DMatrix::<f64>::zeros(d + 1, d + 1);
    for i in 0..=d {
        for j in 0..=d {
            m[(i, j)] = omega_tilde(model, &a, &ap, &vecs[i], &vecs[j]).re;
        }
    }
    let sv = m.clone().singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let nullity = sv.iter().filter(|&&s| s <= 1e-9 * top).count();
    let mut h_res: f64 = 0.0;
    for (i, blk) in model.blocks().iter().enumerate() {
        if *blk == crate::algebra::Block::H {
            h_res = h_res.max(m.row(i).iter().fold(0.0, |acc, v| acc.max(v.abs())));
        }
    }
    Ok(KernelReport { nullity, expected: model.desc().h_dim, h_residual: h_res })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleComparison {
    /// `max |w_oracle − w_closed| / (1 + |w_closed|)` over entries and grid.
    pub max_rel_error: f64,
    /// `max |ω̃(T_j, T_k)| / (1 + max |w|)`.
    pub max_holomorphic_residual: f64,
    pub worst_x: f64,
}

impl OracleComparison {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_rel_error < tol && self.max_holomorphic_residual < TOL_STRUCTURAL
    }
}

/// Entrywise comparison of the structural oracle with the closed form.
pub fn compare_oracle(model: &AlgebraModel, params: RadialParams, grid: &[f64]) -> Result<OracleComparison> {
    let profile = RadialProfile::new(model.desc(), params)?;
    let mut out = OracleComparison { max_rel_error: 0.0, max_holomorphic_residual: 0.0, worst_x: f64::NAN };
    for &x in grid {
        let o = w_structural_oracle(model, params, x)?;
        let closed = w_closed_form_with(&profile, x)?.assembled();
        if closed.shape() != o.full.shape() {
            return Err(Error::InternalInconsistency(format!(
                "oracle shape {:?} differs from closed form {:?}",
                o.full.shape(),
                closed.shape()
            )));
        }
        let mut scale: f64 = 0.0;
        for (a, b) in o.full.iter().zip(closed.iter()) {
            let rel = (a - b).norm() / (1.0 + b.norm());
            if rel > out.max_rel_error || out.worst_x.is_nan() {
                out.max_rel_error = rel;
                out.worst_x = x;
            }
            scale = scale.max(b.norm());
        }
        out.max_holomorphic_residual = out.max_holomorphic_residual.max(o.holomorphic_residual / (1.0 + scale));
    }
    Ok(out)
}
