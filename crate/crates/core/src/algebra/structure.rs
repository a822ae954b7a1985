//! Structural invariants of a model: root multiplicities, the pairing
//! `ξ ↔ ζ`, the operator `T`, and the distinguished `su(n+1)` brackets.

use serde::Serialize;

use super::element::Element;
use super::model::{AlgebraModel, Block, Root};
use crate::error::Result;

/// Tolerances for bracket identities and for `T`.
pub const TOL_BRACKET: f64 = 1e-10;
pub const TOL_T: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub multiplicities_match: bool,
    /// `(m_ε, m_{ε/2}, dim 𝔥)` found by the eigen-decomposition.
    pub multiplicities: (usize, usize, usize),
    /// `max ‖[X,ξ] + λ'ζ‖, ‖[X,ζ] − λ'ξ‖, ‖ad_X²ξ + λ'²ξ‖` over paired basis vectors.
    pub pairing_residual: f64,
    /// `max ‖σ(b) ∓ b‖` over the basis.
    pub sigma_residual: f64,
    /// Largest deviation of the basis Gram matrix from the identity.
    pub gram_residual: f64,
    /// `max |⟨Tu, Tv⟩ − ⟨u, v⟩|` over `𝔪⁺ ⊕ 𝔨⁺`.
    pub t_orthogonality_residual: f64,
    /// `max ‖T²v + v‖`.
    pub t_square_residual: f64,
    /// Brackets among `X, Y, Z, Z₀, Z₁` and the `I`-relations (`ℂPⁿ` only).
    pub cp_bracket_residual: Option<f64>,
}

impl StructureReport {
    pub fn passes(&self) -> bool {
        self.multiplicities_match
            && self.pairing_residual < TOL_BRACKET
            && self.sigma_residual < TOL_BRACKET
            && self.gram_residual < TOL_BRACKET
            && self.t_orthogonality_residual < TOL_T
            && self.t_square_residual < TOL_T
            && self.cp_bracket_residual.is_none_or(|r| r < TOL_BRACKET)
    }
}

fn dist(a: &Element, b: &Element) -> f64 {
    (a - b).max_abs()
}

/// Bracket relations of the explicit `su(n+1)` data:
/// `[X,Y] = −Z`, `[X,Z] = Y`, `[Z,Y] = X`, `IX = Y`, `Z₁ − 2Z₀ = 2Z`,
/// `[Z₀, Z] = 0`, `ad_{Z₁}` rotating each `𝔪_{ε/2}` pair, and for every
/// basis `ξ ∈ 𝔪`, `ζ ∈ 𝔨`:
/// `[Y,ξ] = −ad_X Iξ`, `[Y,ζ] = I ad_X ζ`, `[Z,ξ] = I ad_X²ξ + ad_X² Iξ`,
/// `[Z,ζ] = −2 ad_X I ad_X ζ`.
fn cp_brackets(m: &AlgebraModel) -> Result<Option<f64>> {
    let Some(cp) = m.cp() else { return Ok(None) };
    let x = m.x();
    let i_op = |v: &Element| m.complex_structure_i(v);
    let adx = |v: &Element| m.ad_x(v);
    let mut r: f64 = 0.0;
    r = r.max(dist(&x.bracket(&cp.y), &-&cp.z));
    r = r.max(dist(&x.bracket(&cp.z), &cp.y));
    r = r.max(dist(&cp.z.bracket(&cp.y), x));
    r = r.max(dist(&i_op(x)?, &cp.y));
    r = r.max(dist(&(&cp.z1 - &cp.z0.scale(2.0)), &cp.z.scale(2.0)));
    r = r.max(cp.z0.bracket(&cp.z).max_abs());
    for pair in m.basis_m_half().chunks(2) {
        r = r.max(dist(&cp.z1.bracket(&pair[0]), &pair[1]));
        r = r.max(dist(&cp.z1.bracket(&pair[1]), &-&pair[0]));
    }
    for (b, blk) in m.basis_g().iter().zip(m.blocks()) {
        if *blk == Block::H {
            continue;
        }
        if blk.in_m() {
            r = r.max(dist(&cp.y.bracket(b), &-&adx(&i_op(b)?)));
            let rhs = &i_op(&adx(&adx(b)))? + &adx(&adx(&i_op(b)?));
            r = r.max(dist(&cp.z.bracket(b), &rhs));
        } else {
            r = r.max(dist(&cp.y.bracket(b), &i_op(&adx(b))?));
            r = r.max(dist(&cp.z.bracket(b), &adx(&i_op(&adx(b))?).scale(-2.0)));
        }
    }
    Ok(Some(r))
}

pub fn structure_report(m: &AlgebraModel) -> Result<StructureReport> {
    let d = m.desc();
    let found = (m.basis_m_eps().len(), m.basis_m_half().len(), m.basis_h().len());
    let multiplicities_match = found == (d.m_eps, d.m_half, d.h_dim)
        && m.basis_k_eps().len() == d.m_eps
        && m.basis_k_half().len() == d.m_half;

    let mut pairing: f64 = 0.0;
    for root in Root::BOTH {
        let lp = root.lambda_prime();
        for (xi, zeta) in m.basis_m(root).iter().zip(m.basis_k(root)) {
            pairing = pairing.max(dist(&m.ad_x(xi), &zeta.scale(-lp)));
            pairing = pairing.max(dist(&m.ad_x(zeta), &xi.scale(lp)));
            pairing = pairing.max(dist(&m.ad_x(&m.ad_x(xi)), &xi.scale(-lp * lp)));
        }
    }

    let basis = m.basis_g();
    let mut sigma: f64 = 0.0;
    let mut gram: f64 = 0.0;
    for (i, (b, blk)) in basis.iter().zip(m.blocks()).enumerate() {
        let expected = if blk.in_m() { -b } else { b.clone() };
        sigma = sigma.max(dist(&m.sigma(b), &expected));
        for (j, c) in basis.iter().enumerate() {
            let delta = if i == j { 1.0 } else { 0.0 };
            gram = gram.max((m.inner(b, c) - delta).abs());
        }
    }

    let roots: Vec<&Element> =
        basis.iter().zip(m.blocks()).filter(|(_, blk)| blk.root().is_some()).map(|(b, _)| b).collect();
    let images = roots.iter().map(|b| m.operator_t(b)).collect::<Result<Vec<_>>>()?;
    let mut t_orth: f64 = 0.0;
    let mut t_sq: f64 = 0.0;
    for (i, (u, tu)) in roots.iter().zip(&images).enumerate() {
        for (v, tv) in roots.iter().zip(&images).skip(i) {
            t_orth = t_orth.max((m.inner(tu, tv) - m.inner(u, v)).abs());
        }
        t_sq = t_sq.max(dist(&m.operator_t(tu)?, &-*u));
    }

    Ok(StructureReport {
        multiplicities_match,
        multiplicities: found,
        pairing_residual: pairing,
        sigma_residual: sigma,
        gram_residual: gram,
        t_orthogonality_residual: t_orth,
        t_square_residual: t_sq,
        cp_bracket_residual: cp_brackets(m)?,
    })
}
