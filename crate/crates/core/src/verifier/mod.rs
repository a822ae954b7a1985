//! Kähler and Ricci-flatness checks for the radial family.
//!
//! The Hermitian matrices `w_H(x)`, `w_*(x)` are produced twice: from their
//! closed forms and from Lie brackets through the vector fields `Z^X`,
//! `Z^ξ` (the structural oracle). Everything else (positivity, determinant
//! constancy, extension over the zero section, ℤ₂-invariance) is evaluated
//! on top of those.

mod delta;
mod oracle;

pub use delta::{check_extension, check_z2_invariance, delta_form_eval, DeltaArgs, ExtensionReport, Z2Report};
pub use oracle::{
    check_commutation, check_commutation_with, closedness_residual, CommutationResiduals, compare_oracle, kernel_report, omega_tilde,
    w_structural_oracle, KernelReport, OracleComparison, OracleOutput, ZField,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::linalg::{hermitian_defect, hermitian_det, min_eigenvalue, CMatrix};
use crate::profiles::RadialProfile;
use crate::registry::{Family, RadialParams, SpaceDescriptor};

pub const TOL_STRUCTURAL: f64 = 1e-10;
pub const TOL_ORACLE: f64 = 1e-9;
pub const TOL_DET: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Source {
    ClosedForm,
    StructuralOracle,
}

/// `w_H(x)` and the diagonal blocks of `w_*(x)` at one point.
#[derive(Debug, Clone)]
pub struct HermitianBlock {
    pub x: f64,
    pub wh: CMatrix,
    pub wstar: Vec<CMatrix>,
    pub source: Source,
    /// `det w_H` from the expanded closed form. For `ℂPⁿ` with `C₁ > 0`,
    /// `w_H` is nearly singular at small `x` and the determinant of the
    /// rounded entries loses most of its digits.
    pub wh_det: Option<f64>,
}

impl HermitianBlock {
    /// `w_H ⊕ w_*` as one block-diagonal matrix.
    pub fn assembled(&self) -> CMatrix {
        let total = self.wh.nrows() + self.wstar.iter().map(|b| b.nrows()).sum::<usize>();
        let mut m = CMatrix::zeros(total, total);
        let mut at = 0;
        for b in std::iter::once(&self.wh).chain(&self.wstar) {
            m.view_mut((at, at), (b.nrows(), b.ncols())).copy_from(b);
            at += b.nrows();
        }
        m
    }

    pub fn wh_determinant(&self) -> f64 {
        self.wh_det.unwrap_or_else(|| hermitian_det(&self.wh))
    }

    pub fn det_product(&self) -> f64 {
        self.wstar.iter().fold(self.wh_determinant(), |acc, b| acc * hermitian_det(b))
    }

    pub fn hermitian_defect(&self) -> f64 {
        std::iter::once(&self.wh).chain(&self.wstar).map(hermitian_defect).fold(0.0, f64::max)
    }
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `w_H`, `w_*` from the closed-form entries.
pub fn w_closed_form(desc: &SpaceDescriptor, params: RadialParams, x: f64) -> Result<HermitianBlock> {
    let profile = RadialProfile::new(desc, params)?;
    w_closed_form_with(&profile, x)
}

pub fn w_closed_form_with(profile: &RadialProfile, x: f64) -> Result<HermitianBlock> {
    let desc = profile.desc();
    let fp = profile.f_prime(x)?;
    let fpp = profile.f_double_prime(x)?;
    let mut block = w_from_derivatives(desc, profile.params().c_z, x, fp, fpp)?;
    if desc.family == Family::ComplexProj {
        // 4(f''f'/(cosh sinh) − c_Z²/cosh⁴); the c_Z² parts cancel identically.
        block.wh_det = Some(4.0 * profile.cp_main_term(x)? / (x.cosh() * x.sinh()));
    }
    Ok(block)
}

/// Closed-form entries for arbitrary values of `f'`, `f''` (used for
/// negative controls with non-solutions).
pub fn w_from_derivatives(desc: &SpaceDescriptor, c_z: f64, x: f64, fp: f64, fpp: f64) -> Result<HermitianBlock> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    let (s, c) = (x.sinh(), x.cosh());
    let (sh, ch) = ((0.5 * x).sinh(), (0.5 * x).cosh());
    let eps_entry = 2.0 * fp / (c * s);
    let half_entry = fp / (ch * sh);
    if desc.family == Family::ComplexProj {
        let off = Complex64::new(0.0, 2.0 * c_z / (c * c));
        let wh = CMatrix::from_row_slice(2, 2, &[real(2.0 * fpp), off, off.conj(), real(eps_entry)]);
        // i c_Z (1 − 1/cosh x) / sinh²(x/2) = 2 i c_Z / cosh x
        let boff = Complex64::new(0.0, 2.0 * c_z / c);
        let block = CMatrix::from_row_slice(2, 2, &[real(half_entry), boff, boff.conj(), real(half_entry)]);
        let wstar = vec![block; desc.n as usize - 1];
        Ok(HermitianBlock { x, wh, wstar, source: Source::ClosedForm, wh_det: None })
    } else {
        let wh = CMatrix::from_element(1, 1, real(2.0 * fpp));
        let mut wstar = vec![CMatrix::from_element(1, 1, real(eps_entry)); desc.m_eps];
        wstar.extend(std::iter::repeat_n(CMatrix::from_element(1, 1, real(half_entry)), desc.m_half));
        Ok(HermitianBlock { x, wh, wstar, source: Source::ClosedForm, wh_det: None })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Positivity {
    pub positive: bool,
    pub wh_min_eig: f64,
    /// `+∞` when `w_*` is empty.
    pub wstar_min_eig: f64,
    /// The 2×2 principal determinants agree in sign with the eigenvalue verdict.
    pub determinant_test_agrees: bool,
}

/// Smallest eigenvalue of a 2×2 Hermitian matrix with known determinant,
/// as `det / λ_max`.
fn min_eig_2x2(m: &CMatrix, det: f64) -> f64 {
    let (a, d) = (m[(0, 0)].re, m[(1, 1)].re);
    let b = m[(0, 1)].norm();
    let top = 0.5 * (a + d + ((a - d).powi(2) + 4.0 * b * b).sqrt());
    if top > 0.0 {
        det / top
    } else {
        min_eigenvalue(m)
    }
}

/// Minimum eigenvalues of `w_H` and of every `w_*` block.
pub fn check_positivity(block: &HermitianBlock) -> Positivity {
    let wh_min = match block.wh_det {
        Some(det) if block.wh.nrows() == 2 => min_eig_2x2(&block.wh, det),
        _ => min_eigenvalue(&block.wh),
    };
    let ws_min = block.wstar.iter().map(min_eigenvalue).fold(f64::INFINITY, f64::min);
    let positive = wh_min > 0.0 && ws_min > 0.0;
    // Leading principal minors of each block.
    let minors = |b: &CMatrix, last: Option<f64>| {
        (1..=b.nrows()).all(|k| {
            let det = match last {
                Some(d) if k == b.nrows() => d,
                _ => hermitian_det(&b.view((0, 0), (k, k)).into_owned()),
            };
            det > 0.0
        })
    };
    let minors_ok = minors(&block.wh, block.wh_det) && block.wstar.iter().all(|b| minors(b, None));
    Positivity { positive, wh_min_eig: wh_min, wstar_min_eig: ws_min, determinant_test_agrees: minors_ok == positive }
}

/// The four scalar inequalities (a)–(d) for `ℂPⁿ`: `f'' > 0`,
/// `f''f'/(cosh sinh) − c_Z²/cosh⁴ > 0`, `f' > 0`, and the `w_*` block
/// determinant `> 0`. Returns their left-hand sides.
pub fn cp_inequalities(profile: &RadialProfile, x: f64) -> Result<[f64; 4]> {
    let fp = profile.f_prime(x)?;
    let fpp = profile.f_double_prime(x)?;
    let (s, c) = (x.sinh(), x.cosh());
    // The c_Z² contributions cancel identically in (b) and (d):
    // tanh·sech²/(cosh·sinh) = sech⁴ and 4tanh²/sinh² = 4/cosh².
    let b = profile.cp_main_term(x)? / (c * s);
    let d = 4.0 * profile.cp_root_term(x)? / (s * s);
    Ok([fpp, b, fp, d])
}

/// Product of the two factors grouped as in the scalar Ricci-flat equation
/// for `ℂPⁿ`; equals `2^{2n−2}Cⁿ` on solutions.
pub fn cp_grouped_product(profile: &RadialProfile, x: f64) -> Result<f64> {
    let n = profile.desc().n as i32;
    let [_, b, _, d] = cp_inequalities(profile, x)?;
    Ok(b * d.powi(n - 1))
}

#[derive(Debug, Clone, Serialize)]
pub struct DetConstancy {
    pub constant: f64,
    pub max_rel_deviation: f64,
    pub values: Vec<f64>,
}

impl DetConstancy {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("empty grid".into()));
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let dev = values.iter().map(|v| ((v - mean) / mean).abs()).fold(0.0, f64::max);
        if !dev.is_finite() {
            return Err(Error::Numeric("non-finite determinant product".into()));
        }
        Ok(DetConstancy { constant: mean, max_rel_deviation: dev, values })
    }

    pub fn passes(&self) -> bool {
        self.max_rel_deviation < TOL_DET
    }
}

/// `det w_H · det w_*` across `grid`.
pub fn check_det_constancy(desc: &SpaceDescriptor, params: RadialParams, grid: &[f64]) -> Result<DetConstancy> {
    let profile = RadialProfile::new(desc, params)?;
    let values = grid
        .iter()
        .map(|&x| Ok(w_closed_form_with(&profile, x)?.det_product()))
        .collect::<Result<Vec<_>>>()?;
    DetConstancy::from_values(values)
}

/// Same determinant product with user-supplied `f'`, `f''` in place of the
/// family's profile.
pub fn det_product_for(
    desc: &SpaceDescriptor,
    c_z: f64,
    grid: &[f64],
    fp: impl Fn(f64) -> f64,
    fpp: impl Fn(f64) -> f64,
) -> Result<DetConstancy> {
    let values = grid
        .iter()
        .map(|&x| Ok(w_from_derivatives(desc, c_z, x, fp(x), fpp(x))?.det_product()))
        .collect::<Result<Vec<_>>>()?;
    DetConstancy::from_values(values)
}

/// `det w_H · det w_*` predicted from the multiplicities:
/// `2^{2m_ε+m_{ε/2}+1}C/m` for the integral families, `2^{2n}Cⁿ` for `ℂPⁿ`.
pub fn expected_det_constant(desc: &SpaceDescriptor, params: RadialParams) -> f64 {
    if desc.family == Family::ComplexProj {
        let n = desc.n as i32;
        4f64.powi(n) * params.c.powi(n)
    } else {
        2f64.powi((2 * desc.m_eps + desc.m_half + 1) as i32) * params.c / desc.m_total as f64
    }
}
