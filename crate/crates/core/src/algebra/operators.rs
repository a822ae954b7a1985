use super::element::Element;
use super::model::{AlgebraModel, Block, Root};
use crate::error::{Error, Result};

/// Tangent vector `(v, t·∂/∂x)` at `(o, x)`, with `v ∈ 𝔪 ⊕ 𝔨⁺`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub v: Element,
    pub t: f64,
}

fn check_x(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("x must be positive, got {x}")))
    }
}

impl AlgebraModel {
    /// Coordinates of `v` in [`basis_g`](Self::basis_g).
    pub fn coords(&self, v: &Element) -> Vec<f64> {
        self.basis_g().iter().map(|b| self.inner(v, b)).collect()
    }

    pub fn from_coords(&self, c: &[f64]) -> Element {
        let mut out = Element::zeros(self.size());
        for (ci, b) in c.iter().zip(self.basis_g()) {
            if *ci != 0.0 {
                out.axpy(*ci, b);
            }
        }
        out
    }

    /// Orthogonal projection onto the blocks selected by `keep`.
    pub fn project_blocks(&self, v: &Element, keep: impl Fn(Block) -> bool) -> Element {
        let mut out = Element::zeros(self.size());
        for (b, &blk) in self.basis_g().iter().zip(self.blocks()) {
            if keep(blk) {
                out.axpy(self.inner(v, b), b);
            }
        }
        out
    }

    /// Component of `v` in `𝔪_λ ⊕ 𝔨_λ`.
    pub fn root_component(&self, v: &Element, root: Root) -> Element {
        self.project_blocks(v, |b| b.root() == Some(root))
    }

    pub fn ad_x(&self, v: &Element) -> Element {
        self.x().bracket(v)
    }

    /// `T = ad_X / λ'(X)` on `𝔪_λ ⊕ 𝔨_λ`.
    pub fn operator_t(&self, v: &Element) -> Result<Element> {
        let rest = self.project_blocks(v, |b| b.root().is_none());
        let tol = 1e-9 * self.norm(v).max(1.0);
        if self.norm(&rest) > tol {
            return Err(Error::Domain(format!(
                "T is defined on m+ + k+ only; argument has a + h component of norm {:.3e}",
                self.norm(&rest)
            )));
        }
        let mut out = Element::zeros(self.size());
        for root in Root::BOTH {
            let part = self.root_component(v, root);
            out.axpy(1.0 / root.lambda_prime(), &self.ad_x(&part));
        }
        Ok(out)
    }

    /// `R_x = 1/cosh λ'_x` on `𝔪_λ ⊕ 𝔨_λ`, zero on `𝔞 ⊕ 𝔥`.
    pub fn apply_r(&self, x: f64, v: &Element) -> Result<Element> {
        check_x(x)?;
        let mut out = Element::zeros(self.size());
        for root in Root::BOTH {
            let lx = root.lambda_prime() * x;
            out.axpy(1.0 / lx.cosh(), &self.root_component(v, root));
        }
        Ok(out)
    }

    /// `S_x = T / sinh λ'_x` on `𝔪_λ ⊕ 𝔨_λ`, zero on `𝔞 ⊕ 𝔥`.
    pub fn apply_s(&self, x: f64, v: &Element) -> Result<Element> {
        check_x(x)?;
        let mut out = Element::zeros(self.size());
        for root in Root::BOTH {
            let lp = root.lambda_prime();
            let part = self.root_component(v, root);
            out.axpy(1.0 / (lp * (lp * x).sinh()), &self.ad_x(&part));
        }
        Ok(out)
    }

    /// The canonical complex structure at `(o, x)`.
    pub fn apply_jc(&self, x: f64, w: &TangentVector) -> Result<TangentVector> {
        check_x(x)?;
        let c = self.coords(&w.v);
        let mut h_norm2 = 0.0;
        let mut out = Element::zeros(self.size());
        let mut t = 0.0;
        let root_of = |blk: Block| blk.root().map(|r| r.lambda_prime() * x);
        let (mut mi, mut ki) = (0usize, 0usize);
        let m_list: Vec<usize> =
            (0..c.len()).filter(|&i| matches!(self.blocks()[i], Block::MEps | Block::MHalf)).collect();
        let k_list: Vec<usize> =
            (0..c.len()).filter(|&i| matches!(self.blocks()[i], Block::KEps | Block::KHalf)).collect();
        for (i, &blk) in self.blocks().iter().enumerate() {
            match blk {
                Block::A => t = c[i],
                Block::H => h_norm2 += c[i] * c[i],
                Block::MEps | Block::MHalf => {
                    let lx = root_of(blk).unwrap_or(x);
                    // J ξ = −coth(λ'_x) ζ
                    out.axpy(-c[i] / lx.tanh(), &self.basis_g()[k_list[mi]]);
                    mi += 1;
                }
                Block::KEps | Block::KHalf => {
                    let lx = root_of(blk).unwrap_or(x);
                    // J ζ = tanh(λ'_x) ξ
                    out.axpy(c[i] * lx.tanh(), &self.basis_g()[m_list[ki]]);
                    ki += 1;
                }
            }
        }
        if h_norm2.sqrt() > 1e-9 * self.norm(&w.v).max(1.0) {
            return Err(Error::Domain("J is defined on m + k+; argument has an h component".into()));
        }
        out.axpy(-w.t, self.x());
        Ok(TangentVector { v: out, t })
    }

    /// `I = ad_{Z₀}` on `𝔪` (`ℂPⁿ` only).
    pub fn complex_structure_i(&self, v: &Element) -> Result<Element> {
        let cp = self
            .cp()
            .ok_or_else(|| Error::Domain(format!("I is defined for cpn only, not {}", self.desc().label())))?;
        Ok(cp.z0.bracket(v))
    }
}
