//! Matrix models of `so(n+1)`, `su(n+1)`, `sp(n+1)` graded by `ad_X²`.
//!
//! Every model carries the inner product `⟨A, B⟩ = −s·Re tr(AB)` with `s`
//! fixed by `⟨X, X⟩ = 1`, and the involution `σ(A) = SAS` whose `±1`
//! eigenspaces are `𝔨` and `𝔪`.

mod element;
mod model;
mod operators;
mod structure;

pub use element::{bracket, CElement, Element};
pub use model::{build_model, AlgebraModel, Block, CpElements, Root, SPECTRUM_TOL};
pub use operators::TangentVector;
pub use structure::{structure_report, StructureReport, TOL_BRACKET, TOL_T};

use crate::error::{Error, Result};

/// Checked inner product.
pub fn inner(model: &AlgebraModel, u: &Element, v: &Element) -> Result<f64> {
    if u.size() != model.size() || v.size() != model.size() {
        return Err(Error::Argument(format!(
            "elements of sizes {} and {} in a model of size {}",
            u.size(),
            v.size(),
            model.size()
        )));
    }
    Ok(model.inner(u, v))
}
