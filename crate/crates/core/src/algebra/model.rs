use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use super::element::Element;
use crate::error::{Error, Result};
use crate::registry::{Family, SpaceDescriptor};

/// Tolerance for matching eigenvalues of `−ad_X²` against `{0, 1, 1/4}`.
pub const SPECTRUM_TOL: f64 = 1e-8;

const ABS_FLOOR: f64 = 1e-8;

const LEVELS: [f64; 3] = [0.0, 1.0, 0.25];

/// The graded pieces of `𝔤 = 𝔞 ⊕ 𝔪_ε ⊕ 𝔪_{ε/2} ⊕ 𝔥 ⊕ 𝔨_ε ⊕ 𝔨_{ε/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    A,
    MEps,
    MHalf,
    H,
    KEps,
    KHalf,
}

impl Block {
    pub fn root(self) -> Option<Root> {
        match self {
            Block::MEps | Block::KEps => Some(Root::Eps),
            Block::MHalf | Block::KHalf => Some(Root::Half),
            Block::A | Block::H => None,
        }
    }

    pub fn in_m(self) -> bool {
        matches!(self, Block::A | Block::MEps | Block::MHalf)
    }
}

/// Positive restricted roots `ε` and `ε/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Root {
    Eps,
    Half,
}

impl Root {
    pub const BOTH: [Root; 2] = [Root::Eps, Root::Half];

    /// `λ'(X)`.
    pub fn lambda_prime(self) -> f64 {
        match self {
            Root::Eps => 1.0,
            Root::Half => 0.5,
        }
    }
}

/// Distinguished elements of `su(n+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CpElements {
    pub y: Element,
    pub z: Element,
    pub z0: Element,
    pub z1: Element,
}

/// Matrix realization of `𝔤` with its symmetric-pair grading.
#[derive(Debug, Clone)]
pub struct AlgebraModel {
    desc: SpaceDescriptor,
    size: usize,
    scale: f64,
    sigma_signs: Vec<f64>,
    x: Element,
    m_eps: Vec<Element>,
    m_half: Vec<Element>,
    k_eps: Vec<Element>,
    k_half: Vec<Element>,
    h: Vec<Element>,
    basis: Vec<Element>,
    blocks: Vec<Block>,
    cp: Option<CpElements>,
}

impl AlgebraModel {
    pub fn desc(&self) -> &SpaceDescriptor {
        &self.desc
    }

    /// Matrix size of the realization.
    pub fn size(&self) -> usize {
        self.size
    }

    /// `s` in `⟨A, B⟩ = −s·Re tr(AB)`.
    pub fn inner_scale(&self) -> f64 {
        self.scale
    }

    pub fn x(&self) -> &Element {
        &self.x
    }

    pub fn basis_m_eps(&self) -> &[Element] {
        &self.m_eps
    }

    pub fn basis_m_half(&self) -> &[Element] {
        &self.m_half
    }

    pub fn basis_k_eps(&self) -> &[Element] {
        &self.k_eps
    }

    pub fn basis_k_half(&self) -> &[Element] {
        &self.k_half
    }

    pub fn basis_h(&self) -> &[Element] {
        &self.h
    }

    pub fn basis_m(&self, root: Root) -> &[Element] {
        match root {
            Root::Eps => &self.m_eps,
            Root::Half => &self.m_half,
        }
    }

    pub fn basis_k(&self, root: Root) -> &[Element] {
        match root {
            Root::Eps => &self.k_eps,
            Root::Half => &self.k_half,
        }
    }

    /// Orthonormal basis of `𝔤` ordered `𝔞, 𝔪_ε, 𝔪_{ε/2}, 𝔥, 𝔨_ε, 𝔨_{ε/2}`.
    pub fn basis_g(&self) -> &[Element] {
        &self.basis
    }

    /// Block label of each element of [`basis_g`](Self::basis_g).
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// `Y, Z, Z₀, Z₁`; present only for `ℂPⁿ`.
    pub fn cp(&self) -> Option<&CpElements> {
        self.cp.as_ref()
    }

    /// The involution `σ(A) = S A S`.
    pub fn sigma(&self, v: &Element) -> Element {
        let mut m = v.matrix().clone();
        for i in 0..self.size {
            for j in 0..self.size {
                m[(i, j)] *= self.sigma_signs[i] * self.sigma_signs[j];
            }
        }
        Element::from_matrix_unchecked(m)
    }

    pub fn inner(&self, u: &Element, v: &Element) -> f64 {
        -self.scale * u.trace_product(v).re
    }

    pub fn norm(&self, u: &Element) -> f64 {
        self.inner(u, u).max(0.0).sqrt()
    }

    pub fn dim_g(&self) -> usize {
        self.basis.len()
    }

    /// Bases as JSON: `{"X": M, "m_eps": [M...], ...}` with `M` a row-major
    /// matrix of `[re, im]` pairs.
    pub fn bases_json(&self) -> Value {
        let list = |v: &[Element]| Value::Array(v.iter().map(Element::to_json).collect());
        let mut out = json!({
            "space": self.desc.label(),
            "inner_scale": self.scale,
            "X": self.x.to_json(),
            "m_eps": list(&self.m_eps),
            "m_half": list(&self.m_half),
            "h": list(&self.h),
            "k_eps": list(&self.k_eps),
            "k_half": list(&self.k_half),
        });
        if let Some(cp) = &self.cp {
            out["Y"] = cp.y.to_json();
            out["Z"] = cp.z.to_json();
            out["Z0"] = cp.z0.to_json();
            out["Z1"] = cp.z1.to_json();
        }
        out
    }
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn im(v: f64) -> Complex64 {
    Complex64::new(0.0, v)
}

/// `so(N)`: `E_jk − E_kj`, `j < k`.
fn so_basis(n: usize) -> Vec<Element> {
    let mut out = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            out.push(Element::from_entries(n, &[(j, k, re(1.0)), (k, j, re(-1.0))]));
        }
    }
    out
}

/// `su(N)`: real and imaginary off-diagonal generators, then the diagonal
/// `i(E_jj − E_{j+1,j+1})`.
fn su_basis(n: usize) -> Vec<Element> {
    let mut out = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            out.push(Element::from_entries(n, &[(j, k, re(1.0)), (k, j, re(-1.0))]));
            out.push(Element::from_entries(n, &[(j, k, im(1.0)), (k, j, im(1.0))]));
        }
    }
    for j in 0..n.saturating_sub(1) {
        out.push(Element::from_entries(n, &[(j, j, im(1.0)), (j + 1, j + 1, im(-1.0))]));
    }
    out
}

/// `sp(N)` inside `u(2N)` as `[[P, Q], [−Q̄, P̄]]`, `P ∈ u(N)`, `Qᵀ = Q`.
fn sp_basis(n: usize) -> Vec<Element> {
    let size = 2 * n;
    let embed = |p: &[(usize, usize, Complex64)], q: &[(usize, usize, Complex64)]| {
        let mut entries = Vec::new();
        for &(i, j, c) in p {
            entries.push((i, j, c));
            entries.push((n + i, n + j, c.conj()));
        }
        for &(i, j, c) in q {
            entries.push((i, n + j, c));
            entries.push((n + i, j, -c.conj()));
        }
        Element::from_entries(size, &entries)
    };
    let mut out = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            out.push(embed(&[(j, k, re(1.0)), (k, j, re(-1.0))], &[]));
            out.push(embed(&[(j, k, im(1.0)), (k, j, im(1.0))], &[]));
        }
        out.push(embed(&[(j, j, im(1.0))], &[]));
    }
    for j in 0..n {
        for k in j..n {
            let sym = |c: Complex64| {
                if j == k {
                    vec![(j, j, c)]
                } else {
                    vec![(j, k, c), (k, j, c)]
                }
            };
            out.push(embed(&[], &sym(re(1.0))));
            out.push(embed(&[], &sym(im(1.0))));
        }
    }
    out
}

/// Modified Gram–Schmidt (two passes). A candidate is discarded when its
/// residual falls below `drop_tol` relative to its own norm, or below
/// `ABS_FLOOR` outright (canonical candidates all have norm of order one).
fn orthonormalize<F>(candidates: &[Element], inner: F, drop_tol: f64) -> Vec<Element>
where
    F: Fn(&Element, &Element) -> f64,
{
    let mut out: Vec<Element> = Vec::new();
    for c in candidates {
        let n0 = inner(c, c).max(0.0).sqrt();
        if n0 == 0.0 {
            continue;
        }
        let mut v = c.clone();
        for _ in 0..2 {
            for b in &out {
                let p = inner(&v, b);
                v.axpy(-p, b);
            }
        }
        let nv = inner(&v, &v).max(0.0).sqrt();
        if nv > drop_tol * n0 && nv > ABS_FLOOR {
            out.push(v.scale(1.0 / nv));
        }
    }
    out
}

fn symmetric_matrix<F>(basis: &[Element], op: F, inner: &dyn Fn(&Element, &Element) -> f64) -> DMatrix<f64>
where
    F: Fn(&Element) -> Element,
{
    let d = basis.len();
    let images: Vec<Element> = basis.iter().map(&op).collect();
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = inner(&basis[i], &images[j]);
        }
    }
    (&m + m.transpose()) * 0.5
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Count eigenvalues per level of `LEVELS`; error on any stray value.
fn classify(eigs: &[f64], what: &str) -> Result<[usize; 3]> {
    let mut counts = [0usize; 3];
    for &e in eigs {
        match LEVELS.iter().position(|&l| (e - l).abs() < SPECTRUM_TOL) {
            Some(i) => counts[i] += 1,
            None => {
                return Err(Error::ModelConstruction(format!(
                    "eigenvalue {e:.12} of -ad_X^2 on {what} is not in {{0, 1, 1/4}}"
                )))
            }
        }
    }
    Ok(counts)
}

/// Build the matrix model of `𝔤` for `desc`.
pub fn build_model(desc: &SpaceDescriptor) -> Result<AlgebraModel> {
    if !desc.has_matrix_model {
        return Err(Error::UnsupportedModel(desc.label()));
    }
    let n = desc.n as usize;
    let (size, canonical, x0, sigma_signs) = match desc.family {
        Family::Sphere | Family::RealProj => {
            let size = n + 1;
            let x0 = Element::from_entries(size, &[(0, 1, re(1.0)), (1, 0, re(-1.0))]);
            let mut s = vec![1.0; size];
            s[0] = -1.0;
            (size, so_basis(size), x0, s)
        }
        Family::ComplexProj => {
            let size = n + 1;
            let x0 = Element::from_entries(size, &[(0, 1, re(0.5)), (1, 0, re(-0.5))]);
            let mut s = vec![1.0; size];
            s[0] = -1.0;
            (size, su_basis(size), x0, s)
        }
        Family::QuatProj => {
            let half = n + 1;
            let size = 2 * half;
            let x0 = Element::from_entries(
                size,
                &[
                    (0, 1, re(0.5)),
                    (1, 0, re(-0.5)),
                    (half, half + 1, re(0.5)),
                    (half + 1, half, re(-0.5)),
                ],
            );
            let mut s = vec![1.0; size];
            s[0] = -1.0;
            s[half] = -1.0;
            (size, sp_basis(half), x0, s)
        }
        Family::Cayley => return Err(Error::UnsupportedModel(desc.label())),
    };

    let mut model = AlgebraModel {
        desc: desc.clone(),
        size,
        scale: 1.0,
        sigma_signs,
        x: x0,
        m_eps: Vec::new(),
        m_half: Vec::new(),
        k_eps: Vec::new(),
        k_half: Vec::new(),
        h: Vec::new(),
        basis: Vec::new(),
        blocks: Vec::new(),
        cp: None,
    };

    let split = |model: &AlgebraModel| {
        let m_cand: Vec<Element> = canonical.iter().map(|a| (a - &model.sigma(a)).scale(0.5)).collect();
        let k_cand: Vec<Element> = canonical.iter().map(|a| (a + &model.sigma(a)).scale(0.5)).collect();
        (m_cand, k_cand)
    };
    let (m_cand, k_cand) = split(&model);

    // Normalize X so that the top of the spectrum of −ad_X² on 𝔪 is 1,
    // then fix the scale so that ⟨X, X⟩ = 1.
    {
        let inner = |u: &Element, v: &Element| model.inner(u, v);
        let m_raw = orthonormalize(&m_cand, inner, 1e-9);
        let x = model.x.clone();
        let l = symmetric_matrix(&m_raw, |a| -x.bracket(&x.bracket(a)), &inner);
        let top = sorted_eigenvalues(l).last().copied().unwrap_or(0.0);
        if !(top > 1e-12) {
            return Err(Error::ModelConstruction("ad_X vanishes on m".into()));
        }
        if (top - 1.0).abs() > 1e-10 {
            model.x = model.x.scale(1.0 / top.sqrt());
        }
        let xx = -model.x.trace_product(&model.x).re;
        model.scale = 1.0 / xx;
    }

    let x = model.x.clone();
    let minus_ad2 = |a: &Element| -x.bracket(&x.bracket(a));
    let inner = |u: &Element, v: &Element| model.inner(u, v);
    let m_basis = orthonormalize(&m_cand, inner, 1e-9);
    let k_basis = orthonormalize(&k_cand, inner, 1e-9);
    if m_basis.len() != desc.dim {
        return Err(Error::ModelConstruction(format!(
            "dim m = {} but {} has dimension {}",
            m_basis.len(),
            desc.label(),
            desc.dim
        )));
    }

    let m_counts = classify(&sorted_eigenvalues(symmetric_matrix(&m_basis, minus_ad2, &inner)), "m")?;
    let k_counts = classify(&sorted_eigenvalues(symmetric_matrix(&k_basis, minus_ad2, &inner)), "k")?;
    let expect_m = [1, desc.m_eps, desc.m_half];
    let expect_k = [desc.h_dim, desc.m_eps, desc.m_half];
    if m_counts != expect_m || k_counts != expect_k {
        return Err(Error::ModelConstruction(format!(
            "multiplicities of -ad_X^2 (0, 1, 1/4): m {m_counts:?} expected {expect_m:?}, k {k_counts:?} expected {expect_k:?}"
        )));
    }

    // Spectral projector onto the `level` eigenspace, as a polynomial in −ad_X².
    let project = |a: &Element, level: f64| {
        let mut v = a.clone();
        for &other in LEVELS.iter().filter(|&&l| l != level) {
            v = (minus_ad2(&v) - v.scale(other)).scale(1.0 / (level - other));
        }
        v
    };
    let eigenbasis = |cands: &[Element], level: f64| {
        let projected: Vec<Element> = cands.iter().map(|a| project(a, level)).collect();
        orthonormalize(&projected, inner, 1e-6)
    };

    let (m_eps, m_half, cp) = if desc.family == Family::ComplexProj {
        cp_bases(&model, n)?
    } else {
        (eigenbasis(&m_cand, 1.0), eigenbasis(&m_cand, 0.25), None)
    };
    let h = eigenbasis(&k_cand, 0.0);
    if m_eps.len() != desc.m_eps || m_half.len() != desc.m_half || h.len() != desc.h_dim {
        return Err(Error::ModelConstruction(format!(
            "eigenbases have sizes ({}, {}, {}), expected ({}, {}, {})",
            m_eps.len(),
            m_half.len(),
            h.len(),
            desc.m_eps,
            desc.m_half,
            desc.h_dim
        )));
    }

    // ζ = −[X, ξ] / λ'(X)
    let k_eps: Vec<Element> = m_eps.iter().map(|xi| -x.bracket(xi)).collect();
    let k_half: Vec<Element> = m_half.iter().map(|xi| x.bracket(xi).scale(-2.0)).collect();

    let mut basis = vec![x.clone()];
    let mut blocks = vec![Block::A];
    for (elems, block) in [
        (&m_eps, Block::MEps),
        (&m_half, Block::MHalf),
        (&h, Block::H),
        (&k_eps, Block::KEps),
        (&k_half, Block::KHalf),
    ] {
        basis.extend(elems.iter().cloned());
        blocks.extend(std::iter::repeat_n(block, elems.len()));
    }
    if basis.len() != canonical.len() {
        return Err(Error::ModelConstruction(format!(
            "graded basis has {} elements, dim g = {}",
            basis.len(),
            canonical.len()
        )));
    }
    let mut gram_defect: f64 = 0.0;
    for i in 0..basis.len() {
        for j in 0..=i {
            let target = if i == j { 1.0 } else { 0.0 };
            gram_defect = gram_defect.max((inner(&basis[i], &basis[j]) - target).abs());
        }
    }
    if gram_defect > 1e-10 {
        return Err(Error::ModelConstruction(format!(
            "graded basis is not orthonormal (defect {gram_defect:.3e})"
        )));
    }

    model.m_eps = m_eps;
    model.m_half = m_half;
    model.k_eps = k_eps;
    model.k_half = k_half;
    model.h = h;
    model.basis = basis;
    model.blocks = blocks;
    model.cp = cp;
    Ok(model)
}

type CpBases = (Vec<Element>, Vec<Element>, Option<CpElements>);

/// `Y = [Z₀, X]`, `Z = [Y, X]`, `Z₀`, `Z₁` and the explicit bases of
/// `𝔪_ε = ℝY` and `𝔪_{ε/2}`.
fn cp_bases(model: &AlgebraModel, n: usize) -> Result<CpBases> {
    let size = n + 1;
    let nf = n as f64;
    let b0 = nf / (nf + 1.0);
    let b1 = (nf - 1.0) / (nf + 1.0);
    let mut z0 = vec![(0, 0, im(b0)), (1, 1, im(b0 - 1.0))];
    for j in 2..size {
        z0.push((j, j, im(b0 - 1.0)));
    }
    let z0 = Element::from_entries(size, &z0);
    let mut z1 = vec![(0, 0, im(b1)), (1, 1, im(b1))];
    for j in 2..size {
        z1.push((j, j, im(b1 - 1.0)));
    }
    let z1 = Element::from_entries(size, &z1);
    let x = model.x();
    let y = z0.bracket(x);
    let z = y.bracket(x);
    let mut m_half = Vec::new();
    for j in 2..size {
        m_half.push(Element::from_entries(size, &[(0, j, re(0.5)), (j, 0, re(-0.5))]));
        m_half.push(Element::from_entries(size, &[(0, j, im(0.5)), (j, 0, im(0.5))]));
    }
    for (v, level) in std::iter::once((&y, 1.0)).chain(m_half.iter().map(|v| (v, 0.25))) {
        let r = (&(-x.bracket(&x.bracket(v))) - &v.scale(level)).max_abs();
        if r > 1e-12 {
            return Err(Error::ModelConstruction(format!(
                "explicit su basis vector is not an ad_X^2 eigenvector (residual {r:.3e})"
            )));
        }
    }
    let cp = CpElements { y: y.clone(), z, z0, z1 };
    Ok((vec![y], m_half, Some(cp)))
}
