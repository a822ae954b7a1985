use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numerics::linalg::CMatrix;

/// Element of a matrix Lie algebra: a skew-Hermitian complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Element(CMatrix);

impl Element {
    pub fn zeros(size: usize) -> Self {
        Element(CMatrix::zeros(size, size))
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Argument(format!(
                "algebra elements are square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Element(m))
    }

    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        Element(m)
    }

    /// `Σ c_k E_{i_k j_k}` for a list of `(i, j, c)` triplets.
    pub(crate) fn from_entries(size: usize, entries: &[(usize, usize, Complex64)]) -> Self {
        let mut m = CMatrix::zeros(size, size);
        for &(i, j, c) in entries {
            m[(i, j)] += c;
        }
        Element(m)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Matrix commutator `[self, other]`. Panics on a size mismatch; see
    /// [`bracket`] for the checked form.
    pub fn bracket(&self, other: &Element) -> Element {
        Element(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// `Ad_k(self) = k · self · kᴴ` for unitary `k`.
    pub fn conjugated(&self, k: &CMatrix) -> Element {
        Element(k * &self.0 * k.adjoint())
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Element) -> Complex64 {
        let n = self.size();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.0[(i, j)] * other.0[(j, i)];
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Largest entry of `A + Aᴴ`.
    pub fn skew_hermitian_defect(&self) -> f64 {
        let n = self.size();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.0[(i, j)] + self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn scale(&self, a: f64) -> Element {
        Element(&self.0 * Complex64::new(a, 0.0))
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &Element) {
        let a = Complex64::new(a, 0.0);
        for (s, o) in self.0.iter_mut().zip(other.0.iter()) {
            *s += a * o;
        }
    }

    /// Row-major `[[re, im], ...]` rows, for debug dumps.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.size())
            .map(|i| {
                Value::Array(
                    (0..self.size())
                        .map(|j| {
                            let z = self.0[(i, j)];
                            json!([z.re, z.im])
                        })
                        .collect(),
                )
            })
            .collect();
        Value::Array(rows)
    }
}

/// Checked commutator.
pub fn bracket(u: &Element, v: &Element) -> Result<Element> {
    if u.size() != v.size() {
        return Err(Error::Argument(format!(
            "bracket of elements of sizes {} and {}",
            u.size(),
            v.size()
        )));
    }
    Ok(u.bracket(v))
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        Element(&self.0 + &rhs.0)
    }
}

impl Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        Element(self.0 + rhs.0)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        Element(&self.0 - &rhs.0)
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        Element(self.0 - rhs.0)
    }
}

impl AddAssign<&Element> for Element {
    fn add_assign(&mut self, rhs: &Element) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Element> for Element {
    fn sub_assign(&mut self, rhs: &Element) {
        self.0 -= &rhs.0;
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element(-&self.0)
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element(-self.0)
    }
}

impl Mul<&Element> for f64 {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        rhs.scale(self)
    }
}

impl Mul<Element> for f64 {
    type Output = Element;
    fn mul(self, rhs: Element) -> Element {
        rhs.scale(self)
    }
}

/// Element of the complexification `𝔤 ⊗ ℂ`, stored as `re + i·im` with
/// `re, im ∈ 𝔤`. The formal `i` here is unrelated to the imaginary unit
/// inside the matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CElement {
    pub re: Element,
    pub im: Element,
}

impl CElement {
    pub fn real(re: Element) -> Self {
        let im = Element::zeros(re.size());
        CElement { re, im }
    }

    pub fn new(re: Element, im: Element) -> Self {
        CElement { re, im }
    }

    pub fn zeros(size: usize) -> Self {
        CElement { re: Element::zeros(size), im: Element::zeros(size) }
    }

    pub fn conj(&self) -> CElement {
        CElement { re: self.re.clone(), im: -&self.im }
    }

    /// Complex-bilinear bracket.
    pub fn bracket(&self, other: &CElement) -> CElement {
        let re = self.re.bracket(&other.re) - self.im.bracket(&other.im);
        let im = self.re.bracket(&other.im) + self.im.bracket(&other.re);
        CElement { re, im }
    }

    /// `self += c · other` for complex `c`.
    pub fn axpy(&mut self, c: Complex64, other: &CElement) {
        self.re.axpy(c.re, &other.re);
        self.re.axpy(-c.im, &other.im);
        self.im.axpy(c.re, &other.im);
        self.im.axpy(c.im, &other.re);
    }

    pub fn scale(&self, c: Complex64) -> CElement {
        let mut out = CElement::zeros(self.re.size());
        out.axpy(c, self);
        out
    }
}
