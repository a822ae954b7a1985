//! Adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub intervals: usize,
}

const MAX_INTERVALS: usize = 4000;

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kron += wk * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

/// Integrate `f` over `[a, b]` until the summed Kronrod–Gauss error estimate
/// drops below `max(tol.abs, tol.rel·|I|)`.
///
/// Intervals are refined greedily by largest local error. `a > b` is
/// allowed and flips the sign.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Argument(format!("non-finite integration bounds [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, abs_err: 0.0, intervals: 0 });
    }
    if a > b {
        let r = integrate(f, b, a, tol)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }

    let (v0, e0) = kronrod15(&f, a, b);
    // (a, b, value, err)
    let mut pieces = vec![(a, b, v0, e0)];
    let mut total = v0;
    let mut err = e0;
    loop {
        if !total.is_finite() {
            return Err(Error::Numeric(format!("non-finite integrand on [{a}, {b}]")));
        }
        if err <= tol.abs.max(tol.rel * total.abs()) {
            break;
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::Numeric(format!(
                "quadrature on [{a}, {b}] did not converge: estimate {total:e} ± {err:e}"
            )));
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|l, r| l.1 .3.total_cmp(&r.1 .3))
            .expect("at least one interval");
        let (lo, hi, v, e) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval can no longer be split in f64; accept what we have.
            pieces.push((lo, hi, v, e));
            break;
        }
        let (vl, el) = kronrod15(&f, lo, mid);
        let (vr, er) = kronrod15(&f, mid, hi);
        total += vl + vr - v;
        err += el + er - e;
        pieces.push((lo, mid, vl, el));
        pieces.push((mid, hi, vr, er));
    }
    // Re-sum to avoid drift from the running updates.
    let value = pieces.iter().map(|p| p.2).sum();
    let abs_err = pieces.iter().map(|p| p.3).sum();
    Ok(QuadResult { value, abs_err, intervals: pieces.len() })
}
