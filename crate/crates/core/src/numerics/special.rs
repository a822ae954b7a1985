//! Elementary functions with removable singularities and log-domain helpers.

use std::f64::consts::LN_2;

/// `ln sinh x` for `x > 0`, finite far beyond the overflow of `sinh`.
pub fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `ln cosh x`.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a - LN_2 + (-2.0 * a).exp().ln_1p()
}

/// `ln(eᵃ + eᵇ)`, accepting `-∞` for either argument.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

fn even_series(z: f64, coeffs: &[f64]) -> f64 {
    let z2 = z * z;
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * z2 + c)
}

/// `sinh z / z`.
pub fn sinhc(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.sinh() / z
    }
}

/// `tanh z / z`.
pub fn tanhc(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.tanh() / z
    }
}

/// `(sinhc)'(z) / z = (z cosh z − sinh z) / z³`, even and analytic.
pub fn sinhc_slope(z: f64) -> f64 {
    if z.abs() < 0.5 {
        // Σ_{k≥1} 2k z^{2k−2} / (2k+1)!
        let mut coeffs = [0.0; 9];
        let mut fact = 1.0; // (2k+1)!
        for (i, c) in coeffs.iter_mut().enumerate() {
            let k = (i + 1) as f64;
            fact *= (2.0 * k) * (2.0 * k + 1.0);
            *c = 2.0 * k / fact;
        }
        even_series(z, &coeffs)
    } else {
        (z.cosh() - sinhc(z)) / (z * z)
    }
}

/// `(tanhc)'(z) / z = (z sech² z − tanh z) / z³`, even and analytic.
pub fn tanhc_slope(z: f64) -> f64 {
    if z.abs() < 0.1 {
        const C: [f64; 7] = [
            -2.0 / 3.0,
            8.0 / 15.0,
            -102.0 / 315.0,
            496.0 / 2835.0,
            -13820.0 / 155_925.0,
            262_128.0 / 6_081_075.0,
            -13_013_966.0 / 638_512_875.0,
        ];
        even_series(z, &C)
    } else {
        let sech = 1.0 / z.cosh();
        (sech * sech - tanhc(z)) / (z * z)
    }
}

/// `(sech r − 1) / r²`.
pub fn sech_m1_over_sq(r: f64) -> f64 {
    let s = sinhc(0.5 * r);
    -0.5 * s * s / r.cosh()
}

/// `(r φ'(r) − 2(φ(r) − 1)) / r⁴` with `φ = sech`; equals `5/12` at `r = 0`.
pub fn sech_quartic_kernel(r: f64) -> f64 {
    if r.abs() < 0.1 {
        // Σ_{k≥2} (2k−2) e_k r^{2k−4}, e_k = E_{2k}/(2k)! (Euler numbers).
        const E: [f64; 7] = [
            5.0 / 24.0,
            -61.0 / 720.0,
            1385.0 / 40_320.0,
            -50_521.0 / 3_628_800.0,
            2_702_765.0 / 479_001_600.0,
            -199_360_981.0 / 87_178_291_200.0,
            19_391_512_145.0 / 20_922_789_888_000.0,
        ];
        let mut coeffs = [0.0; 7];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let k = (i + 2) as f64;
            *c = (2.0 * k - 2.0) * E[i];
        }
        even_series(r, &coeffs)
    } else {
        // r φ' = −r² tanhc(r) φ and φ − 1 = r²·sech_m1_over_sq(r), both exact
        // to rounding, so only the final difference cancels.
        let phi = 1.0 / r.cosh();
        (-tanhc(r) * phi - 2.0 * sech_m1_over_sq(r)) / (r * r)
    }
}
