//! Dormand–Prince 5(4) embedded Runge–Kutta integrator for scalar ODEs.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            initial_step: 1e-3,
            min_step: 1e-14,
            max_steps: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSolution {
    pub y: f64,
    pub accepted: usize,
    pub rejected: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
// Fifth-order weights (also the last stage row, FSAL).
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between fifth- and fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate `y' = f(x, y)` from `(x0, y0)` to `x1 > x0`.
pub fn integrate<F: Fn(f64, f64) -> f64>(
    f: F,
    x0: f64,
    y0: f64,
    x1: f64,
    opts: OdeOptions,
) -> Result<OdeSolution> {
    if !(x1 > x0) {
        return Err(Error::Argument(format!("ODE interval must satisfy x0 < x1, got [{x0}, {x1}]")));
    }
    let mut x = x0;
    let mut y = y0;
    let mut h = opts.initial_step.min(x1 - x0);
    let mut k1 = f(x, y);
    let mut accepted = 0;
    let mut rejected = 0;

    for _ in 0..opts.max_steps {
        if x >= x1 {
            return Ok(OdeSolution { y, accepted, rejected });
        }
        if x + h > x1 {
            h = x1 - x;
        }
        let k2 = f(x + C2 * h, y + h * A21 * k1);
        let k3 = f(x + C3 * h, y + h * (A31 * k1 + A32 * k2));
        let k4 = f(x + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = f(x + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        let k6 = f(x + h, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        let y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let k7 = f(x + h, y_new);
        let err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        if !y_new.is_finite() || !err.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite state at x = {x:e} (h = {h:e}); the problem may be stiff"
            )));
        }
        let scale = opts.abs_tol + opts.rel_tol * y.abs().max(y_new.abs());
        let ratio = (err / scale).abs();
        if ratio <= 1.0 {
            x += h;
            y = y_new;
            k1 = k7;
            accepted += 1;
        } else {
            rejected += 1;
        }
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < opts.min_step && x < x1 {
            return Err(Error::Numeric(format!(
                "step size underflow at x = {x:e} (h = {h:e}, {accepted} accepted, {rejected} rejected)"
            )));
        }
    }
    Err(Error::Numeric(format!(
        "exceeded {} steps before reaching x = {x1} (stopped at {x:e})",
        opts.max_steps
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let sol = integrate(|_, y| y, 0.0, 1.0, 3.0, OdeOptions::default()).unwrap();
        let exact = 3f64.exp();
        assert!(((sol.y - exact) / exact).abs() < 1e-8);
    }

    #[test]
    fn logistic() {
        let sol = integrate(|_, y| y * (1.0 - y), 0.0, 0.1, 5.0, OdeOptions::default()).unwrap();
        let exact = 1.0 / (1.0 + 9.0 * (-5f64).exp());
        assert!(((sol.y - exact) / exact).abs() < 1e-8);
    }

    #[test]
    fn blow_up_is_reported() {
        // y' = y², y(0) = 1 blows up at x = 1.
        let r = integrate(|_, y| y * y, 0.0, 1.0, 2.0, OdeOptions::default());
        assert!(matches!(r, Err(Error::Numeric(_))));
    }

    #[test]
    fn bad_interval() {
        assert!(integrate(|_, y| y, 1.0, 1.0, 1.0, OdeOptions::default()).is_err());
    }
}
