use approx::assert_relative_eq;
use proptest::prelude::*;
use rfk_core::algebra::build_model;
use rfk_core::completeness::{
    analyze_completeness, bernoulli_closed_form, bernoulli_ode_check, bernoulli_rhs, f_u, h_distance,
    verify_geodesic_field,
};
use rfk_core::profiles::{f_double_prime, f_prime};
use rfk_core::{lookup_space, Error, Family, RadialParams};

fn params(c: f64, c1: f64, c_z: f64) -> RadialParams {
    RadialParams { c, c1, c_z }
}

/// 1/f_U for ℂPⁿ with C₁ = 0, from f' = sinh·sqrt(C + c_Z² sech²) and
/// f'f'' + c_Z²φφ' = C sinh cosh.
fn inv_f_u_cp_c1_zero(c: f64, c_z: f64, x: f64) -> f64 {
    let fp = x.sinh() * (c + c_z * c_z / x.cosh().powi(2)).sqrt();
    (c * x.sinh() * x.cosh() / fp).sqrt()
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn f_u_without_cz_is_inverse_sqrt_fpp() {
    for (fam, n) in [(Family::Sphere, 3), (Family::QuatProj, 1), (Family::ComplexProj, 2)] {
        let d = lookup_space(fam, n).unwrap();
        for p in [params(1.0, 0.0, 0.0), params(2.0, 0.5, 0.0)] {
            for x in [0.01, 0.5, 1.0, 4.0] {
                let want = 1.0 / f_double_prime(&d, p, x).unwrap().sqrt();
                assert_relative_eq!(f_u(&d, p, x).unwrap(), want, max_relative = 1e-11);
            }
        }
    }
}

#[test]
fn f_u_cp2_direct_substitution() {
    let d = lookup_space(Family::ComplexProj, 2).unwrap();
    let (c, cz, x) = (1.0, 1.0, 2.0_f64);
    let (s, ch) = (x.sinh(), x.cosh());
    let fp = (c * s * s + cz * cz * s * s / (ch * ch)).sqrt();
    let fpfpp = c * s * ch + cz * cz * (s / ch - s.powi(3) / ch.powi(3));
    let phi_phip = -(s / ch) / (ch * ch);
    let want = (fp / (fpfpp + cz * cz * phi_phip)).sqrt();
    assert_relative_eq!(f_u(&d, params(c, 0.0, cz), x).unwrap(), want, max_relative = 1e-12);
}

#[test]
fn f_u_asymptotics() {
    let d = lookup_space(Family::ComplexProj, 3).unwrap();
    for (c, cz) in [(1.0, 0.0), (2.0, 0.5), (0.5, -2.0)] {
        let x = 20.0_f64;
        let ratio = (1.0 / f_u(&d, params(c, 0.0, cz), x).unwrap()) / (c.sqrt() * x.sinh()).sqrt();
        assert!((ratio - 1.0).abs() < 1e-8, "ratio {ratio}");
    }
}

#[test]
fn h_basic_properties() {
    let d = lookup_space(Family::ComplexProj, 2).unwrap();
    let p = params(1.0, 0.0, 0.5);
    assert_eq!(h_distance(&d, p, 2.0, 2.0).unwrap(), 0.0);
    assert!(h_distance(&d, p, 1.0, 4.0).unwrap() < h_distance(&d, p, 1.0, 8.0).unwrap());
    assert!(matches!(h_distance(&d, p, 3.0, 2.0), Err(Error::Argument(_))));
    assert!(matches!(h_distance(&d, p, 0.0, 2.0), Err(Error::Domain(_))));
}

#[test]
fn h_matches_simpson_oracle() {
    let d = lookup_space(Family::ComplexProj, 2).unwrap();
    for (c, cz) in [(1.0, 0.5), (2.0, -0.5), (0.5, 2.0)] {
        for x in [2.0, 8.0, 12.0] {
            let got = h_distance(&d, params(c, 0.0, cz), 1.0, x).unwrap();
            let want = simpson(|s| inv_f_u_cp_c1_zero(c, cz, s), 1.0, x, 20_000);
            assert_relative_eq!(got, want, max_relative = 1e-10);
        }
    }
}

#[test]
fn h_grows_like_exp_half_x() {
    // 1/f_U ~ (√C sinh x)^{1/2}, so h(1, x) e^{−x/2} → 2 (√C / 2)^{1/2}.
    let d = lookup_space(Family::ComplexProj, 2).unwrap();
    let c = 2.0_f64;
    let ratios: Vec<f64> = [8.0, 10.0, 12.0]
        .iter()
        .map(|&x: &f64| h_distance(&d, params(c, 0.0, 0.7), 1.0, x).unwrap() / (0.5 * x).exp())
        .collect();
    let limit = 2.0 * (c.sqrt() / 2.0).sqrt();
    let errs: Vec<f64> = ratios.iter().map(|r| (r - limit).abs()).collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{ratios:?} vs {limit}");
    assert!(errs[2] / limit < 1e-2, "{ratios:?} vs {limit}");
}

#[test]
fn h_grows_like_sqrt_fp_on_spheres() {
    // f' ~ K e^{2(n−1)x/n}, 1/f_U = sqrt(f'') ~ sqrt(2(n−1)/n · f'),
    // so h(1, x) / sqrt(f'(x)) → sqrt(2(n−1)/n) · n/(n−1).
    for n in [3, 5] {
        let d = lookup_space(Family::Sphere, n).unwrap();
        let p = params(1.0, 0.0, 0.0);
        let k = 2.0 * f64::from(n - 1) / f64::from(n);
        let limit = k.sqrt() * 2.0 / k;
        let x = 16.0;
        let ratio = h_distance(&d, p, 1.0, x).unwrap() / f_prime(&d, p, x).unwrap().sqrt();
        assert!((ratio / limit - 1.0).abs() < 1e-3, "n={n}: {ratio} vs {limit}");
    }
}

#[test]
fn completeness_report_for_c1_zero() {
    let grid: Vec<f64> = (0..50).map(|k| 1e-3 * (8e3_f64).powf(k as f64 / 49.0)).collect();
    for (fam, n, cz) in [(Family::Sphere, 3, 0.0), (Family::ComplexProj, 2, -0.5), (Family::QuatProj, 2, 0.0)] {
        let d = lookup_space(fam, n).unwrap();
        let r = analyze_completeness(&d, params(1.0, 0.0, cz), &grid).unwrap();
        assert!(r.invariants_hold());
        assert!(r.divergent);
        assert!(r.h_1_30 > 50.0);
        assert!((r.growth_exponent - 0.5).abs() < 0.05, "{}", r.growth_exponent);
        assert_eq!(r.h[0], 0.0);
        assert_eq!(r.h.len(), 50);
    }
}

#[test]
fn geodesic_field_unit_norm_example() {
    let d = lookup_space(Family::ComplexProj, 2).unwrap();
    let m = build_model(&d).unwrap();
    let r = verify_geodesic_field(&m, params(1.0, 0.0, 0.5), 1.0).unwrap();
    assert!(r.unit_residual < 1e-10, "{}", r.unit_residual);
    assert!(r.orthogonality_residual.unwrap() < 1e-10);
}

#[test]
fn geodesic_field_untilted_defect() {
    let d = lookup_space(Family::ComplexProj, 3).unwrap();
    let m = build_model(&d).unwrap();
    let cz = 0.5;
    let x = 1.3_f64;
    let r = verify_geodesic_field(&m, params(1.0, 0.0, cz), x).unwrap();
    let z = &m.cp().unwrap().z;
    let want = (cz * x.tanh() / x.cosh()).abs() * m.inner(z, z);
    assert_relative_eq!(r.untilted_defect.unwrap(), want, max_relative = 1e-10);
    assert!(want > 1e-2);
}

#[test]
fn geodesic_field_residuals_on_grid() {
    let grid: Vec<f64> = (0..20).map(|k| 0.05 * (160.0_f64).powf(k as f64 / 19.0)).collect();
    for n in [1, 2, 3] {
        let d = lookup_space(Family::ComplexProj, n).unwrap();
        let m = build_model(&d).unwrap();
        for cz in [0.0, 0.5, -0.5, 2.0, -1.3] {
            for &x in &grid {
                let r = verify_geodesic_field(&m, params(1.0, 0.0, cz), x).unwrap();
                assert!(r.max_residual() < 1e-9, "n={n} cz={cz} x={x}: {r:?}");
                if cz == 0.0 {
                    assert!(r.hamiltonian_residual.is_none());
                } else {
                    assert!(r.hamiltonian_norm_residual.is_some());
                }
            }
        }
    }
}

#[test]
fn geodesic_field_needs_cp_model() {
    let d = lookup_space(Family::Sphere, 3).unwrap();
    let m = build_model(&d).unwrap();
    assert!(matches!(verify_geodesic_field(&m, params(1.0, 0.0, 0.0), 1.0), Err(Error::Domain(_))));
}

#[test]
fn bernoulli_linear_case() {
    for c in [0.5, 1.0, 2.0] {
        for c1 in [0.0, 0.5] {
            let r = bernoulli_ode_check(params(c, c1, 0.0), 1, 0.5, 3.0).unwrap();
            assert!(r.max_rel_deviation < 1e-8, "{r:?}");
        }
    }
}

#[test]
fn bernoulli_n3_example() {
    let r = bernoulli_ode_check(params(1.0, 0.5, 0.0), 3, 0.5, 3.0).unwrap();
    assert!(r.max_rel_deviation < 1e-6, "{r:?}");
}

#[test]
fn bernoulli_closed_form_fd_residual() {
    let h = 1e-5;
    for n in [1, 2, 3, 4] {
        for p in [params(1.0, 0.0, 0.0), params(0.5, 0.5, 0.0), params(2.0, 0.5, 0.0)] {
            for k in 0..=25 {
                let x = 0.5 + 0.1 * f64::from(k);
                let g = |t| bernoulli_closed_form(p, n, t);
                let d = (-g(x + 2.0 * h) + 8.0 * g(x + h) - 8.0 * g(x - h) + g(x - 2.0 * h)) / (12.0 * h);
                let rhs = bernoulli_rhs(p, n, x, g(x));
                assert!(((d - rhs) / rhs).abs() < 1e-7, "n={n} x={x}: {d} vs {rhs}");
            }
        }
    }
}

#[test]
fn bernoulli_closed_form_is_cosh_sq_times_fp_sq_part() {
    // g₂ = cosh²·G^{1/n} = cosh²(f'² − c_Z² tanh²) with c_Z = 0.
    let d = lookup_space(Family::ComplexProj, 3).unwrap();
    let p = params(1.5, 0.5, 0.0);
    for x in [0.5, 1.0, 2.5] {
        let fp = f_prime(&d, p, x).unwrap();
        assert_relative_eq!(bernoulli_closed_form(p, 3, x), x.cosh().powi(2) * fp * fp, max_relative = 1e-12);
    }
}

#[test]
fn bernoulli_argument_errors() {
    let p = params(1.0, 0.0, 0.0);
    assert!(matches!(bernoulli_ode_check(p, 2, 3.0, 0.5), Err(Error::Argument(_))));
    assert!(matches!(bernoulli_ode_check(p, 2, 0.0, 1.0), Err(Error::Argument(_))));
    assert!(bernoulli_ode_check(p, 0, 0.5, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn h_is_additive(c in 0.2f64..3.0, cz in -2.0f64..2.0, a in 0.01f64..2.0, d1 in 0.1f64..3.0, d2 in 0.1f64..3.0) {
        let d = lookup_space(Family::ComplexProj, 2).unwrap();
        let p = params(c, 0.0, cz);
        let (b, e) = (a + d1, a + d1 + d2);
        let whole = h_distance(&d, p, a, e).unwrap();
        let parts = h_distance(&d, p, a, b).unwrap() + h_distance(&d, p, b, e).unwrap();
        prop_assert!((whole - parts).abs() < 1e-9 * whole.max(1.0));
    }

    #[test]
    fn f_u_positive(c in 0.1f64..5.0, c1 in 0.0f64..3.0, cz in -3.0f64..3.0, x in 1e-3f64..15.0, n in 1u32..5) {
        let d = lookup_space(Family::ComplexProj, n).unwrap();
        prop_assert!(f_u(&d, params(c, c1, cz), x).unwrap() > 0.0);
    }
}
