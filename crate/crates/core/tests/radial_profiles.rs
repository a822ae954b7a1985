use proptest::prelude::*;
use rfk_core::algebra::build_model;
use rfk_core::profiles::{f_double_prime, f_prime, vector_a, vector_a_prime, RadialProfile, VectorFunctionA};
use rfk_core::{lookup_space, Error, Family, RadialParams};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

/// Composite Simpson rule, independent of the library's quadrature.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn sphere3_closed_antiderivative() {
    let d = lookup_space(Family::Sphere, 3).unwrap();
    for x in [0.2f64, 0.9, 1.0, 2.5, 7.0] {
        let exact = ((4.0 * x).sinh() / 8.0 - x / 2.0).powf(1.0 / 3.0);
        let got = f_prime(&d, RadialParams::default(), x).unwrap();
        assert!(rel(got, exact) < 1e-12, "x = {x}: {got} vs {exact}");
    }
    // Quoted to four digits as 1.4280; the exact value is 1.427883...
    let v = f_prime(&d, RadialParams::default(), 1.0).unwrap();
    assert!((v - 1.4280).abs() < 2e-4);
    assert!((v - 1.427_883_096_881_885).abs() < 1e-13);
}

#[test]
fn quaternionic_integral_against_simpson() {
    for n in [1u32, 2] {
        let d = lookup_space(Family::QuatProj, n).unwrap();
        let (me, mh) = (d.m_eps as i32, d.m_half as i32);
        let params = RadialParams::new(1.5, 0.5, 0.0);
        for x in [0.05, 0.7, 2.0, 4.0] {
            let i = simpson(|t: f64| (2.0 * t).sinh().powi(me) * t.sinh().powi(mh), 0.0, x, 20_000);
            let exact = (params.c * i + params.c1).powf(1.0 / d.m_total as f64);
            assert!(rel(f_prime(&d, params, x).unwrap(), exact) < 1e-10, "n = {n}, x = {x}");
        }
    }
}

#[test]
fn cp_collapses_to_sinh() {
    for n in 1..=4 {
        let d = lookup_space(Family::ComplexProj, n).unwrap();
        let p = RadialParams::new(2.0, 0.0, 0.0);
        for x in [1e-3, 0.5, 3.0, 9.0] {
            assert!(rel(f_prime(&d, p, x).unwrap(), 2f64.sqrt() * x.sinh()) < 1e-13);
        }
    }
    let d1 = lookup_space(Family::ComplexProj, 1).unwrap();
    for x in [0.1, 1.0, 4.0] {
        assert!(rel(f_double_prime(&d1, RadialParams::default(), x).unwrap(), x.cosh()) < 1e-13);
    }
}

#[test]
fn cp_identity_with_cz() {
    for n in 1..=4 {
        let d = lookup_space(Family::ComplexProj, n).unwrap();
        let p = RadialParams::new(0.7, 0.0, -1.3);
        for x in log_grid(1e-3, 8.0, 20) {
            let fp = f_prime(&d, p, x).unwrap();
            let resid = fp * fp - p.c * x.sinh().powi(2) - p.c_z * p.c_z * x.tanh().powi(2);
            assert!(resid.abs() < 1e-12 * fp * fp);
        }
    }
}

#[test]
fn limit_with_c1() {
    for (f, n) in [(Family::Sphere, 4), (Family::QuatProj, 2), (Family::Cayley, 2)] {
        let d = lookup_space(f, n).unwrap();
        let p = RadialParams::new(1.0, 2.0, 0.0);
        let lim = 2f64.powf(1.0 / d.m_total as f64);
        assert!(rel(f_prime(&d, p, 1e-4).unwrap(), lim) < 1e-8);
    }
    let d = lookup_space(Family::ComplexProj, 3).unwrap();
    // f' → C₁^{1/2n}
    let lim = 2f64.powf(1.0 / 6.0);
    assert!(rel(f_prime(&d, RadialParams::new(1.0, 2.0, 0.4), 1e-5).unwrap(), lim) < 1e-8);
}

#[test]
fn derivative_matches_central_difference() {
    let spaces = [
        (Family::Sphere, 3),
        (Family::Sphere, 6),
        (Family::ComplexProj, 1),
        (Family::ComplexProj, 3),
        (Family::QuatProj, 2),
        (Family::Cayley, 2),
    ];
    let params = [(1.0, 0.0, 0.0), (2.0, 0.0, 0.5), (0.5, 0.0, -0.5), (1.0, 1.0, 2.0), (1.5, 0.5, 0.5)];
    for (f, n) in spaces {
        let d = lookup_space(f, n).unwrap();
        for (c, c1, cz) in params {
            let cz = if f == Family::ComplexProj { cz } else { 0.0 };
            let prof = RadialProfile::new(&d, RadialParams::new(c, c1, cz)).unwrap();
            for x in log_grid(0.05, 8.0, 12) {
                // With C₁ > 0 and small x, f' is nearly constant and a
                // difference quotient cannot resolve f''; skip those points.
                if x * prof.f_double_prime(x).unwrap() < 1e-4 * prof.f_prime(x).unwrap() {
                    continue;
                }
                let h = 1e-5 * x.max(0.1);
                let fd = (prof.f_prime(x + h).unwrap() - prof.f_prime(x - h).unwrap()) / (2.0 * h);
                let got = prof.f_double_prime(x).unwrap();
                assert!(rel(got, fd) < 1e-6, "{f}({n}) C={c} C1={c1} x={x}: {got} vs {fd}");
            }
        }
    }
}

#[test]
fn cp1_matches_integral_formula() {
    let d = lookup_space(Family::ComplexProj, 1).unwrap();
    for (c, c1) in [(1.0, 0.0), (2.0, 0.0), (0.5, 0.7)] {
        let p = RadialParams::new(c, c1, 0.0);
        let cp = RadialProfile::new(&d, p).unwrap();
        let int = RadialProfile::with_multiplicities(&d, p, 1, 0).unwrap();
        for x in log_grid(1e-3, 8.0, 50) {
            assert!(rel(cp.f_prime(x).unwrap(), int.f_prime(x).unwrap()) < 1e-12, "x = {x}");
        }
    }
}

#[test]
fn small_x_slope() {
    let x = 1e-4;
    for (f, n) in [(Family::Sphere, 3), (Family::Sphere, 5), (Family::QuatProj, 1), (Family::Cayley, 2)] {
        let d = lookup_space(f, n).unwrap();
        let p = RadialParams::new(1.7, 0.0, 0.0);
        let m = d.m_total as f64;
        let expect = (2f64.powi(d.m_eps as i32) * 1.7 / m).powf(1.0 / m);
        assert!(rel(f_prime(&d, p, x).unwrap() / x, expect) < 1e-6);
    }
    let d = lookup_space(Family::ComplexProj, 2).unwrap();
    let p = RadialParams::new(1.0, 0.0, 2.0);
    assert!(rel(f_prime(&d, p, x).unwrap() / x, 5f64.sqrt()) < 1e-6);
}

#[test]
fn kernels_are_continuous_and_consistent() {
    for (f, n, cz) in [(Family::Sphere, 4, 0.0), (Family::QuatProj, 2, 0.0), (Family::ComplexProj, 2, 0.8)] {
        let d = lookup_space(f, n).unwrap();
        let prof = RadialProfile::new(&d, RadialParams::new(1.3, 0.0, cz)).unwrap();
        // Both sides of the representation switch.
        let lo = prof.kernel_fp_slope(1.0 - 1e-12).unwrap();
        let hi = prof.kernel_fp_slope(1.0 + 1e-12).unwrap();
        assert!(rel(lo, hi) < 1e-9, "{f}: {lo} vs {hi}");
        for r in [0.3, 0.9] {
            let k1 = prof.kernel_fp_over_r(r).unwrap();
            assert!(rel(k1, prof.f_prime(r).unwrap() / r) < 1e-12);
            let direct = (r * prof.f_double_prime(r).unwrap() - prof.f_prime(r).unwrap()) / r.powi(3);
            assert!(rel(prof.kernel_fp_slope(r).unwrap(), direct) < 1e-8);
        }
        let k0 = prof.kernel_fp_over_r(0.0).unwrap();
        assert!(rel(k0, prof.kernel_fp_over_r(1e-6).unwrap()) < 1e-9);
        assert!(prof.kernel_fp_slope(0.0).unwrap().is_finite());
    }
    let d = lookup_space(Family::Sphere, 4).unwrap();
    let prof = RadialProfile::new(&d, RadialParams::new(1.0, 1.0, 0.0)).unwrap();
    assert!(matches!(prof.kernel_fp_over_r(0.0), Err(Error::SingularExtension(_))));
}

#[test]
fn vector_function_a() {
    let m = build_model(&lookup_space(Family::ComplexProj, 2).unwrap()).unwrap();
    let p = RadialParams::new(1.0, 0.0, 1.0);
    let prof = RadialProfile::new(m.desc(), p).unwrap();
    let k = VectorFunctionA::canonical(p).coefficients(&prof, 1.0).unwrap();
    assert!((k.z - 0.64805).abs() < 1e-5);
    assert_eq!(k.z1, -0.5);
    assert_eq!(k.y, 0.0);
    let a = vector_a(&m, p, 1.0).unwrap();
    let cp = m.cp().unwrap();
    assert!((m.inner(&a, m.x()) - prof.f_prime(1.0).unwrap()).abs() < 1e-13);
    assert!(m.inner(&a, &cp.y).abs() < 1e-14);
    // a' against a central difference of a
    let h = 1e-6;
    let fd = (&vector_a(&m, p, 1.0 + h).unwrap() - &vector_a(&m, p, 1.0 - h).unwrap()).scale(0.5 / h);
    let ap = vector_a_prime(&m, p, 1.0).unwrap();
    assert!((&fd - &ap).max_abs() < 1e-7);

    let s = build_model(&lookup_space(Family::Sphere, 3).unwrap()).unwrap();
    let a = vector_a(&s, RadialParams::default(), 0.5).unwrap();
    let fp = f_prime(s.desc(), RadialParams::default(), 0.5).unwrap();
    assert!((&a - &s.x().scale(fp)).max_abs() < 1e-15);
}

#[test]
fn domain_errors() {
    let d = lookup_space(Family::Sphere, 3).unwrap();
    assert!(matches!(f_prime(&d, RadialParams::default(), 0.0), Err(Error::Domain(_))));
    assert!(matches!(f_double_prime(&d, RadialParams::default(), -1.0), Err(Error::Domain(_))));
    assert!(matches!(f_prime(&d, RadialParams::new(1.0, 0.0, 0.5), 1.0), Err(Error::Parameter(_))));
}

proptest! {
    #[test]
    fn positive_profiles(
        c in 0.05f64..5.0,
        c1 in prop_oneof![Just(0.0), 0.0f64..3.0],
        cz in -3.0f64..3.0,
        pick in 0usize..6,
        x in 1e-3f64..10.0,
    ) {
        let (f, n) = [(Family::Sphere, 3), (Family::Sphere, 5), (Family::ComplexProj, 1),
                      (Family::ComplexProj, 4), (Family::QuatProj, 2), (Family::Cayley, 2)][pick];
        let d = lookup_space(f, n).unwrap();
        let cz = if f == Family::ComplexProj { cz } else { 0.0 };
        let prof = RadialProfile::new(&d, RadialParams::new(c, c1, cz)).unwrap();
        let (a, b) = (prof.f_prime(x).unwrap(), prof.f_double_prime(x).unwrap());
        prop_assert!(a > 0.0 && a.is_finite());
        prop_assert!(b > 0.0 && b.is_finite());
    }
}
