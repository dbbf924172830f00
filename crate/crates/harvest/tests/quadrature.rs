use harvest::quadrature::*;
use harvest::specfun::dawson;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn gaussian_axis(a: f64, frequency: f64) -> Axis {
    Axis::semi_infinite(0.0, Envelope::Gaussian { a, peak: 0.0 }, frequency)
}

fn run(f: &dyn Fn(f64) -> Complex64, axis: Axis, tol: f64) -> QuadResult {
    integrate(&IntegrandSpec { kernel: f, axis, tail: None }, tol).unwrap()
}

#[test]
fn half_gaussian() {
    let r = run(&|k| c((-k * k).exp()), gaussian_axis(2.0, 0.0), 1e-12);
    assert!((r.value.re - PI.sqrt() / 2.0).abs() < 1e-14);
    assert!(r.abs_error_estimate >= 0.0);
    assert!(r.evaluations > 0);
}

#[test]
fn damped_sine_against_dawson() {
    for &beta in &[0.5, 2.0, 9.0] {
        let r = run(&|k| c((beta * k).sin() * (-0.5 * k * k).exp()), gaussian_axis(1.0, beta), 1e-12);
        let expect = 2f64.sqrt() * dawson(beta / 2f64.sqrt());
        assert!((r.value.re - expect).abs() <= 1e-12 * expect.abs().max(1e-14), "beta={beta}");
    }
}

#[test]
fn separable_double() {
    let axis = gaussian_axis(2.0, 0.0);
    let r = integrate_double(&|k, q| c((-k * k - q * q).exp()), &axis, &axis, 1e-11).unwrap();
    assert!((r.value.re - PI / 4.0).abs() < 1e-12);
}

#[test]
fn zero_kernel() {
    let axis = gaussian_axis(1.0, 1.0);
    let r = integrate_double(&|_, _| c(0.0), &axis, &axis, 1e-10).unwrap();
    assert_eq!(r.value, c(0.0));
    assert_eq!(r.abs_error_estimate, 0.0);
}

#[test]
fn rejects_bad_tolerance() {
    let f = |k: f64| c((-k * k).exp());
    assert!(integrate(&IntegrandSpec { kernel: &f, axis: gaussian_axis(2.0, 0.0), tail: None }, 0.0).is_err());
}

#[test]
fn bilateral_cutoff_folds() {
    // ∫_{|κ|>Λ} e^{-κ²}/|κ| dκ = E₁(Λ²)
    let lambda: f64 = 1e-3;
    let f = |k: f64| c((-k * k).exp() / k.abs());
    let axis = Axis {
        domain: Domain::BilateralCutoff(lambda),
        singular_points: Vec::new(),
        envelope: Envelope::Gaussian { a: 2.0, peak: 0.0 },
        frequency: 0.0,
    };
    let r = integrate(&IntegrandSpec { kernel: &f, axis, tail: None }, 1e-12).unwrap();
    let x = lambda * lambda;
    // E₁(x) = -γ_E - ln x + x - x²/4 + ...
    let e1 = -0.577_215_664_901_532_9 - x.ln() + x - x * x / 4.0;
    assert!((r.value.re - e1).abs() < 1e-10, "{} vs {e1}", r.value.re);
}

#[test]
fn truncation_is_sound() {
    let a = 1.5;
    let f = |k: f64| Complex64::from_polar((-0.5 * a * k * k).exp(), 3.0 * k);
    let base = run(&f, gaussian_axis(a, 3.0), 1e-12).value;
    let kmax = (2.0 * (1.0f64 / 1e-16).ln() / a).sqrt();
    let wide = integrate(
        &IntegrandSpec {
            kernel: &f,
            axis: Axis {
                domain: Domain::Finite(0.0, 2.0 * kmax),
                singular_points: Vec::new(),
                envelope: Envelope::Polynomial(0.0),
                frequency: 3.0,
            },
            tail: None,
        },
        1e-12,
    )
    .unwrap()
    .value;
    assert!((base - wide).norm() < 1e-12);
}

#[test]
fn singular_point_split() {
    let a: f64 = 2.0;
    let f = |k: f64| {
        if (k - a).abs() < 1e-300 {
            Complex64::new(0.0, 1.0)
        } else {
            (Complex64::new(0.0, k - a).exp() - 1.0) / (k - a) * (-k * k).exp()
        }
    };
    let with = run(&f, gaussian_axis(2.0, 1.0).with_singular_points(vec![a]), 1e-12).value;
    let without = run(&f, gaussian_axis(2.0, 1.0), 1e-12).value;
    assert!((with - without).norm() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn linearity(a in -3.0f64..3.0, b in -3.0f64..3.0, w in 0.0f64..6.0, s in 0.5f64..3.0) {
        let f = |k: f64| Complex64::from_polar((-s * k * k).exp(), w * k);
        let g = |k: f64| c(k * (-k * k).exp());
        let axis = gaussian_axis(2.0 * s.min(1.0), w);
        let tol = 1e-11;
        let lhs = run(&|k| a * f(k) + b * g(k), axis.clone(), tol).value;
        let rhs = a * run(&f, axis.clone(), tol).value + b * run(&g, axis, tol).value;
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn gaussian_moments(a in 0.2f64..5.0) {
        let r = run(&|k| c((-0.5 * a * k * k).exp()), gaussian_axis(a, 0.0), 1e-12);
        let expect = (PI / (2.0 * a)).sqrt();
        prop_assert!((r.value.re - expect).abs() <= 1e-12 * expect);
    }
}
