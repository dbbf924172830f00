use harvest::elements::kernels::*;
use harvest::model::Window;
use harvest::specfun::erfi;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

#[path = "common/mod.rs"]
mod common;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Time-ordered Gaussian integral evaluated on the line `Im t = α/2`.
fn g2_brute(kappa: f64, alpha: f64, gamma: f64) -> Complex64 {
    let c = 0.5 * alpha;
    let lo = gamma.min(0.0) - 9.0;
    let hi = gamma.max(0.0) + 9.0;
    let chi = |t: Complex64, center: f64| (-(t - center) * (t - center)).exp();
    let mut total = Complex64::new(0.0, 0.0);
    for (cx, cy) in [(0.0, gamma), (gamma, 0.0)] {
        let outer = |s1: f64| {
            let t1 = Complex64::new(s1, c);
            let inner = common::integrate_c(
                |s2| {
                    let t2 = Complex64::new(s2, c);
                    chi(t2, cy) * (I * (alpha + kappa) * t2).exp()
                },
                lo,
                s1,
                40,
            );
            chi(t1, cx) * (I * (alpha - kappa) * t1).exp() * inner
        };
        total += common::integrate_c(outer, lo, hi, 60);
    }
    total
}

/// Top-hat time-ordered integral with `t₁` restricted to `[p, q]`.
fn s2_brute_piece(kappa: f64, alpha: f64, a: Window, b: Window, p: f64, q: f64) -> Complex64 {
    let (x, y) = (alpha - kappa, alpha + kappa);
    let inside = |w: Window, t: f64| t >= w.on && t <= w.off;
    let inner = |w: Window, t1: f64| {
        let end = t1.min(w.off);
        if end <= w.on {
            Complex64::new(0.0, 0.0)
        } else {
            common::integrate_c(|t2| (I * y * t2).exp(), w.on, end, 4)
        }
    };
    let f = |t1: f64| {
        let mut v = Complex64::new(0.0, 0.0);
        if inside(a, t1) {
            v += inner(b, t1);
        }
        if inside(b, t1) {
            v += inner(a, t1);
        }
        v * (I * x * t1).exp()
    };
    let mut cuts = vec![p, q];
    cuts.extend([a.on, a.off, b.on, b.off].into_iter().filter(|&c| c > p && c < q));
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|w| common::integrate_c(&f, w[0], w[1], 4)).sum()
}

#[test]
fn g1_at_origin() {
    let v = g1_closed(0.0, 0.0, 0.0);
    assert!((v - Complex64::new(PI.sqrt(), 0.0)).norm() < 1e-15);
}

#[test]
fn g1_against_time_quadrature() {
    let (k, a, c) = (1.0, 2.0, 0.5);
    let brute = common::integrate_c(|t| (-(t - c) * (t - c)).exp() * (I * (k + a) * t).exp(), c - 9.0, c + 9.0, 40);
    assert!(rel(g1_closed(k, a, c), brute) < 1e-10);
}

#[test]
fn g2_coincident_form() {
    for &(k, a) in &[(0.0f64, 0.0f64), (1.0, 2.0), (3.5, 7.0)] {
        let direct = PI * (-0.5 * (a * a + k * k)).exp() * (1.0 - I * erfi(Complex64::new(k / 2f64.sqrt(), 0.0)));
        assert!(rel(g2_closed(k, a, 0.0), direct) < 1e-13, "k={k} a={a}");
    }
}

#[test]
fn g2_against_nested_time_quadrature() {
    let brute = g2_brute(1.5, 7.0, 3.0);
    let closed = g2_closed(1.5, 7.0, 3.0);
    assert!(rel(closed, brute) < 1e-8, "{closed} vs {brute}");
}

#[test]
fn g2_far_apart_factorizes() {
    for &k in &[0.0, 0.7, 2.0, 5.0] {
        let r = rel(g2_closed(k, 3.0, 10.0), g2_non_overlap(k, 3.0, 10.0));
        assert!(r < 1e-10, "k={k}: {r:e}");
    }
}

#[test]
fn e_fn_at_zero_delay() {
    let k = 1.3;
    let expect = 1.0 - I * erfi(Complex64::new(k / 2f64.sqrt(), 0.0));
    assert!(rel(e_fn(k, 0.0), expect) < 1e-14);
}

#[test]
fn s1_resonant_limit() {
    assert!((s1_closed(0.0, 0.0, 0.3, 1.7) - Complex64::new(1.4, 0.0)).norm() < 1e-15);
    assert!((s1_closed(2.0, -2.0, -0.5, 0.5) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn s1_against_time_quadrature() {
    let brute = common::integrate_c(|t| (I * 3.0 * t).exp(), 0.0, 1.0, 4);
    assert!(rel(s1_closed(2.0, 1.0, 0.0, 1.0), brute) < 1e-13);
}

#[test]
fn s2_overlap_is_twice_triangle() {
    let (k, a) = (1.2, 2.5);
    let brute = common::nested(|t| (I * (a - k) * t).exp(), |t| (I * (a + k) * t).exp(), 0.0, 1.0, 6);
    let closed = s2_closed(k, a, 0.0, SuddenRegime::Overlap);
    assert!(rel(closed, 2.0 * brute) < 1e-12, "{closed} vs {brute}");
}

#[test]
fn s2_resonant_point_non_overlap() {
    let (a, g) = (2.0, 1.5);
    let at = s2_closed(a, a, g, SuddenRegime::NonOverlap);
    assert!(at.re.is_finite() && at.im.is_finite());
    let h = 1e-3;
    let mid = 0.5 * (s2_closed(a + h, a, g, SuddenRegime::NonOverlap) + s2_closed(a - h, a, g, SuddenRegime::NonOverlap));
    assert!((at - mid).norm() < 10.0 * h * h);
    let wa = Window { on: 0.0, off: 1.0 };
    let wb = Window { on: g, off: g + 1.0 };
    let brute = s2_brute_piece(a, a, wa, wb, 0.0, g + 1.0);
    assert!(rel(at, brute) < 1e-10);
}

#[test]
fn s2_region_split_sum() {
    let (k, a, g) = (1.0, 2.0, 0.4);
    let wa = Window { on: 0.0, off: 1.0 };
    let wb = Window { on: g, off: g + 1.0 };
    let leading = s2_brute_piece(k, a, wa, wb, 0.0, g);
    let trailing = s2_brute_piece(k, a, wa, wb, 1.0, g + 1.0);
    let shared = s2_brute_piece(k, a, wa, wb, g, 1.0);
    let closed = s2_closed(k, a, g, SuddenRegime::Overlap);
    assert!(rel(closed, leading + trailing + shared) < 1e-10);
}

#[test]
fn s2_term_expansion_matches_closed_form() {
    let wa = Window { on: -0.5, off: 0.5 };
    let wb = Window { on: 2.5, off: 3.5 };
    let terms = s2_terms(1.5, wa, wb);
    for &k in &[0.3, 4.0, 17.0] {
        let sum: Complex64 = terms.iter().map(|t| t.eval(k, 1.5)).sum();
        assert!(rel(sum, s2_windows(k, 1.5, wa, wb)) < 1e-10, "k={k}");
    }
}

#[test]
fn phi_removable_point() {
    assert_eq!(phi(0.0), Complex64::new(1.0, 0.0));
    let near = phi(1e-7);
    assert!((near - Complex64::new(1.0, 0.5e-7)).norm() < 1e-13);
}

/// The sudden non-overlap kernel `(e^{i(α-κ)}-1)(e^{i(α+κ)}-1)/(κ²-α²)`
/// written through `φ`.
fn sudden_factor(k: f64, a: f64) -> Complex64 {
    phi(a - k) * phi(a + k)
}

#[test]
fn sudden_factor_has_no_spike() {
    let a = 3.0;
    let at = sudden_factor(a, a);
    let direct = |k: f64| ((I * (a - k)).exp() - 1.0) * ((I * (a + k)).exp() - 1.0) / (k * k - a * a);
    let h = 1e-6;
    for k in [a - h, a + h] {
        assert!((direct(k) - at).norm() < 1e-5, "{} vs {at}", direct(k));
        assert!((sudden_factor(k, a) - at).norm() < 1e-5);
    }
}

proptest! {
    #[test]
    fn g1_modulus(k in 0.0f64..10.0, a in -3.0f64..8.0, c in -5.0f64..5.0) {
        let v = g1_closed(k, a, c);
        let m = v * v.conj();
        prop_assert!(m.im.abs() < 1e-16);
        prop_assert!((m.re - PI * (-0.5 * (k + a).powi(2)).exp()).abs() <= 1e-14 * m.re.max(1e-300));
    }

    #[test]
    fn s1_translation_invariant(k in 0.0f64..20.0, a in 0.0f64..8.0, on in -5.0f64..5.0, shift in -10.0f64..10.0) {
        let x = s1_closed(k, a, on, on + 1.0).norm_sqr();
        let y = s1_closed(k, a, on + shift, on + shift + 1.0).norm_sqr();
        prop_assert!((x - y).abs() <= 1e-12 * x.max(1e-12));
    }

    #[test]
    fn g2_finite_everywhere(k in 0.0f64..200.0, a in 0.0f64..8.0, g in -30.0f64..30.0) {
        let v = g2_closed(k, a, g);
        prop_assert!(v.re.is_finite() && v.im.is_finite());
    }
}
