use harvest::elements::*;
use harvest::model::*;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

const TOL: f64 = 1e-10;

fn cfg(case: Case, delta: f64, a: f64, b: f64, g: f64) -> ValidatedConfig {
    validate(SetupConfig::for_case(case, delta).with(a, b, g)).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn pointlike_gaussian_zero_gap() {
    let e = compute_elements(&cfg(Case::A2, 0.0, 0.0, 2.0, 0.0), TOL).unwrap();
    let lambda: f64 = 0.01;
    assert!((e.l_aa - lambda * lambda / (4.0 * PI)).abs() < 1e-15 * e.l_aa.max(1e-300) + 1e-20);
    assert_eq!(e.l_aa, e.l_bb);
}

#[test]
fn pointlike_local_term_ignores_separation() {
    let a = compute_elements(&cfg(Case::A2, 0.0, 1.5, 0.5, 0.0), TOL).unwrap();
    let b = compute_elements(&cfg(Case::A2, 0.0, 1.5, 9.0, 0.0), TOL).unwrap();
    assert_eq!(a.l_aa, b.l_aa);
}

#[test]
fn general_route_meets_coincident_form() {
    let c = cfg(Case::A2, 0.0, 7.0, 3.0, 0.0);
    let general = m_general(&c, 1e-12).unwrap();
    let closed = -m_coincident(7.0, 3.0, c.coupling);
    assert!(rel(general, closed) < 1e-8, "{general} vs {closed}");
}

#[test]
fn far_detectors_decouple() {
    for case in [Case::A1, Case::A2, Case::A3] {
        let near = compute_elements(&cfg(case, 1.0, 1.0, 50.0, 0.0), TOL).unwrap();
        let far = compute_elements(&cfg(case, 1.0, 1.0, 100.0, 0.0), TOL).unwrap();
        assert!(far.l_ab.norm() < 1e-3 * far.l_aa && far.m.norm() < 1e-3 * far.l_aa, "{case}: {far:?}");
        assert!(far.l_ab.norm() < 0.3 * near.l_ab.norm() && far.m.norm() < 0.3 * near.m.norm(), "{case}");
    }
}

#[test]
fn coincident_large_separation_asymptotics() {
    let (alpha, lambda) = (1.0f64, 0.01f64);
    let ratio = |beta: f64| {
        let lead = lambda * lambda * (-0.5 * alpha * alpha).exp() / (4.0 * PI * beta * beta);
        m_coincident(alpha, beta, lambda).norm() / lead
    };
    let (r50, r100) = (ratio(50.0), ratio(100.0));
    assert!((r50 - 1.0).abs() < 1e-3 && (r100 - 1.0).abs() < 3e-4);
    assert!((r100 - 1.0).abs() < (r50 - 1.0).abs());
}

#[test]
fn coincident_gap_suppression() {
    let base = m_coincident(0.0, 2.0, 0.01).norm();
    for &a in &[2.0f64, 5.0, 9.0] {
        let v = m_coincident(a, 2.0, 0.01).norm();
        assert!((v / base - (-0.5 * a * a).exp()).abs() < 1e-14);
    }
}

#[test]
fn far_apart_form_agrees_with_general_route() {
    let c = cfg(Case::A1, 1.0, 2.0, 4.0, 9.0);
    let closed = m_non_overlap(2.0, 4.0, 9.0, 1.0, c.coupling);
    assert!(rel(m_general(&c, 1e-12).unwrap(), closed) < 1e-10);
}

#[test]
fn local_term_is_real_for_every_case() {
    for case in [Case::A1, Case::A3, Case::B1, Case::B2, Case::B3, Case::B4] {
        let c = cfg(case, 1.0, 1.0, 2.0, 0.5);
        let l = local_term(&c, TOL).unwrap();
        assert!(l > 0.0 && l.is_finite(), "{case}");
    }
}

#[test]
fn pointlike_continuity() {
    for (smeared, point) in [(Case::A1, Case::A2), (Case::B1, Case::B2), (Case::B3, Case::B4)] {
        let s = compute_elements(&cfg(smeared, 1e-3, 2.0, 3.0, 1.0), TOL).unwrap();
        let p = compute_elements(&cfg(point, 0.0, 2.0, 3.0, 1.0), TOL).unwrap();
        assert!((s.l_aa / p.l_aa - 1.0).abs() < 1e-4, "{smeared}");
        assert!(rel(s.l_ab, p.l_ab) < 1e-4, "{smeared}");
        assert!(rel(s.m, p.m) < 1e-4, "{smeared}");
    }
}

#[test]
fn infrared_cutoff_dependence_is_logarithmic() {
    let at = |lam: f64| {
        let mut c = SetupConfig::for_case(Case::B2, 0.0).with(0.0, 2.0, 0.0);
        c.cutoff = lam;
        local_term(&validate(c).unwrap(), TOL).unwrap()
    };
    let d1 = at(1e-4) - at(1e-3);
    let d2 = at(1e-5) - at(1e-4);
    assert!(d1 > 0.0 && (d1 / d2 - 1.0).abs() < 1e-3, "{d1} {d2}");
}

fn any_case() -> impl Strategy<Value = Case> {
    proptest::sample::select(vec![Case::A1, Case::A2, Case::A3, Case::B1, Case::B2, Case::B3, Case::B4])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cauchy_schwarz(case in any_case(), a in 0.0f64..8.0, b in 0.5f64..12.0, g in -12.0f64..12.0) {
        let e = compute_elements(&cfg(case, 1.0, a, b, g), TOL).unwrap();
        prop_assert!(e.l_aa >= 0.0);
        prop_assert!(e.l_ab.norm_sqr() <= e.l_aa * e.l_bb * (1.0 + 1e-8));
    }

    #[test]
    fn delay_reversal(case in any_case(), a in 0.0f64..8.0, b in 0.5f64..12.0, g in 0.0f64..12.0) {
        let p = compute_elements(&cfg(case, 1.0, a, b, g), TOL).unwrap();
        let m = compute_elements(&cfg(case, 1.0, a, b, -g), TOL).unwrap();
        prop_assert!((p.l_ab.norm() - m.l_ab.norm()).abs() <= 1e-8 * p.l_ab.norm() + 1e-30);
        prop_assert!((p.m.norm() - m.m.norm()).abs() <= 1e-8 * p.m.norm() + 1e-30);
    }

    #[test]
    fn coupling_enters_squared(case in any_case(), a in 0.0f64..8.0, b in 0.5f64..12.0, g in 0.0f64..12.0) {
        let c = SetupConfig::for_case(case, 1.0).with(a, b, g);
        let mut d = c;
        d.coupling *= 3.0;
        let x = compute_elements(&validate(c).unwrap(), TOL).unwrap();
        let y = compute_elements(&validate(d).unwrap(), TOL).unwrap();
        prop_assert!((y.l_aa / x.l_aa - 9.0).abs() < 1e-12);
        prop_assert!(rel(y.m, 9.0 * x.m) < 1e-12 || x.m.norm() == 0.0);
    }
}
