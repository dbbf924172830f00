//! Second-order density-matrix elements `L_AA`, `L_BB`, `L_AB` and `M`.
//!
//! Every element is a radial momentum integral of a switching kernel. In
//! 3+1 dimensions
//!
//! ```text
//! L_AA = λ²/(4π²)  ∫ κ e^{-δ²κ²/2} |Ĉ_A|²
//! L_AB = λ²/(4π²β) ∫ sin(βκ) e^{-δ²κ²/2} Ĉ_A Ĉ_B*
//! M    = -λ²/(4π²β) ∫ sin(βκ) e^{-δ²κ²/2} G₂
//! ```
//!
//! and in 1+1 dimensions the weight becomes `e^{iβκ}/(4π|κ|)` over
//! `|κ| > Λ`. Closed forms are used where they exist.

pub mod kernels;

use crate::error::Result;
use crate::model::{Dimension, SwitchingProfile, ValidatedConfig, Window};
use crate::quadrature::{integrate, Axis, Domain, Envelope, IntegrandSpec, Tail, TailTerm, TRUNCATION_EPS};
use crate::specfun::{dawson, erfcx, faddeeva_w};
use kernels::{
    g2_closed, group_by_frequency, product, s2_terms, s2_windows, window_integral, window_terms_plus,
    window_terms_plus_conj, ExpTerm,
};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

const SQRT_PI: f64 = 1.772_453_850_905_516;
/// Gaussian envelopes that would need panels beyond this momentum are
/// integrated with an explicit tail instead.
const MAX_GAUSSIAN_REACH: f64 = 60.0;
/// Start of the tail for Gaussian switchings, where `e^{-κ²/2} < 1e-21`.
const GAUSSIAN_SWITCHING_TAIL: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatrixElements {
    pub l_aa: f64,
    pub l_bb: f64,
    pub l_ab: Complex64,
    pub m: Complex64,
}

impl MatrixElements {
    pub fn zero() -> Self {
        MatrixElements {
            l_aa: 0.0,
            l_bb: 0.0,
            l_ab: Complex64::new(0.0, 0.0),
            m: Complex64::new(0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Element {
    Laa,
    Lab,
    M,
}

pub fn compute_elements(cfg: &ValidatedConfig, tol: f64) -> Result<MatrixElements> {
    let l_aa = local_term(cfg, tol)?;
    let l_ab = nonlocal_term(cfg, tol)?;
    let m = pair_term(cfg, tol)?;
    Ok(MatrixElements { l_aa, l_bb: l_aa, l_ab, m })
}

fn gaussian_3d(cfg: &ValidatedConfig) -> bool {
    cfg.dimension == Dimension::ThreePlusOne && cfg.switching == SwitchingProfile::Gaussian
}

pub fn local_term(cfg: &ValidatedConfig, tol: f64) -> Result<f64> {
    if gaussian_3d(cfg) {
        return Ok(l_aa_gaussian(cfg.alpha, cfg.delta(), cfg.coupling));
    }
    Ok(integrate_element(cfg, Element::Laa, tol)?.re)
}

pub fn nonlocal_term(cfg: &ValidatedConfig, tol: f64) -> Result<Complex64> {
    if gaussian_3d(cfg) {
        return Ok(l_ab_gaussian(cfg.alpha, cfg.beta, cfg.gamma, cfg.delta(), cfg.coupling));
    }
    integrate_element(cfg, Element::Lab, tol)
}

pub fn pair_term(cfg: &ValidatedConfig, tol: f64) -> Result<Complex64> {
    if gaussian_3d(cfg) {
        if cfg.switchings_disjoint() {
            return Ok(m_non_overlap(cfg.alpha, cfg.beta, cfg.gamma, cfg.delta(), cfg.coupling));
        }
        if cfg.gamma == 0.0 && cfg.delta() == 0.0 {
            return Ok(-m_coincident(cfg.alpha, cfg.beta, cfg.coupling));
        }
    }
    m_general(cfg, tol)
}

/// `M` by quadrature of the full switching kernel, whatever the regime.
pub fn m_general(cfg: &ValidatedConfig, tol: f64) -> Result<Complex64> {
    integrate_element(cfg, Element::M, tol)
}

/// Closed form of `L_AA` for Gaussian switching in 3+1 dimensions; `δ = 0`
/// gives the pointlike value.
pub fn l_aa_gaussian(alpha: f64, delta: f64, lambda: f64) -> f64 {
    let a = 1.0 + delta * delta;
    let s = (2.0 * a).sqrt();
    let ex = erfcx(Complex64::new(alpha / s, 0.0)).re;
    lambda * lambda * (-0.5 * alpha * alpha).exp() / (8.0 * PI * a)
        * (2.0 - (2.0 * PI).sqrt() * alpha * ex / a.sqrt())
}

/// `∫₀^∞ sin(βκ) e^{-aκ²/2 + iuκ}`-type combination through `w`.
fn sine_gauss(beta: f64, shift: Complex64, a: f64) -> Complex64 {
    let s = (2.0 * a).sqrt();
    let plus = faddeeva_w((Complex64::new(beta, 0.0) + shift) / s);
    let minus = faddeeva_w((Complex64::new(-beta, 0.0) + shift) / s);
    (PI / (2.0 * a)).sqrt() * (plus - minus) / Complex64::new(0.0, 2.0)
}

pub fn l_ab_gaussian(alpha: f64, beta: f64, gamma: f64, delta: f64, lambda: f64) -> Complex64 {
    let a = 1.0 + delta * delta;
    let pre = Complex64::from_polar(lambda * lambda * (-0.5 * alpha * alpha).exp() / (4.0 * PI * beta), -alpha * gamma);
    pre * sine_gauss(beta, Complex64::new(-gamma, alpha), a)
}

/// `M` for Gaussian switchings whose overlap is neglected.
pub fn m_non_overlap(alpha: f64, beta: f64, gamma: f64, delta: f64, lambda: f64) -> Complex64 {
    let a = 1.0 + delta * delta;
    let pre = Complex64::from_polar(lambda * lambda * (-0.5 * alpha * alpha).exp() / (4.0 * PI * beta), alpha * gamma);
    -pre * sine_gauss(beta, Complex64::new(-gamma.abs(), 0.0), a)
}

/// Pointlike, coincident Gaussian switchings. The returned value has the
/// opposite overall sign to `M` as produced by [`compute_elements`].
pub fn m_coincident(alpha: f64, beta: f64, lambda: f64) -> Complex64 {
    let x = beta / std::f64::consts::SQRT_2;
    let pre = lambda * lambda * (-0.5 * alpha * alpha).exp() / (4.0 * (2.0 * PI).sqrt() * beta);
    pre * Complex64::new(2.0 / SQRT_PI * dawson(x), -(-0.5 * beta * beta).exp())
}

fn prefactor(cfg: &ValidatedConfig, el: Element) -> f64 {
    let l2 = cfg.coupling * cfg.coupling;
    match (cfg.dimension, el) {
        (Dimension::ThreePlusOne, Element::Laa) => l2 / (4.0 * PI * PI),
        (Dimension::ThreePlusOne, Element::Lab) => l2 / (4.0 * PI * PI * cfg.beta),
        (Dimension::ThreePlusOne, Element::M) => -l2 / (4.0 * PI * PI * cfg.beta),
        (Dimension::OnePlusOne, Element::M) => -l2 / (4.0 * PI),
        (Dimension::OnePlusOne, _) => l2 / (4.0 * PI),
    }
}

/// Switching-dependent factor of the integrand at `κ ≥ 0`.
pub(crate) fn switching_factor(cfg: &ValidatedConfig, el: Element, k: f64) -> Complex64 {
    let alpha = cfg.alpha;
    match cfg.switching {
        SwitchingProfile::Gaussian => match el {
            Element::Laa => Complex64::new(PI * (-0.5 * (k + alpha).powi(2)).exp(), 0.0),
            Element::Lab => Complex64::from_polar(PI * (-0.5 * (k + alpha).powi(2)).exp(), -(k + alpha) * cfg.gamma),
            Element::M => g2_closed(k, alpha, cfg.gamma),
        },
        SwitchingProfile::Sudden => {
            let (a, b) = cfg.windows();
            match el {
                Element::Laa => Complex64::new(window_integral(k + alpha, a.on, a.off).norm_sqr(), 0.0),
                Element::Lab => window_integral(k + alpha, a.on, a.off) * window_integral(k + alpha, b.on, b.off).conj(),
                Element::M => s2_windows(k, alpha, a, b),
            }
        }
    }
}

/// Radial weight: the non-switching part of the integrand, in folded form
/// for 1+1 dimensions (`κ > 0`, both signs summed).
fn folded_weight(cfg: &ValidatedConfig, el: Element, k: f64) -> f64 {
    let d = cfg.delta();
    let env = (-0.5 * d * d * k * k).exp();
    match (cfg.dimension, el) {
        (Dimension::ThreePlusOne, Element::Laa) => k * env,
        (Dimension::ThreePlusOne, _) => (cfg.beta * k).sin() * env,
        (Dimension::OnePlusOne, Element::Laa) => 2.0 * env / k,
        (Dimension::OnePlusOne, _) => 2.0 * (cfg.beta * k).cos() * env / k,
    }
}

/// Oscillating part of the weight as `(frequency, coefficient)` pairs, and
/// the remaining smooth amplitude.
fn weight_parts(cfg: &ValidatedConfig, el: Element) -> (Vec<(f64, Complex64)>, Box<dyn Fn(f64) -> f64>) {
    let d = cfg.delta();
    let beta = cfg.beta;
    let env = move |k: f64| (-0.5 * d * d * k * k).exp();
    match (cfg.dimension, el) {
        (Dimension::ThreePlusOne, Element::Laa) => (vec![(0.0, Complex64::new(1.0, 0.0))], Box::new(move |k| k * env(k))),
        (Dimension::ThreePlusOne, _) => (
            vec![(beta, Complex64::new(0.0, -0.5)), (-beta, Complex64::new(0.0, 0.5))],
            Box::new(env),
        ),
        (Dimension::OnePlusOne, Element::Laa) => (vec![(0.0, Complex64::new(1.0, 0.0))], Box::new(move |k| 2.0 * env(k) / k)),
        (Dimension::OnePlusOne, _) => (
            vec![(beta, Complex64::new(1.0, 0.0)), (-beta, Complex64::new(1.0, 0.0))],
            Box::new(move |k| env(k) / k),
        ),
    }
}

fn sudden_terms(cfg: &ValidatedConfig, el: Element) -> Vec<ExpTerm> {
    let (a, b): (Window, Window) = cfg.windows();
    let alpha = cfg.alpha;
    match el {
        Element::Laa => product(&window_terms_plus(alpha, a), &window_terms_plus_conj(alpha, a)),
        Element::Lab => product(&window_terms_plus(alpha, a), &window_terms_plus_conj(alpha, b)),
        Element::M => s2_terms(alpha, a, b),
    }
}

fn gaussian_reach(a: f64) -> f64 {
    (2.0 * (1.0 / TRUNCATION_EPS).ln() / a).sqrt()
}

fn integrate_element(cfg: &ValidatedConfig, el: Element, tol: f64) -> Result<Complex64> {
    let c = *cfg;
    let d = cfg.delta();
    let alpha = cfg.alpha;
    let one_d = cfg.dimension == Dimension::OnePlusOne;

    let kernel = move |x: f64| {
        let k = x.abs();
        let f = switching_factor(&c, el, k);
        if one_d {
            let env = (-0.5 * d * d * k * k).exp() / k;
            return match el {
                Element::Laa => f * env,
                _ => f * Complex64::from_polar(env, c.beta * x),
            };
        }
        f * folded_weight(&c, el, k)
    };

    let gaussian_l = cfg.switching == SwitchingProfile::Gaussian && el != Element::M;
    let frequency = cfg.beta + cfg.gamma.abs() + 1.0;
    let domain = if one_d { Domain::BilateralCutoff(cfg.cutoff) } else { Domain::SemiInfinite(0.0) };
    let singular_points = if cfg.switching == SwitchingProfile::Sudden && alpha > 0.0 { vec![alpha] } else { vec![] };

    let (envelope, tail) = if gaussian_l {
        (Envelope::Gaussian { a: 1.0 + d * d, peak: -alpha }, None)
    } else if d > 0.0 && gaussian_reach(d * d) <= MAX_GAUSSIAN_REACH {
        (Envelope::Gaussian { a: d * d, peak: 0.0 }, None)
    } else {
        (Envelope::Polynomial(1.0), Some(build_tail(cfg, el)))
    };

    let spec = IntegrandSpec {
        kernel: &kernel,
        axis: Axis { domain, singular_points, envelope, frequency },
        tail,
    };
    let r = integrate(&spec, tol)?;
    Ok(r.value * prefactor(cfg, el))
}

fn build_tail<'a>(cfg: &ValidatedConfig, el: Element) -> Tail<'a> {
    let c = *cfg;
    let alpha = cfg.alpha;
    let (osc, smooth) = weight_parts(cfg, el);
    let smooth: std::rc::Rc<dyn Fn(f64) -> f64> = std::rc::Rc::from(smooth);
    match cfg.switching {
        SwitchingProfile::Gaussian => {
            let terms = osc
                .into_iter()
                .map(|(omega, coef)| {
                    let smooth = smooth.clone();
                    TailTerm {
                        omega,
                        amplitude: Box::new(move |k: f64| coef * smooth(k) * switching_factor(&c, el, k)),
                    }
                })
                .collect();
            Tail { start: GAUSSIAN_SWITCHING_TAIL, terms }
        }
        SwitchingProfile::Sudden => {
            let base = sudden_terms(cfg, el);
            let mut shifted = Vec::new();
            for (omega, coef) in &osc {
                for t in &base {
                    shifted.push(ExpTerm { nu: t.nu + omega, coef: t.coef * coef, ..*t });
                }
            }
            let terms = group_by_frequency(shifted)
                .into_iter()
                .map(|(nu, group)| {
                    let smooth = smooth.clone();
                    TailTerm {
                        omega: nu,
                        amplitude: Box::new(move |k: f64| {
                            let s: Complex64 = group.iter().map(|t| t.amplitude(k, alpha)).sum();
                            s * smooth(k)
                        }),
                    }
                })
                .collect();
            Tail { start: alpha.abs() + 4.0, terms }
        }
    }
}
