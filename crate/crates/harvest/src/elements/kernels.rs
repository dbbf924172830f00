//! Time integrals of the switching functions as functions of the
//! dimensionless momentum `κ`.
//!
//! Sudden switching integrals are written through `φ(x) = (e^{ix} - 1)/(ix)`
//! and its nested analogue `τ`, which stay accurate through every removable
//! point. For large `κ` the same integrals are also available as finite sums
//! of exponentials in `κ` with rational amplitudes; the quadrature tails use
//! that form.

use crate::model::Window;
use crate::specfun::{erfc, erfcx};
use num_complex::Complex64;
use std::f64::consts::{PI, SQRT_2};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const SQRT_PI: f64 = 1.772_453_850_905_516;

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// `(e^{ix} - 1)/(ix)`.
pub fn phi(x: f64) -> Complex64 {
    Complex64::new(sinc(x), (0.5 * x).sin() * sinc(0.5 * x))
}

/// `∫ₚ^q e^{iωt} dt`.
pub fn window_integral(omega: f64, p: f64, q: f64) -> Complex64 {
    let len = q - p;
    if len <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(len, omega * p) * phi(omega * len)
}

/// `∫₀¹ s^k e^{ixs} ds` for `k = 0..=n`.
fn moments(x: f64, n: usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); n + 1];
    if x.abs() < 2.0 {
        for (k, mk) in m.iter_mut().enumerate() {
            let mut term = Complex64::new(1.0, 0.0);
            let mut sum = Complex64::new(1.0 / (k as f64 + 1.0), 0.0);
            for j in 1..60 {
                term *= I * x / j as f64;
                let add = term / (k + j + 1) as f64;
                sum += add;
                if add.norm() < 1e-18 {
                    break;
                }
            }
            *mk = sum;
        }
    } else {
        let e = Complex64::new(0.0, x).exp();
        m[0] = phi(x);
        for k in 1..=n {
            m[k] = (e - k as f64 * m[k - 1]) / (I * x);
        }
    }
    m
}

/// `∫₀¹ ds₁ e^{ix s₁} ∫₀^{s₁} ds₂ e^{iy s₂}`.
pub fn tau(x: f64, y: f64) -> Complex64 {
    if y.abs() > 0.01 {
        return (phi(x + y) - phi(x)) / (I * y);
    }
    let m = moments(x, 8);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    let mut fact = 1.0;
    for n in 0..8 {
        fact *= (n + 1) as f64;
        sum += pow / fact * m[n + 1];
        pow *= I * y;
    }
    sum
}

/// `∫ₚ^q dt₁ e^{ia t₁} ∫ₚ^{t₁} dt₂ e^{ib t₂}`.
pub fn triangle(a: f64, b: f64, p: f64, q: f64) -> Complex64 {
    let len = q - p;
    if len <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(len * len, (a + b) * p) * tau(a * len, b * len)
}

/// `∫_X dt₁ e^{ia t₁} ∫_{Y, t₂<t₁} dt₂ e^{ib t₂}`.
pub fn ordered(a: f64, b: f64, x: Window, y: Window) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    let (p0, p1) = (x.on.max(y.on), x.off.min(y.off));
    if p1 > p0 {
        total += window_integral(b, y.on, p0) * window_integral(a, p0, p1);
        total += triangle(a, b, p0, p1);
    }
    let q0 = x.on.max(y.off);
    if x.off > q0 {
        total += window_integral(b, y.on, y.off) * window_integral(a, q0, x.off);
    }
    total
}

/// `S₁`: transform of a top-hat switching at frequency `κ + α`.
pub fn s1_closed(kappa: f64, alpha: f64, on: f64, off: f64) -> Complex64 {
    window_integral(kappa + alpha, on, off)
}

/// Time-ordered two-detector integral for top-hat switchings on windows `a`
/// and `b`.
pub fn s2_windows(kappa: f64, alpha: f64, a: Window, b: Window) -> Complex64 {
    let (x, y) = (alpha - kappa, alpha + kappa);
    ordered(x, y, a, b) + ordered(x, y, b, a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuddenRegime {
    Overlap,
    NonOverlap,
}

/// `S₂` with detector A on `[0, 1]` and detector B on `[γ, γ + 1]`.
pub fn s2_closed(kappa: f64, alpha: f64, gamma: f64, regime: SuddenRegime) -> Complex64 {
    debug_assert_eq!(
        regime == SuddenRegime::NonOverlap,
        gamma.abs() >= 1.0,
        "regime inconsistent with the delay"
    );
    let a = Window { on: 0.0, off: 1.0 };
    let b = Window { on: gamma, off: gamma + 1.0 };
    s2_windows(kappa, alpha, a, b)
}

/// `G₁`: transform of a Gaussian switching centred at `center`.
pub fn g1_closed(kappa: f64, alpha: f64, center: f64) -> Complex64 {
    let w = kappa + alpha;
    Complex64::from_polar(SQRT_PI * (-0.25 * w * w).exp(), w * center)
}

/// `E(κ, γ) = e^{iγκ} erfc((γ + iκ)/√2)`.
pub fn e_fn(kappa: f64, gamma: f64) -> Complex64 {
    Complex64::from_polar(1.0, gamma * kappa) * erfc(Complex64::new(gamma, kappa) / SQRT_2)
}

/// `G₂` for Gaussian switchings centred at 0 and `γ`, written so that no
/// factor overflows for large `κ` or `γ`.
pub fn g2_closed(kappa: f64, alpha: f64, gamma: f64) -> Complex64 {
    let g = gamma.abs();
    let local = Complex64::from_polar(2.0 * (-0.5 * kappa * kappa).exp(), -g * kappa);
    let w = erfcx(Complex64::new(g, kappa) / SQRT_2);
    let cross = Complex64::new(0.0, 2.0 * (-0.5 * g * g).exp() * w.im);
    Complex64::from_polar(0.5 * PI * (-0.5 * alpha * alpha).exp(), gamma * alpha) * (local + cross)
}

/// Non-overlapping limit of [`g2_closed`]: the product of the two single
/// transforms in time order.
pub fn g2_non_overlap(kappa: f64, alpha: f64, gamma: f64) -> Complex64 {
    Complex64::from_polar(
        PI * (-0.5 * (alpha * alpha + kappa * kappa)).exp(),
        gamma * alpha - gamma.abs() * kappa,
    )
}

/// `coef · (i(α-κ))^{-pa} · (i(α+κ))^{-pb} · e^{iνκ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub nu: f64,
    pub coef: Complex64,
    pub pa: i32,
    pub pb: i32,
}

impl ExpTerm {
    pub fn amplitude(&self, kappa: f64, alpha: f64) -> Complex64 {
        let ia = Complex64::new(0.0, alpha - kappa);
        let ib = Complex64::new(0.0, alpha + kappa);
        self.coef * ia.powi(-self.pa) * ib.powi(-self.pb)
    }

    pub fn eval(&self, kappa: f64, alpha: f64) -> Complex64 {
        self.amplitude(kappa, alpha) * Complex64::from_polar(1.0, self.nu * kappa)
    }

    fn times(&self, o: &ExpTerm) -> ExpTerm {
        ExpTerm {
            nu: self.nu + o.nu,
            coef: self.coef * o.coef,
            pa: self.pa + o.pa,
            pb: self.pb + o.pb,
        }
    }
}

pub fn product(x: &[ExpTerm], y: &[ExpTerm]) -> Vec<ExpTerm> {
    x.iter().flat_map(|s| y.iter().map(move |t| s.times(t))).collect()
}

fn edges(w: Window) -> [(f64, f64); 2] {
    [(w.off, 1.0), (w.on, -1.0)]
}

/// `∫_W e^{i(α+κ)t} dt` as exponential terms.
pub fn window_terms_plus(alpha: f64, w: Window) -> Vec<ExpTerm> {
    edges(w)
        .iter()
        .map(|&(t, s)| ExpTerm { nu: t, coef: Complex64::from_polar(s, alpha * t), pa: 0, pb: 1 })
        .collect()
}

/// Complex conjugate of [`window_terms_plus`] (valid for real `κ`).
pub fn window_terms_plus_conj(alpha: f64, w: Window) -> Vec<ExpTerm> {
    edges(w)
        .iter()
        .map(|&(t, s)| ExpTerm { nu: -t, coef: -Complex64::from_polar(s, -alpha * t), pa: 0, pb: 1 })
        .collect()
}

/// `∫_W e^{i(α-κ)t} dt` as exponential terms.
pub fn window_terms_minus(alpha: f64, w: Window) -> Vec<ExpTerm> {
    edges(w)
        .iter()
        .map(|&(t, s)| ExpTerm { nu: -t, coef: Complex64::from_polar(s, alpha * t), pa: 1, pb: 0 })
        .collect()
}

fn ordered_terms(alpha: f64, x: Window, y: Window) -> Vec<ExpTerm> {
    let mut out = Vec::new();
    let (p0, p1) = (x.on.max(y.on), x.off.min(y.off));
    if p1 > p0 {
        out.push(ExpTerm { nu: 0.0, coef: window_integral(2.0 * alpha, p0, p1), pa: 0, pb: 1 });
        for &(t, s) in &[(p1, -1.0), (p0, 1.0)] {
            out.push(ExpTerm {
                nu: y.on - t,
                coef: Complex64::from_polar(s, alpha * (y.on + t)),
                pa: 1,
                pb: 1,
            });
        }
    }
    let q0 = x.on.max(y.off);
    if x.off > q0 {
        let q = Window { on: q0, off: x.off };
        out.extend(product(&window_terms_plus(alpha, y), &window_terms_minus(alpha, q)));
    }
    out
}

/// [`s2_windows`] as exponential terms; exact wherever `κ ≠ ±α`.
pub fn s2_terms(alpha: f64, a: Window, b: Window) -> Vec<ExpTerm> {
    let mut t = ordered_terms(alpha, a, b);
    t.extend(ordered_terms(alpha, b, a));
    t
}

/// Collects terms by frequency, merging frequencies closer than `1e-9`.
pub fn group_by_frequency(terms: Vec<ExpTerm>) -> Vec<(f64, Vec<ExpTerm>)> {
    let mut groups: Vec<(f64, Vec<ExpTerm>)> = Vec::new();
    for t in terms {
        match groups.iter_mut().find(|(nu, _)| (nu - t.nu).abs() < 1e-9) {
            Some((_, g)) => g.push(t),
            None => groups.push((t.nu, vec![t])),
        }
    }
    groups.sort_by(|x, y| x.0.total_cmp(&y.0));
    groups
}
