//! Brute-force reference values for `L_μν` and `M`.
//!
//! Nothing here uses a closed switching transform. For every momentum sample
//! the time integrals (single for `L`, time-ordered double for `M`) are done
//! with composite Gauss–Legendre panels; the nested inner integral comes from
//! the spectral integration matrix of the same nodes. Gaussian switchings are
//! integrated along `Im τ = α/2`, which pulls the common `e^{-α²/2}` out of
//! the integrand. The momentum integral then runs through the ordinary
//! adaptive engine.
//!
//! This is slow on purpose and meant for tests.

use crate::error::{Error, Result};
use crate::model::{Dimension, SwitchingProfile, ValidatedConfig};
use crate::quadrature::{integrate, Axis, Domain, Envelope, IntegrandSpec, Tail, TailTerm, TRUNCATION_EPS};
use num_complex::Complex64;
use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

const NODES: usize = 20;
/// Gaussian switchings are cut at `|τ - centre| = 8`.
const GAUSSIAN_SUPPORT: f64 = 8.0;
/// Beyond this momentum a Gaussian switching kernel has lost its local part
/// (`e^{-κ²/2} < 1e-21`) and varies slowly.
const SWITCHING_TAIL: f64 = 10.0;
const MAX_REACH: f64 = 60.0;
/// Truncation points for kernels with neither envelope nor usable tail.
const RICHARDSON_CUTS: [f64; 3] = [100.0, 200.0, 400.0];

pub const DEFAULT_INNER_TOL: f64 = 1e-12;
pub const DEFAULT_OUTER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detector {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub value: Complex64,
    pub inner_tol: f64,
    pub outer_tol: f64,
}

/// Gauss–Legendre nodes on `[-1, 1]` with weights and the matrix
/// `S[j][k] = ∫_{-1}^{x_j} ℓ_k`.
struct Rule {
    x: [f64; NODES],
    w: [f64; NODES],
    s: [[f64; NODES]; NODES],
}

fn legendre_all(x: f64, n: usize) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n > 0 {
        p[1] = x;
    }
    for m in 1..n {
        p[m + 1] = ((2 * m + 1) as f64 * x * p[m] - m as f64 * p[m - 1]) / (m + 1) as f64;
    }
    p
}

impl Rule {
    fn new() -> Self {
        let n = NODES;
        let mut x = [0.0; NODES];
        let mut w = [0.0; NODES];
        for i in 0..n {
            let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let p = legendre_all(t, n);
                let dp = n as f64 * (t * p[n] - p[n - 1]) / (t * t - 1.0);
                let dt = p[n] / dp;
                t -= dt;
                if dt.abs() < 1e-16 {
                    break;
                }
            }
            let p = legendre_all(t, n);
            let dp = n as f64 * (t * p[n] - p[n - 1]) / (t * t - 1.0);
            x[n - 1 - i] = t;
            w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
        let mut s = [[0.0; NODES]; NODES];
        let pk: Vec<Vec<f64>> = x.iter().map(|&t| legendre_all(t, n)).collect();
        for j in 0..n {
            let p = &pk[j];
            let mut q = vec![0.0; n];
            q[0] = x[j] + 1.0;
            for m in 1..n {
                q[m] = (p[m + 1] - p[m - 1]) / (2 * m + 1) as f64;
            }
            for k in 0..n {
                s[j][k] = w[k] * (0..n).map(|m| (m as f64 + 0.5) * pk[k][m] * q[m]).sum::<f64>();
            }
        }
        Rule { x, w, s }
    }
}

#[derive(Debug, Clone, Copy)]
enum Profile {
    Gaussian { center: f64 },
    TopHat { on: f64, off: f64 },
}

impl Profile {
    fn support(&self) -> (f64, f64) {
        match *self {
            Profile::Gaussian { center } => (center - GAUSSIAN_SUPPORT, center + GAUSSIAN_SUPPORT),
            Profile::TopHat { on, off } => (on, off),
        }
    }

    fn shift(&self, alpha: f64) -> f64 {
        match self {
            Profile::Gaussian { .. } => 0.5 * alpha,
            Profile::TopHat { .. } => 0.0,
        }
    }

    /// `χ(s + iy) e^{iω(s + iy)}` without the factor `e^{y² - ωy}` (Gaussian)
    /// along the line `Im τ = y`.
    fn scaled(&self, s: f64, omega: f64, y: f64) -> Complex64 {
        match *self {
            Profile::Gaussian { center } => {
                let u = s - center;
                Complex64::new(-u * u, (omega - 2.0 * y) * s + 2.0 * y * center).exp()
            }
            Profile::TopHat { .. } => Complex64::new(0.0, omega * s).exp(),
        }
    }

    fn log_scale(&self, omega: f64, y: f64) -> f64 {
        match self {
            Profile::Gaussian { .. } => y * y - omega * y,
            Profile::TopHat { .. } => 0.0,
        }
    }

    /// Oscillation frequency left on the integration line.
    fn line_frequency(&self, omega: f64, y: f64) -> f64 {
        (omega - 2.0 * y).abs()
    }
}

struct TimeDomain {
    rule: Rule,
    theta: f64,
}

impl TimeDomain {
    fn new(inner_tol: f64) -> Self {
        let theta = (8.0 * (inner_tol / 1e-12).powf(0.05)).clamp(2.0, 12.0);
        TimeDomain { rule: Rule::new(), theta }
    }

    fn step(&self, p: &Profile, freq: f64) -> f64 {
        let base: f64 = match p {
            Profile::Gaussian { .. } => 0.5,
            Profile::TopHat { .. } => 1.0,
        };
        base.min(self.theta / freq.max(1e-300))
    }

    /// `∫ χ(τ) e^{iωτ} dτ`.
    fn transform(&self, p: Profile, omega: f64, alpha: f64) -> Complex64 {
        let y = p.shift(alpha);
        let (lo, hi) = p.support();
        let h = self.step(&p, p.line_frequency(omega, y));
        let panels = ((hi - lo) / h).ceil().max(1.0) as usize;
        let hh = 0.5 * (hi - lo) / panels as f64;
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..panels {
            let mid = lo + (2 * i + 1) as f64 * hh;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..NODES {
                acc += self.rule.w[j] * p.scaled(mid + hh * self.rule.x[j], omega, y);
            }
            total += acc * hh;
        }
        total * p.log_scale(omega, y).exp()
    }

    /// `∫ dτ₁ χ_x(τ₁) e^{iaτ₁} ∫_{τ₂<τ₁} dτ₂ χ_y(τ₂) e^{ibτ₂}`.
    fn ordered(&self, px: Profile, py: Profile, a: f64, b: f64, alpha: f64) -> Complex64 {
        let y = px.shift(alpha);
        let (x0, x1) = px.support();
        let (y0, y1) = py.support();
        let mut edges = vec![x0, x1, y0, y1];
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let freq = px.line_frequency(a, y).max(py.line_frequency(b, y));
        let h = self.step(&px, freq);
        let rule = &self.rule;
        let mut running = Complex64::new(0.0, 0.0);
        let mut total = Complex64::new(0.0, 0.0);
        let mut g = [Complex64::new(0.0, 0.0); NODES];
        for seg in edges.windows(2) {
            let (lo, hi) = (seg[0], seg[1]);
            let mid = 0.5 * (lo + hi);
            let in_x = mid > x0 && mid < x1;
            let in_y = mid > y0 && mid < y1;
            if !in_x && !in_y {
                continue;
            }
            let panels = ((hi - lo) / h).ceil().max(1.0) as usize;
            let hh = 0.5 * (hi - lo) / panels as f64;
            for i in 0..panels {
                let c = lo + (2 * i + 1) as f64 * hh;
                let mut gsum = Complex64::new(0.0, 0.0);
                for k in 0..NODES {
                    g[k] = if in_y { py.scaled(c + hh * rule.x[k], b, y) } else { Complex64::new(0.0, 0.0) };
                    gsum += rule.w[k] * g[k];
                }
                if in_x {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..NODES {
                        let mut partial = Complex64::new(0.0, 0.0);
                        for k in 0..NODES {
                            partial += rule.s[j][k] * g[k];
                        }
                        let f = px.scaled(c + hh * rule.x[j], a, y);
                        acc += rule.w[j] * f * (running + partial * hh);
                    }
                    total += acc * hh;
                }
                running += gsum * hh;
            }
        }
        total * (px.log_scale(a, y) + py.log_scale(b, y)).exp()
    }
}

fn profiles(cfg: &ValidatedConfig) -> (Profile, Profile) {
    match cfg.switching {
        SwitchingProfile::Gaussian => (Profile::Gaussian { center: 0.0 }, Profile::Gaussian { center: cfg.gamma }),
        SwitchingProfile::Sudden => {
            let (a, b) = cfg.windows();
            (Profile::TopHat { on: a.on, off: a.off }, Profile::TopHat { on: b.on, off: b.off })
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Pairing {
    Same,
    Different,
}

/// Radial weight on `κ > 0`, with both signs of `κ` summed in 1+1
/// dimensions, split as `Σ c e^{iωκ} · smooth(κ)`.
fn weight_terms(cfg: &ValidatedConfig, pairing: Pairing) -> (Vec<(f64, Complex64)>, impl Fn(f64) -> f64) {
    let d = cfg.delta();
    let beta = cfg.beta;
    let one_d = cfg.dimension == Dimension::OnePlusOne;
    let terms = match (one_d, pairing) {
        (_, Pairing::Same) => vec![(0.0, Complex64::new(1.0, 0.0))],
        (false, Pairing::Different) => vec![
            (beta, Complex64::new(0.0, -0.5 / beta)),
            (-beta, Complex64::new(0.0, 0.5 / beta)),
        ],
        (true, Pairing::Different) => vec![(beta, Complex64::new(1.0, 0.0)), (-beta, Complex64::new(1.0, 0.0))],
    };
    let smooth = move |k: f64| {
        let env = (-0.5 * d * d * k * k).exp();
        match (one_d, pairing) {
            (false, Pairing::Same) => k * env,
            (false, Pairing::Different) => env,
            (true, _) => env / k,
        }
    };
    (terms, smooth)
}

fn weight(cfg: &ValidatedConfig, pairing: Pairing, k: f64) -> f64 {
    let d = cfg.delta();
    let env = (-0.5 * d * d * k * k).exp();
    match (cfg.dimension, pairing) {
        (Dimension::ThreePlusOne, Pairing::Same) => k * env,
        (Dimension::ThreePlusOne, Pairing::Different) => (cfg.beta * k).sin() / cfg.beta * env,
        (Dimension::OnePlusOne, Pairing::Same) => 2.0 * env / k,
        (Dimension::OnePlusOne, Pairing::Different) => 2.0 * (cfg.beta * k).cos() * env / k,
    }
}

fn reach(a: f64) -> f64 {
    (2.0 * (1.0 / TRUNCATION_EPS).ln() / a).sqrt()
}

fn quad(kernel: &dyn Fn(f64) -> Complex64, domain: Domain, envelope: Envelope, freq: f64, tail: Option<Tail>, tol: f64) -> Result<Complex64> {
    let spec = IntegrandSpec {
        kernel,
        axis: Axis { domain, singular_points: Vec::new(), envelope, frequency: freq },
        tail,
    };
    Ok(integrate(&spec, tol)?.value)
}

/// `∫ weight(κ) T(κ) dκ` over `κ > 0` (3+1) or `κ > Λ` folded (1+1).
fn radial(
    cfg: &ValidatedConfig,
    pairing: Pairing,
    switching_kernel: &dyn Fn(f64) -> Complex64,
    gaussian_switching_l: bool,
    tol: f64,
) -> Result<Complex64> {
    let d = cfg.delta();
    let alpha = cfg.alpha;
    // the axis caps panels at an eighth of a period; allow a full period
    let freq = (cfg.beta + cfg.gamma.abs() + 1.0) / 8.0;
    let cache: RefCell<HashMap<u64, Complex64>> = RefCell::new(HashMap::new());
    let t = |k: f64| -> Complex64 {
        if let Some(v) = cache.borrow().get(&k.to_bits()) {
            return *v;
        }
        let v = switching_kernel(k);
        cache.borrow_mut().insert(k.to_bits(), v);
        v
    };
    let full = |k: f64| t(k) * weight(cfg, pairing, k);

    let mut total = Complex64::new(0.0, 0.0);
    let start = if cfg.dimension == Dimension::OnePlusOne {
        let lam = cfg.cutoff;
        if lam < 1.0 {
            let logged = |u: f64| {
                let k = u.exp();
                full(k) * k
            };
            total += quad(&logged, Domain::Finite(lam.ln(), 0.0), Envelope::Polynomial(0.0), 1.0, None, tol)?;
            1.0
        } else {
            lam
        }
    } else {
        0.0
    };

    let rest = if gaussian_switching_l {
        quad(&full, Domain::SemiInfinite(start), Envelope::Gaussian { a: 1.0 + d * d, peak: -alpha }, freq, None, tol)?
    } else if d > 0.0 && (cfg.switching == SwitchingProfile::Sudden || reach(d * d) <= MAX_REACH) {
        quad(&full, Domain::SemiInfinite(start), Envelope::Gaussian { a: d * d, peak: 0.0 }, freq, None, tol)?
    } else if cfg.switching == SwitchingProfile::Gaussian {
        let (terms, smooth) = weight_terms(cfg, pairing);
        let smooth = &smooth;
        let t = &t;
        let tail = Tail {
            start: SWITCHING_TAIL.max(start),
            terms: terms
                .into_iter()
                .map(|(omega, c)| TailTerm {
                    omega,
                    amplitude: Box::new(move |k: f64| c * smooth(k) * t(k)),
                })
                .collect(),
        };
        quad(&full, Domain::SemiInfinite(start), Envelope::Polynomial(1.0), freq, Some(tail), tol)?
    } else {
        // fit the remainder as a/K² + b/K³ through the last two stretches
        let [k1, k2, k3] = RICHARDSON_CUTS;
        let near = quad(&full, Domain::Finite(start, k1), Envelope::Polynomial(1.0), freq, None, tol)?;
        let f12 = quad(&full, Domain::Finite(k1, k2), Envelope::Polynomial(1.0), freq, None, tol)?;
        let f23 = quad(&full, Domain::Finite(k2, k3), Envelope::Polynomial(1.0), freq, None, tol)?;
        let d = |p: i32, x: f64, y: f64| x.powi(-p) - y.powi(-p);
        let (p1, q1, p2, q2) = (d(2, k1, k2), d(3, k1, k2), d(2, k2, k3), d(3, k2, k3));
        let det = p1 * q2 - p2 * q1;
        let a = (f12 * q2 - f23 * q1) / det;
        let b = (f23 * p1 - f12 * p2) / det;
        near + f12 + f23 + a / (k3 * k3) + b / (k3 * k3 * k3)
    };
    Ok(total + rest)
}

fn prefactor(cfg: &ValidatedConfig) -> f64 {
    let l2 = cfg.coupling * cfg.coupling;
    match cfg.dimension {
        Dimension::ThreePlusOne => l2 / (4.0 * PI * PI),
        Dimension::OnePlusOne => l2 / (4.0 * PI),
    }
}

fn check_tols(inner: f64, outer: f64) -> Result<()> {
    if inner > 0.0 && outer > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("oracle tolerances must be positive, got {inner} and {outer}")))
    }
}

pub fn oracle_l(cfg: &ValidatedConfig, mu: Detector, nu: Detector) -> Result<OracleResult> {
    oracle_l_with(cfg, mu, nu, DEFAULT_INNER_TOL, DEFAULT_OUTER_TOL)
}

pub fn oracle_l_with(cfg: &ValidatedConfig, mu: Detector, nu: Detector, inner_tol: f64, outer_tol: f64) -> Result<OracleResult> {
    check_tols(inner_tol, outer_tol)?;
    let time = TimeDomain::new(inner_tol);
    let (pa, pb) = profiles(cfg);
    let pick = |d: Detector| if d == Detector::A { pa } else { pb };
    let (pm, pn) = (pick(mu), pick(nu));
    let alpha = cfg.alpha;
    let kernel = |k: f64| {
        let x = time.transform(pm, k + alpha, alpha);
        let y = if mu == nu { x } else { time.transform(pn, k + alpha, alpha) };
        x * y.conj()
    };
    let pairing = if mu == nu { Pairing::Same } else { Pairing::Different };
    let gaussian = cfg.switching == SwitchingProfile::Gaussian;
    let mut value = radial(cfg, pairing, &kernel, gaussian, outer_tol)? * prefactor(cfg);
    if mu == nu {
        value.im = 0.0;
    }
    Ok(OracleResult { value, inner_tol, outer_tol })
}

pub fn oracle_m(cfg: &ValidatedConfig) -> Result<OracleResult> {
    oracle_m_with(cfg, DEFAULT_INNER_TOL, DEFAULT_OUTER_TOL)
}

pub fn oracle_m_with(cfg: &ValidatedConfig, inner_tol: f64, outer_tol: f64) -> Result<OracleResult> {
    check_tols(inner_tol, outer_tol)?;
    let time = TimeDomain::new(inner_tol);
    let (pa, pb) = profiles(cfg);
    let alpha = cfg.alpha;
    let kernel = |k: f64| {
        let (a, b) = (alpha - k, alpha + k);
        time.ordered(pa, pb, a, b, alpha) + time.ordered(pb, pa, a, b, alpha)
    };
    let value = -radial(cfg, Pairing::Different, &kernel, false, outer_tol)? * prefactor(cfg);
    Ok(OracleResult { value, inner_tol, outer_tol })
}
