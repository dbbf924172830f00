//! Joint detector state, negativity, mutual information and the
//! fourth-order population `Ξ₃`.

use crate::elements::kernels::{g1_closed, g2_non_overlap, phi};
use crate::elements::{compute_elements, MatrixElements};
use crate::error::{Error, Result};
use crate::model::{Dimension, SwitchingProfile, ValidatedConfig};
use crate::quadrature::{integrate_double, Axis, Envelope};
use crate::specfun::{erfcx, faddeeva_w};
use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// `ρ_AB` at second order in the basis `gg, eg, ge, ee`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDetectorState {
    pub rho: [[Complex64; 4]; 4],
}

impl TwoDetectorState {
    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.rho[i][i]).sum()
    }

    fn matrix(rho: &[[Complex64; 4]; 4]) -> Matrix4<Complex64> {
        Matrix4::from_fn(|i, j| rho[i][j])
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        sorted_eigenvalues(Self::matrix(&self.rho))
    }

    /// Partial transpose on detector B.
    pub fn partial_transpose(&self) -> [[Complex64; 4]; 4] {
        let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let (ia, ib) = (i % 2, i / 2);
                let (ja, jb) = (j % 2, j / 2);
                *v = self.rho[ia + 2 * jb][ja + 2 * ib];
            }
        }
        out
    }

    pub fn partial_transpose_eigenvalues(&self) -> [f64; 4] {
        sorted_eigenvalues(Self::matrix(&self.partial_transpose()))
    }
}

fn sorted_eigenvalues(m: Matrix4<Complex64>) -> [f64; 4] {
    let eig = SymmetricEigen::new(m);
    let mut v = [0.0; 4];
    for (i, e) in eig.eigenvalues.iter().enumerate() {
        v[i] = *e;
    }
    v.sort_by(f64::total_cmp);
    v
}

pub fn assemble_state(e: &MatrixElements) -> Result<TwoDetectorState> {
    let ground = 1.0 - e.l_aa - e.l_bb;
    if ground < 0.0 {
        return Err(Error::Unphysical(ground));
    }
    let z = Complex64::new(0.0, 0.0);
    let r = |x: f64| Complex64::new(x, 0.0);
    Ok(TwoDetectorState {
        rho: [
            [r(ground), z, z, e.m.conj()],
            [z, r(e.l_aa), e.l_ab, z],
            [z, e.l_ab.conj(), r(e.l_bb), z],
            [e.m, z, z, z],
        ],
    })
}

/// `-E₁`, minus the only eigenvalue of the partial transpose that can turn
/// negative at second order.
pub fn negativity_estimator(e: &MatrixElements) -> f64 {
    let diff = e.l_aa - e.l_bb;
    let root = (diff * diff + 4.0 * e.m.norm_sqr()).sqrt();
    -0.5 * (e.l_aa + e.l_bb - root)
}

/// `(L₊, L₋)`, the eigenvalues of the single-excitation block.
pub fn l_plus_minus(e: &MatrixElements) -> (f64, f64) {
    let diff = e.l_aa - e.l_bb;
    let root = (diff * diff + 4.0 * e.l_ab.norm_sqr()).sqrt();
    (0.5 * (e.l_aa + e.l_bb + root), 0.5 * (e.l_aa + e.l_bb - root))
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Leading-order mutual information in nats.
pub fn mutual_information(e: &MatrixElements) -> f64 {
    let (lp, lm) = l_plus_minus(e);
    xlogx(lp) + xlogx(lm) - xlogx(e.l_aa) - xlogx(e.l_bb)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourthOrder {
    pub xi3: f64,
    pub l_ab_sq: f64,
    pub e2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub elements: MatrixElements,
    pub n2: f64,
    pub negativity: f64,
    pub mutual_info: f64,
    pub l_plus: f64,
    pub l_minus: f64,
    pub fourth_order: Option<FourthOrder>,
    /// The smeared detectors overlap in space (`β < 6δ`).
    pub overlap: bool,
}

pub fn report_from_elements(cfg: &ValidatedConfig, elements: MatrixElements) -> CorrelationReport {
    let n2 = negativity_estimator(&elements);
    let (l_plus, l_minus) = l_plus_minus(&elements);
    CorrelationReport {
        elements,
        n2,
        negativity: n2.max(0.0),
        mutual_info: mutual_information(&elements),
        l_plus,
        l_minus,
        fourth_order: None,
        overlap: cfg.overlap(),
    }
}

pub fn correlation_report(cfg: &ValidatedConfig, tol: f64) -> Result<CorrelationReport> {
    Ok(report_from_elements(cfg, compute_elements(cfg, tol)?))
}

/// Adds the fourth-order competition `Ξ₃` vs `|L_AB|²` to a report.
pub fn with_fourth_order(cfg: &ValidatedConfig, mut report: CorrelationReport, tol: f64) -> Result<CorrelationReport> {
    let xi3 = xi3(cfg, tol)?;
    let l_ab_sq = report.elements.l_ab.norm_sqr();
    report.fourth_order = Some(FourthOrder { xi3, l_ab_sq, e2: xi3 - l_ab_sq });
    Ok(report)
}

fn require_far_apart(cfg: &ValidatedConfig) -> Result<()> {
    if cfg.dimension != Dimension::ThreePlusOne {
        return Err(Error::RegimeUnsupported("the fourth-order term is available in 3+1 dimensions only".into()));
    }
    if !cfg.switchings_disjoint() {
        return Err(Error::RegimeUnsupported(format!(
            "the fourth-order term needs non-overlapping switchings, got gamma = {}",
            cfg.gamma
        )));
    }
    Ok(())
}

/// Population of `|e_A e_B⟩` at fourth order for switchings far apart.
pub fn xi3(cfg: &ValidatedConfig, tol: f64) -> Result<f64> {
    require_far_apart(cfg)?;
    match cfg.switching {
        SwitchingProfile::Gaussian => Ok(xi3_gaussian(cfg.alpha, cfg.beta, cfg.gamma, cfg.delta(), cfg.coupling).re),
        SwitchingProfile::Sudden => Ok(xi3_quadrature(cfg, tol)?.re),
    }
}

pub fn e2(cfg: &ValidatedConfig, tol: f64) -> Result<f64> {
    let x = xi3(cfg, tol)?;
    let l_ab = crate::elements::nonlocal_term(cfg, tol)?;
    Ok(x - l_ab.norm_sqr())
}

/// Closed form for Gaussian switchings far apart. The imaginary part is
/// rounding noise.
pub fn xi3_gaussian(alpha: f64, beta: f64, gamma: f64, delta: f64, lambda: f64) -> Complex64 {
    let a = 1.0 + delta * delta;
    let s = (2.0 * a).sqrt();
    let l4 = lambda.powi(4);
    let c = |re: f64, im: f64| Complex64::new(re, im);

    let u = c((beta + gamma) / s, 0.0);
    let v = c((beta - gamma) / s, 0.0);
    let f1 = faddeeva_w(u) - faddeeva_w(v).conj();
    let f2 = faddeeva_w(u).conj() - faddeeva_w(v);
    let pair = l4 * (-alpha * alpha).exp() / (128.0 * PI * beta * beta * a) * f1 * f2;

    let b1 = erfcx(c(alpha, -(beta - gamma)) / s) - erfcx(c(alpha, beta + gamma) / s);
    let b2 = erfcx(c(alpha, -(beta + gamma)) / s) - erfcx(c(alpha, beta - gamma) / s);
    let cross = -l4 * (-alpha * alpha).exp() / (128.0 * PI * beta * beta * a) * b1 * b2;

    let local = 2.0 * a.sqrt() - (2.0 * PI).sqrt() * alpha * erfcx(c(alpha / s, 0.0)).re;
    let local = l4 * (-alpha * alpha).exp() / (64.0 * PI * PI * a.powi(3)) * local * local;

    pair + cross + local
}

/// Kernels `R₁, R₂, R₃` of the double integral, for detectors far apart.
fn r_kernels(cfg: &ValidatedConfig, k: f64, q: f64) -> [Complex64; 3] {
    let alpha = cfg.alpha;
    let gamma = cfg.gamma;
    let i = Complex64::new(0.0, 1.0);
    match cfg.switching {
        SwitchingProfile::Sudden => {
            // detector A on [0, 1], B on [γ, γ + 1]
            let p = |x: f64| i * phi(x);
            let r1 = Complex64::from_polar(1.0, -(2.0 * alpha - (gamma - 1.0) * q + (2.0 * gamma + 1.0) * k))
                * p(alpha + q)
                * (p(alpha - q) * Complex64::from_polar(1.0, q))
                * p(alpha + k)
                * (p(alpha - k) * Complex64::from_polar(1.0, (gamma + 1.0) * k));
            let r2 = Complex64::from_polar(1.0, -(2.0 * alpha + (gamma + 1.0) * q - (gamma - 1.0) * k))
                * (p(alpha + q) * p(alpha + q))
                * (p(alpha + k) * p(alpha + k));
            let r3 = phi(alpha + q).norm_sqr() * phi(alpha + k).norm_sqr();
            [r1, r2, Complex64::new(r3, 0.0)]
        }
        SwitchingProfile::Gaussian => {
            let h = |x: f64| g2_non_overlap(x, alpha, gamma);
            let pr = |x: f64| g1_closed(x, alpha, 0.0) * g1_closed(x, alpha, gamma).conj();
            let r3 = pr(k).norm() * pr(q).norm();
            [h(k).conj() * h(q), pr(k).conj() * pr(q), Complex64::new(r3, 0.0)]
        }
    }
}

/// `Ξ₃` by double quadrature over both momenta.
pub fn xi3_quadrature(cfg: &ValidatedConfig, tol: f64) -> Result<Complex64> {
    require_far_apart(cfg)?;
    let d = cfg.delta();
    let beta = cfg.beta;
    let kernel = |k: f64, q: f64| {
        let [r1, r2, r3] = r_kernels(cfg, k, q);
        let env = (-0.5 * d * d * (k * k + q * q)).exp();
        env * ((beta * k).sin() * (beta * q).sin() / (beta * beta) * (r1 + r2) + k * q * r3)
    };
    let envelope = match cfg.switching {
        SwitchingProfile::Gaussian => Envelope::Gaussian { a: 1.0 + d * d, peak: (-cfg.alpha).max(0.0) },
        SwitchingProfile::Sudden => {
            if !(d > 0.0) {
                return Err(Error::UvDivergent("pointlike detectors with sudden switching in 3+1 dimensions".into()));
            }
            Envelope::Gaussian { a: d * d, peak: 0.0 }
        }
    };
    let axis = Axis::semi_infinite(0.0, envelope, beta + 2.0 * cfg.gamma.abs() + 2.0);
    let r = integrate_double(&kernel, &axis, &axis, tol)?;
    Ok(r.value * cfg.coupling.powi(4) / (16.0 * PI.powi(4)))
}
