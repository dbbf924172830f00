#![allow(dead_code)]

use harvest::specfun::erf;
use num_complex::Complex64;

pub fn specfun_reference() -> Vec<(String, Complex64, Complex64)> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/specfun_reference.csv");
    let mut rdr = csv::Reader::from_path(path).expect("reference table");
    rdr.records()
        .map(|r| {
            let r = r.expect("row");
            let f = |i: usize| r[i].parse::<f64>().expect("number");
            (
                r[0].to_string(),
                Complex64::new(f(1), f(2)),
                Complex64::new(f(3), f(4)),
            )
        })
        .collect()
}

/// Trapezoidal rule on the real line; spectrally accurate for this
/// entire, Gaussian-damped integrand.
pub fn appendix_i_quadrature(a: Complex64, b: Complex64) -> Complex64 {
    let h = 0.02;
    let n = 900;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in -n..=n {
        let y = k as f64 * h;
        let e = (-(a * a) - Complex64::new(0.0, 1.0) * b * y - y * y).exp();
        sum += e * erf(y - Complex64::new(0.0, 1.0) * a);
    }
    sum * h
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre on `[a, b]` with `panels` equal panels.
pub fn integrate_c(f: impl Fn(f64) -> Complex64, a: f64, b: f64, panels: usize) -> Complex64 {
    let rule = gauss_legendre(16);
    let h = (b - a) / panels as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for &(x, w) in &rule {
            sum += f(lo + 0.5 * h * (x + 1.0)) * (0.5 * h * w);
        }
    }
    sum
}

/// `∫ₚ^q dt₁ f(t₁) ∫ₚ^{t₁} dt₂ g(t₂)` by nested composite quadrature.
pub fn nested(f: impl Fn(f64) -> Complex64, g: impl Fn(f64) -> Complex64, p: f64, q: f64, panels: usize) -> Complex64 {
    integrate_c(|t1| f(t1) * integrate_c(&g, p, t1, panels), p, q, panels)
}
