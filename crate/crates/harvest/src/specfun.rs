//! Complex error-function family built on the Faddeeva function.
//!
//! `w(z)` is evaluated with a pole-corrected trapezoidal rule on the
//! integral `w(z) = (i/π) ∫ e^{-t²}/(z - t) dt`, valid in the closed upper
//! half-plane. Everything else is derived from it.

use num_complex::Complex64;
use std::f64::consts::{FRAC_2_SQRT_PI, PI};

const H: f64 = 0.5;
const N: i32 = 16;
const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Replaces overflowed parts with the largest finite value of the same sign.
fn saturate(z: Complex64) -> Complex64 {
    let clamp = |v: f64| {
        if v.is_nan() {
            0.0
        } else if v.is_infinite() {
            v.signum() * f64::MAX
        } else {
            v
        }
    };
    Complex64::new(clamp(z.re), clamp(z.im))
}

fn exp_neg_sq(z: Complex64) -> Complex64 {
    saturate((-(z * z)).exp())
}

fn w_upper(z: Complex64) -> Complex64 {
    let x = z.re;
    let frac = x / H - (x / H).floor();
    let shifted = !(0.25..=0.75).contains(&frac);
    let theta = if shifted { 0.5 } else { 0.0 };

    let mut sum = Complex64::new(0.0, 0.0);
    for n in -N..=N {
        let t = (n as f64 + theta) * H;
        sum += (-t * t).exp() / (z - t);
    }
    let mut w = Complex64::new(0.0, H / PI) * sum;

    if z.im < PI / H {
        let e = (Complex64::new(0.0, 2.0 * PI / H) * z).exp();
        let g = exp_neg_sq(z);
        w += if shifted {
            2.0 * g * e / (1.0 + e)
        } else {
            -2.0 * g * e / (1.0 - e)
        };
    }
    w
}

/// Faddeeva function `w(z) = e^{-z²} erfc(-iz)`.
pub fn faddeeva_w(z: Complex64) -> Complex64 {
    if z.im >= 0.0 {
        w_upper(z)
    } else {
        saturate(2.0 * exp_neg_sq(z) - w_upper(-z))
    }
}

/// Scaled complementary error function `e^{z²} erfc(z)`.
pub fn erfcx(z: Complex64) -> Complex64 {
    let iz = Complex64::new(-z.im, z.re);
    if z.re >= 0.0 {
        w_upper(iz)
    } else {
        saturate(2.0 * saturate((z * z).exp()) - w_upper(-iz))
    }
}

pub fn erfc(z: Complex64) -> Complex64 {
    if z.re >= 0.0 {
        saturate(exp_neg_sq(z) * w_upper(Complex64::new(-z.im, z.re)))
    } else {
        2.0 - erfc(-z)
    }
}

fn erf_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for n in 1..200 {
        term *= -z2 / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

pub fn erf(z: Complex64) -> Complex64 {
    if z.norm_sqr() < 4.0 {
        erf_series(z)
    } else if z.re >= 0.0 {
        1.0 - erfc(z)
    } else {
        erfc(-z) - 1.0
    }
}

/// Imaginary error function `-i erf(iz)`.
pub fn erfi(z: Complex64) -> Complex64 {
    let e = erf(Complex64::new(-z.im, z.re));
    Complex64::new(e.im, -e.re)
}

/// Dawson's integral `D(x) = e^{-x²} ∫₀ˣ e^{t²} dt` for real `x`.
pub fn dawson(x: f64) -> f64 {
    0.5 * SQRT_PI * w_upper(Complex64::new(x, 0.0)).im
}

/// `-i√π e^{-a²-b²/4} erfi((a + b/2)/√2)`, the closed form of
/// `∫ e^{-a²-iby-y²} erf(y - ia) dy` over the real line.
pub fn appendix_i(a: Complex64, b: Complex64) -> Complex64 {
    let arg = (a + b / 2.0) / std::f64::consts::SQRT_2;
    let pre = (-(a * a) - b * b / 4.0).exp();
    saturate(Complex64::new(0.0, -SQRT_PI) * pre * erfi(arg))
}
