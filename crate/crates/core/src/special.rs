//! Exponentially scaled modified Bessel functions of the first kind.
//!
//! Power series up to `x = 15`, large-argument asymptotic expansion beyond.

use std::f64::consts::PI;

const SERIES_LIMIT: f64 = 15.0;

fn series(nu: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut term = (0..nu).fold(1.0, |t, k| t * half / (k + 1) as f64);
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= q / (k as f64 * (k + nu) as f64);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    sum * (-x).exp()
}

fn asymptotic(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (8.0 * k as f64 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

fn scaled(nu: u32, x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_LIMIT {
        series(nu, ax)
    } else {
        asymptotic(nu, ax)
    };
    // I_1 is odd, I_0 even.
    if nu % 2 == 1 && x < 0.0 {
        -v
    } else {
        v
    }
}

/// `e^{-|x|} I_0(x)`.
pub fn bessel_i0e(x: f64) -> f64 {
    scaled(0, x)
}

/// `e^{-|x|} I_1(x)`.
pub fn bessel_i1e(x: f64) -> f64 {
    scaled(1, x)
}

pub fn bessel_i0(x: f64) -> f64 {
    bessel_i0e(x) * x.abs().exp()
}

pub fn bessel_i1(x: f64) -> f64 {
    bessel_i1e(x) * x.abs().exp()
}

/// `I_1(κ)/I_0(κ)`, the mean resultant length of a von Mises distribution.
pub fn bessel_ratio(kappa: f64) -> f64 {
    bessel_i1e(kappa) / bessel_i0e(kappa)
}
