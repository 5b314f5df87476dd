//! Independent reference computations used by the integration and
//! acceptance tests. Nothing here calls into the spectral geometry code.

#![allow(dead_code)]

pub mod mesh_oracle;

use std::f64::consts::PI;

/// Real orthonormal spherical harmonic on the unit 2-sphere evaluated from
/// closed-form Legendre polynomials (degrees ≤ 3 only), matching the
/// library's `(l, p)` ordering: `p = 1` zonal, `p = 2m` cosine, `p = 2m+1` sine.
pub fn closed_form_harmonic(l: usize, p: usize, theta: f64, phi: f64) -> f64 {
    let (x, s) = (theta.cos(), theta.sin());
    let m = if p == 1 { 0 } else { p / 2 };
    let trig = if p == 1 {
        1.0
    } else if p % 2 == 0 {
        (m as f64 * phi).cos()
    } else {
        (m as f64 * phi).sin()
    };
    // unnormalized P_l^m without Condon–Shortley phase, and ∫_{-1}^{1} (P_l^m)² dx
    let (plm, norm2) = match (l, m) {
        (0, 0) => (1.0, 2.0),
        (1, 0) => (x, 2.0 / 3.0),
        (1, 1) => (s, 4.0 / 3.0),
        (2, 0) => (0.5 * (3.0 * x * x - 1.0), 2.0 / 5.0),
        (2, 1) => (3.0 * x * s, 12.0 / 5.0),
        (2, 2) => (3.0 * s * s, 48.0 / 5.0),
        (3, 0) => (0.5 * (5.0 * x * x * x - 3.0 * x), 2.0 / 7.0),
        (3, 1) => (1.5 * (5.0 * x * x - 1.0) * s, 2.0 / 7.0 * 12.0),
        (3, 2) => (15.0 * x * s * s, 2.0 / 7.0 * 120.0),
        (3, 3) => (15.0 * s * s * s, 2.0 / 7.0 * 720.0),
        _ => panic!("closed form only up to degree 3"),
    };
    let phi_norm = if m == 0 { 2.0 * PI } else { PI };
    plm * trig / (norm2 * phi_norm).sqrt()
}

/// Fejér's first quadrature rule on `[-1, 1]` as nodes `θ_k` (in colatitude)
/// and weights for `∫ f(cos θ) d(cos θ)`.
pub fn fejer_rule(count: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = count as f64;
    let mut thetas = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for k in 1..=count {
        let t = (2.0 * k as f64 - 1.0) * PI / (2.0 * nf);
        let mut s = 0.0;
        for j in 1..=count / 2 {
            let jf = j as f64;
            s += (2.0 * jf * t).cos() / (4.0 * jf * jf - 1.0);
        }
        thetas.push(t);
        weights.push(2.0 / nf * (1.0 - 2.0 * s));
    }
    (thetas, weights)
}

/// Least-squares slope of `log(y)` against `log(x)`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}
