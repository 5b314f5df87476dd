//! Gauss–Legendre nodes and fully normalized associated Legendre tables.
//!
//! The functions `Pbar_l^m(x)` used here are normalized so that
//! `∫_{-1}^{1} Pbar_l^m(x)^2 dx = 1`, without the Condon–Shortley phase.

use std::f64::consts::PI;

/// Gauss–Legendre nodes `x_j` (descending, i.e. colatitude ascending) and
/// weights on `[-1, 1]`.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    let nf = count as f64;
    for i in 0..count.div_ceil(2) {
        // Tricomi initial guess
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(count, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(count, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[count - 1 - i] = -x;
        weights[i] = w;
        weights[count - 1 - i] = w;
    }
    if count % 2 == 1 {
        nodes[count / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(degree: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if degree == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=degree {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let n = degree as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[inline]
pub fn lm_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Values of `Pbar_l^m`, `d/dθ Pbar_l^m` and `d²/dθ² Pbar_l^m` at one colatitude.
#[derive(Debug, Clone)]
pub struct LegendreColumn {
    pub p: Vec<f64>,
    pub dp: Vec<f64>,
    pub d2p: Vec<f64>,
}

/// Evaluate all `Pbar_l^m(cos θ)` for `0 <= m <= l <= l_max` together with
/// their first two θ-derivatives. `sin θ` must be nonzero.
pub fn legendre_column(l_max: usize, cos_t: f64, sin_t: f64) -> LegendreColumn {
    let size = lm_index(l_max, l_max) + 1;
    let mut p = vec![0.0; size];
    let mut dp = vec![0.0; size];
    let mut d2p = vec![0.0; size];

    // sectoral start, then upward recurrence in l for each fixed m
    let mut pmm = std::f64::consts::FRAC_1_SQRT_2;
    for m in 0..=l_max {
        if m > 0 {
            let mf = m as f64;
            pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_t;
        }
        p[lm_index(m, m)] = pmm;
        if m + 1 <= l_max {
            p[lm_index(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * cos_t * pmm;
        }
        for l in (m + 2)..=l_max {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            p[lm_index(l, m)] = a * (cos_t * p[lm_index(l - 1, m)] - b * p[lm_index(l - 2, m)]);
        }
    }

    let cot = cos_t / sin_t;
    let inv_sin2 = 1.0 / (sin_t * sin_t);
    for l in 0..=l_max {
        let lf = l as f64;
        for m in 0..=l {
            let mf = m as f64;
            let idx = lm_index(l, m);
            let lower = if l > m {
                ((2.0 * lf + 1.0) * (lf * lf - mf * mf) / (2.0 * lf - 1.0)).sqrt() * p[lm_index(l - 1, m)]
            } else {
                0.0
            };
            let d = (lf * cos_t * p[idx] - lower) / sin_t;
            dp[idx] = d;
            // associated Legendre equation in θ
            d2p[idx] = -cot * d - (lf * (lf + 1.0) - mf * mf * inv_sin2) * p[idx];
        }
    }
    LegendreColumn { p, dp, d2p }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_weights_sum_to_two_and_integrate_polynomials() {
        for count in [1, 2, 5, 18, 34, 65] {
            let (x, w) = gauss_legendre(count);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "count {count}: {s}");
            // exact through degree 2*count - 1
            let deg = 2 * count - 2;
            let integral: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
            let exact = 2.0 / (deg as f64 + 1.0);
            assert!((integral - exact).abs() < 1e-13, "count {count}");
            assert!(x.windows(2).all(|p| p[0] > p[1]));
        }
    }

    #[test]
    fn normalized_legendre_is_orthonormal() {
        let l_max = 12;
        let (x, w) = gauss_legendre(l_max + 2);
        let cols: Vec<_> = x.iter().map(|&c| legendre_column(l_max, c, (1.0 - c * c).sqrt())).collect();
        for m in 0..=l_max {
            for l1 in m..=l_max {
                for l2 in m..=l_max {
                    let ip: f64 = cols
                        .iter()
                        .zip(&w)
                        .map(|(c, wi)| wi * c.p[lm_index(l1, m)] * c.p[lm_index(l2, m)])
                        .sum();
                    let expect = if l1 == l2 { 1.0 } else { 0.0 };
                    assert!((ip - expect).abs() < 1e-12, "({l1},{l2},{m}) -> {ip}");
                }
            }
        }
    }

    #[test]
    fn theta_derivatives_match_finite_differences() {
        let l_max = 10;
        let h = 1e-4;
        for &theta in &[0.3_f64, 1.1, 2.0, 2.9] {
            let at = |t: f64| legendre_column(l_max, t.cos(), t.sin());
            let c = at(theta);
            let plus = at(theta + h);
            let minus = at(theta - h);
            for i in 0..c.p.len() {
                let fd1 = (plus.p[i] - minus.p[i]) / (2.0 * h);
                let fd2 = (plus.p[i] - 2.0 * c.p[i] + minus.p[i]) / (h * h);
                assert!((fd1 - c.dp[i]).abs() < 1e-6 * (1.0 + c.dp[i].abs()), "dp {i}");
                assert!((fd2 - c.d2p[i]).abs() < 1e-4 * (1.0 + c.d2p[i].abs()), "d2p {i}");
            }
        }
    }
}
