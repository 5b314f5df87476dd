use std::f64::consts::PI;

use super::coeffs::{coeff_count, flat_index, Coeffs};
use super::legendre::{gauss_legendre, legendre_column, lm_index, LegendreColumn};
use crate::error::{Error, Result};

/// Collocation grid on the unit circle (`n = 1`) or unit 2-sphere (`n = 2`).
///
/// Tables are built once and never mutated, so a `Grid` can be shared freely
/// between threads.
#[derive(Debug, Clone)]
pub struct Grid {
    n: usize,
    l_max: usize,
    oversample: usize,
    /// Quadrature weight of each node w.r.t. the unit-sphere measure.
    weights: Vec<f64>,
    layout: Layout,
}

#[derive(Debug, Clone)]
enum Layout {
    Circle {
        angles: Vec<f64>,
        /// `cos(m θ_k)`, `sin(m θ_k)` stored as `[k * (l_max + 1) + m]`.
        cos_m: Vec<f64>,
        sin_m: Vec<f64>,
    },
    Sphere {
        cos_theta: Vec<f64>,
        sin_theta: Vec<f64>,
        gauss_weights: Vec<f64>,
        phis: Vec<f64>,
        cos_m: Vec<f64>,
        sin_m: Vec<f64>,
        legendre: Vec<LegendreColumn>,
    },
}

/// Grid samples of a field and its coordinate derivatives.
///
/// For `n = 1` only `value`, `d_theta` and `d_theta2` are populated (θ is the
/// polar angle); the φ entries are empty.
#[derive(Debug, Clone, Default)]
pub struct GridDerivatives {
    pub value: Vec<f64>,
    pub d_theta: Vec<f64>,
    pub d_theta2: Vec<f64>,
    pub d_phi: Vec<f64>,
    pub d_theta_phi: Vec<f64>,
    pub d_phi2: Vec<f64>,
}

const NORM_ZONAL: f64 = 0.398_942_280_401_432_7; // 1/sqrt(2π)
const NORM_SECTORAL: f64 = 0.564_189_583_547_756_3; // 1/sqrt(π)

impl Grid {
    pub fn new(n: usize, l_max: usize, oversample: usize) -> Result<Self> {
        if n != 1 && n != 2 {
            return Err(Error::UnsupportedDimension(n));
        }
        if l_max < 4 {
            return Err(Error::DegreeTooSmall(l_max));
        }
        if oversample == 0 {
            return Err(Error::BadOversample(oversample));
        }
        let width = l_max + 1;
        let grid = if n == 1 {
            // exact projection of degree-l_max products needs more than 2 l_max nodes
            let count = (2 * oversample * l_max).max(2 * l_max + 2);
            let angles: Vec<f64> = (0..count).map(|k| 2.0 * PI * k as f64 / count as f64).collect();
            let (cos_m, sin_m) = trig_tables(&angles, width);
            Grid {
                n,
                l_max,
                oversample,
                weights: vec![2.0 * PI / count as f64; count],
                layout: Layout::Circle { angles, cos_m, sin_m },
            }
        } else {
            let n_lat = oversample * (l_max + 1);
            let n_lon = oversample * (2 * l_max + 1);
            let (cos_theta, gauss_weights) = gauss_legendre(n_lat);
            let sin_theta: Vec<f64> = cos_theta.iter().map(|x| (1.0 - x * x).sqrt()).collect();
            let phis: Vec<f64> = (0..n_lon).map(|k| 2.0 * PI * k as f64 / n_lon as f64).collect();
            let (cos_m, sin_m) = trig_tables(&phis, width);
            let legendre = cos_theta
                .iter()
                .zip(&sin_theta)
                .map(|(&c, &s)| legendre_column(l_max, c, s))
                .collect();
            let dphi = 2.0 * PI / n_lon as f64;
            let weights = gauss_weights
                .iter()
                .flat_map(|w| std::iter::repeat_n(w * dphi, n_lon))
                .collect();
            Grid {
                n,
                l_max,
                oversample,
                weights,
                layout: Layout::Sphere {
                    cos_theta,
                    sin_theta,
                    gauss_weights,
                    phis,
                    cos_m,
                    sin_m,
                    legendre,
                },
            }
        };
        Ok(grid)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    pub fn coeff_count(&self) -> usize {
        coeff_count(self.n, self.l_max)
    }

    /// Unit-sphere quadrature weights, one per node.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(N_lat, N_lon)` for the sphere, `(N_θ, 1)` for the circle.
    pub fn shape(&self) -> (usize, usize) {
        match &self.layout {
            Layout::Circle { angles, .. } => (angles.len(), 1),
            Layout::Sphere { cos_theta, phis, .. } => (cos_theta.len(), phis.len()),
        }
    }

    /// Gauss–Legendre weights in `cos θ` (sphere only; empty for the circle).
    pub fn latitude_weights(&self) -> &[f64] {
        match &self.layout {
            Layout::Circle { .. } => &[],
            Layout::Sphere { gauss_weights, .. } => gauss_weights,
        }
    }

    /// Angular coordinates of node `i`: `(θ, 0)` on the circle, `(colatitude, longitude)` on the sphere.
    pub fn node_angles(&self, i: usize) -> (f64, f64) {
        match &self.layout {
            Layout::Circle { angles, .. } => (angles[i], 0.0),
            Layout::Sphere {
                cos_theta, phis, ..
            } => {
                let n_lon = phis.len();
                (cos_theta[i / n_lon].acos(), phis[i % n_lon])
            }
        }
    }

    /// Unit vector ω of node `i` in R^{n+1}.
    pub fn node_direction(&self, i: usize) -> Vec<f64> {
        match &self.layout {
            Layout::Circle { angles, .. } => vec![angles[i].cos(), angles[i].sin()],
            Layout::Sphere {
                cos_theta,
                sin_theta,
                phis,
                ..
            } => {
                let n_lon = phis.len();
                let (j, k) = (i / n_lon, i % n_lon);
                vec![
                    sin_theta[j] * phis[k].cos(),
                    sin_theta[j] * phis[k].sin(),
                    cos_theta[j],
                ]
            }
        }
    }

    /// `sin θ` at node `i` (1 on the circle).
    pub(crate) fn node_sin_theta(&self, i: usize) -> f64 {
        match &self.layout {
            Layout::Circle { .. } => 1.0,
            Layout::Sphere { sin_theta, phis, .. } => sin_theta[i / phis.len()],
        }
    }

    /// `cos θ` at node `i` (0 on the circle).
    pub(crate) fn node_cos_theta(&self, i: usize) -> f64 {
        match &self.layout {
            Layout::Circle { .. } => 0.0,
            Layout::Sphere { cos_theta, phis, .. } => cos_theta[i / phis.len()],
        }
    }

    /// Measure of the unit sphere, `2π` or `4π`.
    pub fn unit_measure(&self) -> f64 {
        if self.n == 1 {
            2.0 * PI
        } else {
            4.0 * PI
        }
    }

    fn check_values(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.node_count() {
            return Err(Error::ShapeMismatch {
                expected: self.node_count(),
                got: values.len(),
            });
        }
        Ok(())
    }

    fn check_coeffs(&self, coeffs: &Coeffs) -> Result<()> {
        if coeffs.dim() != self.n {
            return Err(Error::UnsupportedDimension(coeffs.dim()));
        }
        if coeffs.l_max() > self.l_max {
            return Err(Error::DegreeOverflow {
                degree: coeffs.l_max(),
                l_max: self.l_max,
            });
        }
        Ok(())
    }

    /// Orthogonal projection of grid data onto harmonics of degree `<= l_max`,
    /// in the basis orthonormal on the sphere of radius `radius`.
    pub fn analyze(&self, values: &[f64], radius: f64) -> Result<Coeffs> {
        self.check_values(values)?;
        let width = self.l_max + 1;
        let mut out = Coeffs::zeros(self.n, self.l_max);
        let scale = radius.powf(self.n as f64 / 2.0);
        match &self.layout {
            Layout::Circle { cos_m, sin_m, .. } => {
                let w = self.weights[0];
                let mut acc_c = vec![0.0; width];
                let mut acc_s = vec![0.0; width];
                for (k, &f) in values.iter().enumerate() {
                    let row = k * width;
                    for m in 0..width {
                        acc_c[m] += f * cos_m[row + m];
                        acc_s[m] += f * sin_m[row + m];
                    }
                }
                let data = out.as_mut_slice();
                data[0] = acc_c[0] * w * NORM_ZONAL * scale;
                for m in 1..width {
                    data[2 * m - 1] = acc_c[m] * w * NORM_SECTORAL * scale;
                    data[2 * m] = acc_s[m] * w * NORM_SECTORAL * scale;
                }
            }
            Layout::Sphere {
                gauss_weights,
                phis,
                cos_m,
                sin_m,
                legendre,
                ..
            } => {
                let n_lon = phis.len();
                let dphi = 2.0 * PI / n_lon as f64;
                let mut fc = vec![0.0; width];
                let mut fs = vec![0.0; width];
                let l_max = self.l_max;
                let data = out.as_mut_slice();
                for (j, col) in legendre.iter().enumerate() {
                    fc.iter_mut().for_each(|v| *v = 0.0);
                    fs.iter_mut().for_each(|v| *v = 0.0);
                    for k in 0..n_lon {
                        let f = values[j * n_lon + k];
                        let row = k * width;
                        for m in 0..width {
                            fc[m] += f * cos_m[row + m];
                            fs[m] += f * sin_m[row + m];
                        }
                    }
                    let wj = gauss_weights[j] * dphi * scale;
                    for m in 0..width {
                        let norm = if m == 0 { NORM_ZONAL } else { NORM_SECTORAL };
                        let c = fc[m] * wj * norm;
                        let s = fs[m] * wj * norm;
                        for l in m..=l_max {
                            let pl = col.p[lm_index(l, m)];
                            if m == 0 {
                                data[l * l] += c * pl;
                            } else {
                                data[l * l + 2 * m - 1] += c * pl;
                                data[l * l + 2 * m] += s * pl;
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Evaluate a coefficient vector on the grid.
    pub fn synthesize(&self, coeffs: &Coeffs, radius: f64) -> Result<Vec<f64>> {
        Ok(self.synthesize_impl(coeffs, radius, false)?.value)
    }

    /// Evaluate a coefficient vector and its first and second coordinate
    /// derivatives on the grid.
    pub fn synthesize_derivatives(&self, coeffs: &Coeffs, radius: f64) -> Result<GridDerivatives> {
        self.synthesize_impl(coeffs, radius, true)
    }

    fn synthesize_impl(&self, coeffs: &Coeffs, radius: f64, derivs: bool) -> Result<GridDerivatives> {
        self.check_coeffs(coeffs)?;
        let width = self.l_max + 1;
        let lc = coeffs.l_max();
        let a = coeffs.as_slice();
        let inv_scale = radius.powf(-(self.n as f64) / 2.0);
        let nodes = self.node_count();
        let mut out = GridDerivatives {
            value: vec![0.0; nodes],
            ..Default::default()
        };
        match &self.layout {
            Layout::Circle { cos_m, sin_m, .. } => {
                if derivs {
                    out.d_theta = vec![0.0; nodes];
                    out.d_theta2 = vec![0.0; nodes];
                }
                let a0 = a[0] * NORM_ZONAL * inv_scale;
                for k in 0..nodes {
                    let row = k * width;
                    let mut v = a0;
                    let mut d1 = 0.0;
                    let mut d2 = 0.0;
                    for m in 1..=lc {
                        let c = a[2 * m - 1] * NORM_SECTORAL * inv_scale;
                        let s = a[2 * m] * NORM_SECTORAL * inv_scale;
                        let (cm, sm) = (cos_m[row + m], sin_m[row + m]);
                        let mf = m as f64;
                        v += c * cm + s * sm;
                        if derivs {
                            d1 += mf * (s * cm - c * sm);
                            d2 -= mf * mf * (c * cm + s * sm);
                        }
                    }
                    out.value[k] = v;
                    if derivs {
                        out.d_theta[k] = d1;
                        out.d_theta2[k] = d2;
                    }
                }
            }
            Layout::Sphere {
                phis,
                cos_m,
                sin_m,
                legendre,
                ..
            } => {
                if derivs {
                    for f in [
                        &mut out.d_theta,
                        &mut out.d_theta2,
                        &mut out.d_phi,
                        &mut out.d_theta_phi,
                        &mut out.d_phi2,
                    ] {
                        *f = vec![0.0; nodes];
                    }
                }
                let n_lon = phis.len();
                // Fourier coefficients per latitude for θ-derivative orders 0, 1, 2
                let mut c = [vec![0.0; width], vec![0.0; width], vec![0.0; width]];
                let mut s = [vec![0.0; width], vec![0.0; width], vec![0.0; width]];
                let orders = if derivs { 3 } else { 1 };
                for (j, col) in legendre.iter().enumerate() {
                    for o in 0..orders {
                        c[o].iter_mut().for_each(|v| *v = 0.0);
                        s[o].iter_mut().for_each(|v| *v = 0.0);
                    }
                    for m in 0..=lc {
                        let norm = if m == 0 { NORM_ZONAL } else { NORM_SECTORAL } * inv_scale;
                        for l in m..=lc {
                            let idx = lm_index(l, m);
                            let table = [col.p[idx], col.dp[idx], col.d2p[idx]];
                            let (ac, as_) = if m == 0 {
                                (a[l * l], 0.0)
                            } else {
                                (a[l * l + 2 * m - 1], a[l * l + 2 * m])
                            };
                            for o in 0..orders {
                                c[o][m] += ac * table[o] * norm;
                                s[o][m] += as_ * table[o] * norm;
                            }
                        }
                    }
                    for k in 0..n_lon {
                        let row = k * width;
                        let node = j * n_lon + k;
                        let mut acc = [0.0; 6];
                        for m in 0..=lc {
                            let (cm, sm) = (cos_m[row + m], sin_m[row + m]);
                            let mf = m as f64;
                            acc[0] += c[0][m] * cm + s[0][m] * sm;
                            if derivs {
                                acc[1] += c[1][m] * cm + s[1][m] * sm;
                                acc[2] += c[2][m] * cm + s[2][m] * sm;
                                acc[3] += mf * (s[0][m] * cm - c[0][m] * sm);
                                acc[4] += mf * (s[1][m] * cm - c[1][m] * sm);
                                acc[5] -= mf * mf * (c[0][m] * cm + s[0][m] * sm);
                            }
                        }
                        out.value[node] = acc[0];
                        if derivs {
                            out.d_theta[node] = acc[1];
                            out.d_theta2[node] = acc[2];
                            out.d_phi[node] = acc[3];
                            out.d_theta_phi[node] = acc[4];
                            out.d_phi2[node] = acc[5];
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Samples of the orthonormal basis function `Y_{l,p}` on the sphere of radius `radius`.
    pub fn basis_values(&self, l: usize, p: usize, radius: f64) -> Result<Vec<f64>> {
        flat_index(self.n, self.l_max, l, p)?;
        let mut c = Coeffs::zeros(self.n, self.l_max);
        c.set(l, p, 1.0)?;
        self.synthesize(&c, radius)
    }

    /// Samples of the coordinate function `ω_p`, `1 <= p <= n + 1`.
    pub fn coordinate_values(&self, p: usize) -> Vec<f64> {
        assert!(p >= 1 && p <= self.n + 1, "coordinate index {p} out of range");
        (0..self.node_count()).map(|i| self.node_direction(i)[p - 1]).collect()
    }
}

fn trig_tables(angles: &[f64], width: usize) -> (Vec<f64>, Vec<f64>) {
    let mut cos_m = Vec::with_capacity(angles.len() * width);
    let mut sin_m = Vec::with_capacity(angles.len() * width);
    for &a in angles {
        for m in 0..width {
            let (s, c) = (m as f64 * a).sin_cos();
            cos_m.push(c);
            sin_m.push(s);
        }
    }
    (cos_m, sin_m)
}
