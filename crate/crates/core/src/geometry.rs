//! Differential geometry of the radial graph `X(ω) = (R + ρ(ω)) ω`.
//!
//! Curvature is taken with respect to the outward normal, so round spheres
//! have positive principal curvatures `1/r`.

use crate::error::{Error, Result};
use crate::harmonics::{gradient_sq_from, Grid, RadialField};

/// Pointwise curvature data of a radial graph, one entry per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureBundle {
    n: usize,
    /// `kappa[i][node]`, `i < n`. For `n = 2`, `kappa[0] >= kappa[1]`.
    pub kappa: Vec<Vec<f64>>,
    /// `sym[l][node] = E_l(κ)`, `l = 0..=n`.
    pub sym: Vec<Vec<f64>>,
    /// `μ_ρ` with `dμ_ρ = μ_ρ dμ₀`.
    pub area_ratio: Vec<f64>,
    /// `L_ρ = (1 + R²/(R+ρ)² |∇ρ|²)^{1/2}`.
    pub graph_factor: Vec<f64>,
}

impl CurvatureBundle {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.area_ratio.len()
    }

    /// Principal curvatures at one node.
    pub fn kappa_at(&self, node: usize) -> Vec<f64> {
        self.kappa.iter().map(|k| k[node]).collect()
    }

    /// `E_l` field, `0 <= l <= n`.
    pub fn elementary(&self, l: usize) -> &[f64] {
        &self.sym[l]
    }
}

/// `E_l(κ)` by the product expansion `∏ (1 + κ_i t)`.
pub fn elementary_symmetric(kappa: &[f64], order: usize) -> Result<f64> {
    if order > kappa.len() {
        return Err(Error::SymmetricOrder {
            order,
            len: kappa.len(),
        });
    }
    match (kappa.len(), order) {
        (_, 0) => return Ok(1.0),
        (1, 1) => return Ok(kappa[0]),
        (2, 1) => return Ok(kappa[0] + kappa[1]),
        (2, 2) => return Ok(kappa[0] * kappa[1]),
        _ => {}
    }
    let mut e = vec![0.0; order + 1];
    e[0] = 1.0;
    for (i, &k) in kappa.iter().enumerate() {
        for j in (1..=order.min(i + 1)).rev() {
            e[j] += k * e[j - 1];
        }
    }
    Ok(e[order])
}

pub fn curvature_bundle(rho: &RadialField, grid: &Grid) -> Result<CurvatureBundle> {
    rho.check_admissible()?;
    let radius = rho.radius();
    let d = grid.synthesize_derivatives(rho.coeffs(), radius)?;
    let grad2 = gradient_sq_from(grid, &d);
    let nodes = grid.node_count();
    let n = grid.dim();
    let mut kappa = vec![vec![0.0; nodes]; n];
    let mut sym = vec![vec![1.0; nodes]; n + 1];
    let mut area_ratio = vec![0.0; nodes];
    let mut graph_factor = vec![0.0; nodes];

    for node in 0..nodes {
        let r = radius + rho.values()[node];
        let w2 = r * r + grad2[node];
        let w = w2.sqrt();
        graph_factor[node] = w / r;
        if n == 1 {
            let (r1, r2) = (d.d_theta[node], d.d_theta2[node]);
            let k = (r * r + 2.0 * r1 * r1 - r * r2) / (w2 * w);
            kappa[0][node] = k;
            sym[1][node] = k;
            area_ratio[node] = w / radius;
        } else {
            let s = grid.node_sin_theta(node);
            let c = grid.node_cos_theta(node);
            let (rt, rp) = (d.d_theta[node], d.d_phi[node]);
            let (rtt, rtp, rpp) = (d.d_theta2[node], d.d_theta_phi[node], d.d_phi2[node]);
            let g11 = rt * rt + r * r;
            let g12 = rt * rp;
            let g22 = rp * rp + r * r * s * s;
            // h_ij = -<X_ij, N> with N the unnormalized outward normal r ω - r_θ e_θ - r_φ/sinθ e_φ
            let h11 = -(r * (rtt - r) - 2.0 * rt * rt) / w;
            let h12 = -(r * rtp - 2.0 * rt * rp - r * rp * c / s) / w;
            let h22 = -(r * rpp - r * r * s * s + r * rt * s * c - 2.0 * rp * rp) / w;
            // symmetric form L⁻¹ h L⁻ᵀ of the Weingarten map, g = L Lᵀ
            let l11 = g11.sqrt();
            let l21 = g12 / l11;
            let l22 = (g22 - l21 * l21).sqrt();
            let (m11, m12) = (h11 / l11, h12 / l11);
            let (m21, m22) = ((h12 - l21 * m11) / l22, (h22 - l21 * m12) / l22);
            let a11 = m11 / l11;
            let a12 = (m12 - m11 * l21 / l11) / l22;
            let a22 = (m22 - m21 * l21 / l11) / l22;
            let tr = a11 + a22;
            let det = a11 * a22 - a12 * a12;
            let root = (0.5 * (a11 - a22)).hypot(a12);
            kappa[0][node] = 0.5 * tr + root;
            kappa[1][node] = 0.5 * tr - root;
            sym[1][node] = tr;
            sym[2][node] = det;
            area_ratio[node] = r * w / (radius * radius);
        }
        if !graph_factor[node].is_finite() || !sym[n][node].is_finite() || !sym[1][node].is_finite() {
            return Err(Error::NonFinite {
                what: "curvature",
                node,
            });
        }
    }
    Ok(CurvatureBundle {
        n,
        kappa,
        sym,
        area_ratio,
        graph_factor,
    })
}

/// Volume of the region enclosed by the graph, `∫ (R+ρ)^{n+1}/(n+1) dμ̄`.
pub fn enclosed_volume(rho: &RadialField, grid: &Grid) -> Result<f64> {
    rho.check_admissible()?;
    let p = grid.dim() as i32 + 1;
    let s: f64 = rho
        .values()
        .iter()
        .zip(grid.weights())
        .map(|(v, w)| w * (rho.radius() + v).powi(p))
        .sum();
    Ok(s / p as f64)
}

/// Total `n`-dimensional measure of the graph, `∫ μ_ρ dμ₀`.
pub fn surface_area(bundle: &CurvatureBundle, grid: &Grid, radius: f64) -> f64 {
    crate::harmonics::quadrature(&bundle.area_ratio, grid, radius)
}
