//! Surface-mesh oracle for radial graphs over the unit-direction sphere.
//!
//! The embedding `X(θ, φ) = (R + ρ(θ, φ)) ω(θ, φ)` is sampled pointwise from a
//! closed-form height function and differentiated with fourth-order central
//! finite differences in the parameters. Curvatures follow from the general
//! parametric-surface formulas (first/second fundamental forms and a cross
//! product normal), and area and volume are integrated on a Fejér × trapezoid
//! parameter mesh.

use super::fejer_rule;

type Vec3 = [f64; 3];

fn add(a: Vec3, b: Vec3, s: f64) -> Vec3 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub struct MeshOracle<F: Fn(f64, f64) -> f64> {
    pub height: F,
    pub radius: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct OraclePoint {
    /// Principal curvatures, larger first.
    pub kappa: [f64; 2],
    /// `dA / (R² sin θ dθ dφ)`.
    pub area_ratio: f64,
}

impl<F: Fn(f64, f64) -> f64> MeshOracle<F> {
    pub fn new(height: F, radius: f64) -> Self {
        MeshOracle {
            height,
            radius,
            step: 2e-3,
        }
    }

    fn embed(&self, t: f64, p: f64) -> Vec3 {
        let r = self.radius + (self.height)(t, p);
        [r * t.sin() * p.cos(), r * t.sin() * p.sin(), r * t.cos()]
    }

    fn d1(&self, f: impl Fn(f64) -> Vec3, x: f64) -> Vec3 {
        let h = self.step;
        let mut out = [0.0; 3];
        for (off, c) in [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)] {
            out = add(out, f(x + off * h), c / (12.0 * h));
        }
        out
    }

    fn d2(&self, f: impl Fn(f64) -> Vec3, x: f64) -> Vec3 {
        let h = self.step;
        let mut out = [0.0; 3];
        for (off, c) in [(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)] {
            out = add(out, f(x + off * h), c / (12.0 * h * h));
        }
        out
    }

    fn tangents(&self, t: f64, p: f64) -> (Vec3, Vec3) {
        let xt = self.d1(|s| self.embed(s, p), t);
        let xp = self.d1(|s| self.embed(t, s), p);
        (xt, xp)
    }

    pub fn at(&self, t: f64, p: f64) -> OraclePoint {
        let (xt, xp) = self.tangents(t, p);
        let xtt = self.d2(|s| self.embed(s, p), t);
        let xpp = self.d2(|s| self.embed(t, s), p);
        let xtp = self.d1(|s| self.d1(|q| self.embed(q, s), t), p);
        let mut normal = cross(xt, xp);
        let len = dot(normal, normal).sqrt();
        normal = [normal[0] / len, normal[1] / len, normal[2] / len];
        if dot(normal, self.embed(t, p)) < 0.0 {
            normal = [-normal[0], -normal[1], -normal[2]];
        }
        let (e, f, g) = (dot(xt, xt), dot(xt, xp), dot(xp, xp));
        // outward normal, positive curvature on round spheres
        let (l, m, n) = (-dot(xtt, normal), -dot(xtp, normal), -dot(xpp, normal));
        let det_i = e * g - f * f;
        let mean = (e * n - 2.0 * f * m + g * l) / (2.0 * det_i);
        let gauss = (l * n - m * m) / det_i;
        let disc = (mean * mean - gauss).max(0.0).sqrt();
        let r2 = self.radius * self.radius;
        OraclePoint {
            kappa: [mean + disc, mean - disc],
            area_ratio: len / (r2 * t.sin()),
        }
    }

    /// Total area and enclosed volume on a `n_theta × n_phi` parameter mesh.
    pub fn area_and_volume(&self, n_theta: usize, n_phi: usize) -> (f64, f64) {
        let (thetas, weights) = fejer_rule(n_theta);
        let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
        let mut area = 0.0;
        let mut volume = 0.0;
        for (&t, &w) in thetas.iter().zip(&weights) {
            for q in 0..n_phi {
                let p = q as f64 * dphi;
                let (xt, xp) = self.tangents(t, p);
                let c = cross(xt, xp);
                let jac = dot(c, c).sqrt();
                // d(cos θ) = sin θ dθ, so divide the parameter density by sin θ
                area += w * dphi * jac / t.sin();
                volume += w * dphi * dot(self.embed(t, p), c).abs() / (3.0 * t.sin());
            }
        }
        (area, volume)
    }
}
