//! Grids, harmonic transforms, surface operators and quadrature on the unit
//! circle and unit 2-sphere.
//!
//! All tables live on the unit sphere. The reference radius `R` enters only
//! through explicit factors: `Δ_{S_R} = R⁻² Δ`, `dμ₀ = Rⁿ dμ̄`, and the
//! coefficient convention, which is orthonormal on `S_R`.

mod coeffs;
mod grid;
pub mod legendre;

pub use coeffs::{coeff_count, degree_multiplicity, Coeffs};
pub use grid::{Grid, GridDerivatives};

use crate::error::{Error, Result};

/// Height function `ρ` over the sphere of radius `R`, held both as grid
/// samples and as harmonic coefficients.
///
/// For band-limited data the two agree to rounding. For data built from
/// exact samples (e.g. a displaced sphere) the samples are kept verbatim and
/// the coefficients are their degree-`L_max` projection.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    radius: f64,
    values: Vec<f64>,
    coeffs: Coeffs,
}

impl RadialField {
    pub fn from_values(grid: &Grid, radius: f64, values: Vec<f64>) -> Result<Self> {
        let coeffs = grid.analyze(&values, radius)?;
        Ok(RadialField {
            radius,
            values,
            coeffs,
        })
    }

    pub fn from_coeffs(grid: &Grid, radius: f64, coeffs: Coeffs) -> Result<Self> {
        let coeffs = if coeffs.l_max() == grid.l_max() {
            coeffs
        } else {
            coeffs.retruncate(grid.l_max())
        };
        let values = grid.synthesize(&coeffs, radius)?;
        Ok(RadialField {
            radius,
            values,
            coeffs,
        })
    }

    pub fn zero(grid: &Grid, radius: f64) -> Self {
        RadialField {
            radius,
            values: vec![0.0; grid.node_count()],
            coeffs: Coeffs::zeros(grid.dim(), grid.l_max()),
        }
    }

    pub fn constant(grid: &Grid, radius: f64, c: f64) -> Self {
        let mut coeffs = Coeffs::zeros(grid.dim(), grid.l_max());
        coeffs.as_mut_slice()[0] = c * (grid.unit_measure() * radius.powi(grid.dim() as i32)).sqrt();
        RadialField {
            radius,
            values: vec![c; grid.node_count()],
            coeffs,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coeffs(&self) -> &Coeffs {
        &self.coeffs
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Fails unless `R + ρ > 0` at every node.
    pub fn check_admissible(&self) -> Result<()> {
        for (node, &v) in self.values.iter().enumerate() {
            let r = self.radius + v;
            if !r.is_finite() {
                return Err(Error::NonFinite {
                    what: "height",
                    node,
                });
            }
            if r <= 0.0 {
                return Err(Error::Inadmissible { node, value: r });
            }
        }
        Ok(())
    }
}

/// `Δ_{S_R} u`, applied coefficient-wise as `-l(l+n-1)/R²`.
pub fn laplace_beltrami(u: &Coeffs, radius: f64) -> Coeffs {
    let n = u.dim() as f64;
    let r2 = radius * radius;
    u.scale_by_degree(|l| {
        let l = l as f64;
        -l * (l + n - 1.0) / r2
    })
}

/// Pointwise `|∇̄u|²` on the unit sphere (divide by `R²` for `S_R`).
pub fn gradient_sq(u: &Coeffs, grid: &Grid, radius: f64) -> Result<Vec<f64>> {
    let d = grid.synthesize_derivatives(u, radius)?;
    Ok(gradient_sq_from(grid, &d))
}

pub(crate) fn gradient_sq_from(grid: &Grid, d: &GridDerivatives) -> Vec<f64> {
    if grid.dim() == 1 {
        d.d_theta.iter().map(|g| g * g).collect()
    } else {
        (0..grid.node_count())
            .map(|i| {
                let s = grid.node_sin_theta(i);
                let gp = d.d_phi[i] / s;
                d.d_theta[i] * d.d_theta[i] + gp * gp
            })
            .collect()
    }
}

/// `∫_{S_R} u dμ₀ = Rⁿ Σ w_i u_i`.
pub fn quadrature(values: &[f64], grid: &Grid, radius: f64) -> f64 {
    debug_assert_eq!(values.len(), grid.node_count());
    let s: f64 = values.iter().zip(grid.weights()).map(|(u, w)| u * w).sum();
    s * radius.powi(grid.dim() as i32)
}

/// Mean value `⨍_{S_R} u dμ₀` (independent of `R`).
pub fn mean(values: &[f64], grid: &Grid) -> f64 {
    quadrature(values, grid, 1.0) / grid.unit_measure()
}

/// `L²(S_R)` inner product of two grid fields.
pub fn inner(u: &[f64], v: &[f64], grid: &Grid, radius: f64) -> f64 {
    let s: f64 = u
        .iter()
        .zip(v)
        .zip(grid.weights())
        .map(|((a, b), w)| a * b * w)
        .sum();
    s * radius.powi(grid.dim() as i32)
}

/// Storage position `p` of the degree-1 orthonormal harmonic proportional to
/// the coordinate function `ω_q`, `1 <= q <= n + 1`.
pub fn coordinate_harmonic(n: usize, q: usize) -> usize {
    match (n, q) {
        (1, q) => q,
        (_, 3) => 1,
        (_, q) => q + 1,
    }
}

/// `‖ω_q‖_{L²(S_R)} = (Rⁿ |Sⁿ| / (n+1))^{1/2}`: the factor converting between
/// the coordinate function `ω_q` and its normalized degree-1 harmonic.
pub fn coordinate_norm(n: usize, radius: f64) -> f64 {
    let unit = if n == 1 {
        2.0 * std::f64::consts::PI
    } else {
        4.0 * std::f64::consts::PI
    };
    (radius.powi(n as i32) * unit / (n as f64 + 1.0)).sqrt()
}

/// Result of projecting onto the kernel of the linearized flow operator.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterProjection {
    /// `⟨u, u_{0,p}⟩` for `p = 0..=n+1` in the orthonormal basis: the constant
    /// first, then the normalized coordinate functions `ω₁, …, ω_{n+1}`.
    pub coords: Vec<f64>,
    /// `(I - P) u`.
    pub residual: Coeffs,
}

impl CenterProjection {
    /// `P u` as a coefficient vector.
    pub fn center_part(&self) -> Coeffs {
        let n = self.residual.dim();
        let mut c = Coeffs::zeros(n, self.residual.l_max());
        c.as_mut_slice()[0] = self.coords[0];
        for q in 1..=n + 1 {
            c.set(1, coordinate_harmonic(n, q), self.coords[q]).unwrap();
        }
        c
    }
}

/// Orthogonal projection onto span{1, degree-1 harmonics}.
pub fn project_center(u: &Coeffs) -> CenterProjection {
    let n = u.dim();
    let mut residual = u.clone();
    let mut coords = Vec::with_capacity(n + 2);
    coords.push(u.as_slice()[0]);
    residual.as_mut_slice()[0] = 0.0;
    for q in 1..=n + 1 {
        let i = u.index(1, coordinate_harmonic(n, q)).unwrap();
        coords.push(u.as_slice()[i]);
        residual.as_mut_slice()[i] = 0.0;
    }
    CenterProjection { coords, residual }
}
