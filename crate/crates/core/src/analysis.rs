//! Conserved quantities, spectra, decay rates and the family of round spheres
//! near `S_R`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::flow::{linear_rate, FlowConfig, FlowEngine};
use crate::geometry::{curvature_bundle, enclosed_volume};
use crate::harmonics::{
    coordinate_norm, degree_multiplicity, project_center, quadrature, Coeffs, Grid, RadialField,
};
use crate::speeds::binomial;

/// `V_{n-k}`: the enclosed volume for `k = -1`, otherwise
/// `((n+1) C(n,k))⁻¹ ∫ E_k dμ_ρ`.
pub fn mixed_volume(rho: &RadialField, grid: &Grid, k: i32) -> Result<f64> {
    let n = grid.dim();
    let max = n as i32 - 1;
    if k < -1 || k > max {
        return Err(Error::ConstraintIndex { k, n, max });
    }
    if k == -1 {
        return enclosed_volume(rho, grid);
    }
    let k = k as usize;
    let bundle = curvature_bundle(rho, grid)?;
    let integrand: Vec<f64> = bundle
        .elementary(k)
        .iter()
        .zip(&bundle.area_ratio)
        .map(|(e, m)| e * m)
        .collect();
    let total = quadrature(&integrand, grid, rho.radius());
    Ok(total / ((n as f64 + 1.0) * binomial(n, k)))
}

/// Dimension of the degree-`l` harmonics on `Sⁿ`.
pub fn harmonic_multiplicity(l: usize, n: usize) -> usize {
    degree_multiplicity(n, l)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry {
    pub degree: usize,
    pub lambda_analytic: f64,
    /// Mean of the numerical Jacobian diagonal over the degree.
    pub lambda_numeric: Option<f64>,
    pub multiplicity: usize,
    /// Largest off-diagonal magnitude in the degree's columns.
    pub offdiag_max: Option<f64>,
}

/// Eigenvalues of `∂G(0)` grouped by harmonic degree.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub n: usize,
    pub entries: Vec<SpectrumEntry>,
    /// Total multiplicity of the eigenvalue 0.
    pub center_dim: usize,
    pub offdiag_max: Option<f64>,
    pub asymmetry_max: Option<f64>,
}

impl SpectrumReport {
    /// Distinct eigenvalues with multiplicities, the zero eigenvalue merged.
    pub fn eigenvalues(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for e in &self.entries {
            match out.iter_mut().find(|(l, _)| *l == e.lambda_analytic) {
                Some(slot) => slot.1 += e.multiplicity,
                None => out.push((e.lambda_analytic, e.multiplicity)),
            }
        }
        out
    }

    pub fn lambda_max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.lambda_analytic.abs()))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("l,lambda_analytic,lambda_numeric,multiplicity,offdiag_max\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for e in &self.entries {
            let _ = writeln!(
                s,
                "{},{:e},{},{},{}",
                e.degree,
                e.lambda_analytic,
                opt(e.lambda_numeric),
                e.multiplicity,
                opt(e.offdiag_max)
            );
        }
        s
    }
}

pub fn analytic_spectrum(config: &FlowConfig, l_max: usize) -> SpectrumReport {
    let fprime = config.speed.umbilic_derivative();
    let entries: Vec<SpectrumEntry> = (0..=l_max)
        .map(|l| SpectrumEntry {
            degree: l,
            lambda_analytic: linear_rate(config.n, config.radius, fprime, l),
            lambda_numeric: None,
            multiplicity: harmonic_multiplicity(l, config.n),
            offdiag_max: None,
        })
        .collect();
    let center_dim = entries
        .iter()
        .filter(|e| e.lambda_analytic == 0.0)
        .map(|e| e.multiplicity)
        .sum();
    SpectrumReport {
        n: config.n,
        entries,
        center_dim,
        offdiag_max: None,
        asymmetry_max: None,
    }
}

/// Central-difference Jacobian of `G` at `ρ = 0` in harmonic coefficients.
#[derive(Debug, Clone)]
pub struct Jacobian {
    /// Column `j` holds `∂G(0) e_j`.
    pub matrix: DMatrix<f64>,
    /// Degree of each basis index.
    pub degrees: Vec<usize>,
    pub report: SpectrumReport,
}

pub fn numerical_jacobian(config: &FlowConfig, l_max: usize, eps: f64) -> Result<Jacobian> {
    let r = config.radius;
    if !(eps >= 1e-7 * r && eps <= 1e-3 * r) {
        return Err(Error::Config(format!("jacobian step {eps} outside [1e-7, 1e-3]·R")));
    }
    let mut cfg = config.clone();
    cfg.l_max = l_max;
    let engine = FlowEngine::new(cfg)?;
    let zero = Coeffs::zeros(config.n, l_max);
    let dim = zero.len();
    let degrees: Vec<usize> = (0..dim).map(|i| zero.degree_of(i)).collect();
    let mut matrix = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut plus = zero.clone();
        plus.as_mut_slice()[j] = eps;
        let minus = plus.scale_by_degree(|_| -1.0);
        let gp = engine.evaluate_g(&engine.field(plus)?)?.coeffs;
        let gm = engine.evaluate_g(&engine.field(minus)?)?.coeffs;
        for i in 0..dim {
            matrix[(i, j)] = (gp.as_slice()[i] - gm.as_slice()[i]) / (2.0 * eps);
        }
    }
    let mut report = analytic_spectrum(config, l_max);
    let mut offdiag_all: f64 = 0.0;
    for entry in &mut report.entries {
        let cols: Vec<usize> = (0..dim).filter(|&j| degrees[j] == entry.degree).collect();
        let diag: f64 = cols.iter().map(|&j| matrix[(j, j)]).sum::<f64>() / cols.len() as f64;
        let off = cols
            .iter()
            .flat_map(|&j| (0..dim).filter(move |&i| i != j).map(move |i| (i, j)))
            .fold(0.0_f64, |m, (i, j)| m.max(matrix[(i, j)].abs()));
        offdiag_all = offdiag_all.max(off);
        entry.lambda_numeric = Some(diag);
        entry.offdiag_max = Some(off);
    }
    let asym = (&matrix - matrix.transpose()).amax();
    report.offdiag_max = Some(offdiag_all);
    report.asymmetry_max = Some(asym);
    Ok(Jacobian {
        matrix,
        degrees,
        report,
    })
}

/// Offset `z₀ = R' - R` of the radius and the center `(z₁, …, z_{n+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereCoords {
    pub offset: f64,
    pub center: Vec<f64>,
}

impl SphereCoords {
    pub fn zero(n: usize) -> Self {
        SphereCoords {
            offset: 0.0,
            center: vec![0.0; n + 1],
        }
    }

    /// `(z₀, z₁, …, z_{n+1})`.
    pub fn to_vec(&self) -> Vec<f64> {
        std::iter::once(self.offset).chain(self.center.iter().copied()).collect()
    }

    pub fn from_slice(z: &[f64]) -> Self {
        SphereCoords {
            offset: z[0],
            center: z[1..].to_vec(),
        }
    }

    pub fn max_abs_diff(&self, other: &SphereCoords) -> f64 {
        self.to_vec()
            .iter()
            .zip(other.to_vec())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

struct SphereSample {
    values: Vec<f64>,
    /// `∂ρ/∂z_j` at each node, `j = 0..=n+1`.
    jacobian: Vec<Vec<f64>>,
}

fn sample_sphere(z: &SphereCoords, grid: &Grid, radius: f64, with_jacobian: bool) -> Result<SphereSample> {
    let n = grid.dim();
    if z.center.len() != n + 1 {
        return Err(Error::ShapeMismatch {
            expected: n + 1,
            got: z.center.len(),
        });
    }
    let r1 = radius + z.offset;
    let c2: f64 = z.center.iter().map(|c| c * c).sum();
    let count = grid.node_count();
    let mut values = Vec::with_capacity(count);
    let mut jacobian = if with_jacobian {
        vec![Vec::with_capacity(count); n + 2]
    } else {
        Vec::new()
    };
    for node in 0..count {
        let w = grid.node_direction(node);
        let s: f64 = w.iter().zip(&z.center).map(|(a, b)| a * b).sum();
        let arg = s * s + r1 * r1 - c2;
        if !(arg > 0.0) || !(r1 > 0.0) {
            return Err(Error::InadmissibleSphere { node, value: arg });
        }
        let q = arg.sqrt();
        values.push(s - radius + q);
        if with_jacobian {
            jacobian[0].push(r1 / q);
            for p in 0..=n {
                jacobian[p + 1].push(w[p] + (s * w[p] - z.center[p]) / q);
            }
        }
    }
    Ok(SphereSample { values, jacobian })
}

/// Exact height of the sphere with center `z₁..z_{n+1}` and radius `R + z₀`.
pub fn sphere_from_coords(z: &SphereCoords, grid: &Grid, radius: f64) -> Result<RadialField> {
    let sample = sample_sphere(z, grid, radius, false)?;
    RadialField::from_values(grid, radius, sample.values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereFit {
    pub coords: SphereCoords,
    /// `ρ - ρ(z)` at the grid nodes.
    pub residual: Vec<f64>,
    pub iterations: usize,
}

impl SphereFit {
    pub fn residual_sup(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn residual_l2(&self, grid: &Grid, radius: f64) -> f64 {
        let sq: Vec<f64> = self.residual.iter().map(|v| v * v).collect();
        quadrature(&sq, grid, radius).sqrt()
    }
}

/// Initial guess from the projection onto constants and degree-1 harmonics.
pub fn linear_sphere_coords(rho: &RadialField, grid: &Grid) -> SphereCoords {
    let n = grid.dim();
    let radius = rho.radius();
    let proj = project_center(rho.coeffs());
    let measure = grid.unit_measure() * radius.powi(n as i32);
    let norm = coordinate_norm(n, radius);
    SphereCoords {
        offset: proj.coords[0] / measure.sqrt(),
        center: proj.coords[1..].iter().map(|b| b / norm).collect(),
    }
}

const FIT_MAX_ITER: usize = 50;
const FIT_STEP_TOL: f64 = 1e-12;

/// Gauss–Newton least-squares fit of a sphere to `ρ` in the quadrature
/// `L²` norm.
pub fn fit_sphere(rho: &RadialField, grid: &Grid) -> Result<SphereFit> {
    let radius = rho.radius();
    let weights = grid.weights();
    let target = rho.values();
    let mut z = linear_sphere_coords(rho, grid);
    let dim = grid.dim() + 2;
    for iter in 1..=FIT_MAX_ITER {
        let sample = sample_sphere(&z, grid, radius, true)?;
        let mut normal = DMatrix::<f64>::zeros(dim, dim);
        let mut rhs = DVector::<f64>::zeros(dim);
        for (node, w) in weights.iter().enumerate() {
            let res = target[node] - sample.values[node];
            for a in 0..dim {
                let ja = sample.jacobian[a][node] * w;
                rhs[a] += ja * res;
                for b in a..dim {
                    normal[(a, b)] += ja * sample.jacobian[b][node];
                }
            }
        }
        for a in 0..dim {
            for b in 0..a {
                normal[(a, b)] = normal[(b, a)];
            }
        }
        let step = normal
            .cholesky()
            .ok_or(Error::FitDiverged(iter))?
            .solve(&rhs);
        let next: Vec<f64> = z.to_vec().iter().zip(step.iter()).map(|(a, d)| a + d).collect();
        z = SphereCoords::from_slice(&next);
        if step.amax() < FIT_STEP_TOL * radius.max(1.0) {
            let values = sample_sphere(&z, grid, radius, false)?.values;
            let residual = target.iter().zip(&values).map(|(a, b)| a - b).collect();
            return Ok(SphereFit {
                coords: z,
                residual,
                iterations: iter,
            });
        }
    }
    Err(Error::FitDiverged(FIT_MAX_ITER))
}

/// Least-squares slope of `log(value)` against `t` over the trailing
/// `tail_fraction` of the samples.
pub fn fit_decay_rate(series: &[(f64, f64)], tail_fraction: f64) -> Result<f64> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::DecayFit(format!("tail fraction {tail_fraction} not in (0, 1]")));
    }
    let take = ((series.len() as f64) * tail_fraction).round() as usize;
    if take < 10 {
        return Err(Error::DecayFit(format!("{take} samples in window, need at least 10")));
    }
    let window = &series[series.len() - take..];
    if let Some((t, v)) = window.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::DecayFit(format!("non-positive value {v} at t = {t}")));
    }
    let m = take as f64;
    let tbar = window.iter().map(|(t, _)| t).sum::<f64>() / m;
    let ybar = window.iter().map(|(_, v)| v.ln()).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, v) in window {
        let dt = t - tbar;
        sxy += dt * (v.ln() - ybar);
        sxx += dt * dt;
    }
    if sxx == 0.0 {
        return Err(Error::DecayFit("all samples at the same time".into()));
    }
    Ok(sxy / sxx)
}
