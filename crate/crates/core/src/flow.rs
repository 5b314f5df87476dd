//! The nonlocal velocity `G(ρ) = L_ρ (h_{k,ρ} − F(κ_ρ))` and time integration
//! of `ρ' = G(ρ)`.
//!
//! The unknown is the coefficient vector of `ρ`, truncated to degree `L_max`.
//! Pointwise products are formed on the (oversampled) grid and projected back
//! after every evaluation. `h_k` is recomputed at every stage.

use std::fmt;
use std::str::FromStr;

use crate::analysis::{fit_sphere, mixed_volume};
use crate::error::{Error, Result};
use crate::geometry::{curvature_bundle, CurvatureBundle};
use crate::harmonics::{Coeffs, Grid, RadialField};
use crate::speeds::{SpeedKind, SpeedSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Rk4,
    Imex,
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Integrator::Rk4 => "rk4",
            Integrator::Imex => "imex",
        })
    }
}

impl FromStr for Integrator {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rk4" => Ok(Integrator::Rk4),
            "imex" => Ok(Integrator::Imex),
            other => Err(format!("unknown integrator `{other}` (expected rk4 or imex)")),
        }
    }
}

/// Parameters of one flow run.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub n: usize,
    pub radius: f64,
    /// Constraint index, `-1 <= k <= n - 1`.
    pub k: i32,
    pub speed: SpeedSpec,
    pub integrator: Integrator,
    /// Fixed step; `None` selects the default policy for the integrator.
    pub dt: Option<f64>,
    pub c_cfl: f64,
    pub t_end: f64,
    pub l_max: usize,
    pub oversample: usize,
    /// Steps between diagnostic records.
    pub cadence: usize,
    /// Convergence threshold on `sup |G|`.
    pub g_tol: f64,
}

impl FlowConfig {
    pub fn new(n: usize, radius: f64, k: i32, speed: SpeedKind) -> Result<Self> {
        let speed = SpeedSpec::new(speed, n, radius)?;
        let config = FlowConfig {
            n,
            radius,
            k,
            speed,
            integrator: Integrator::Imex,
            dt: None,
            c_cfl: 0.5,
            t_end: 1.0,
            l_max: 16,
            oversample: 2,
            cadence: 10,
            g_tol: 1e-10,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n != 1 && self.n != 2 {
            return Err(Error::UnsupportedDimension(self.n));
        }
        let max = self.n as i32 - 1;
        if self.k < -1 || self.k > max {
            return Err(Error::ConstraintIndex {
                k: self.k,
                n: self.n,
                max,
            });
        }
        if self.speed.dim() != self.n || self.speed.radius() != self.radius {
            return Err(Error::Config("speed was built for a different dimension or radius".into()));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Config(format!("dt must be positive, got {dt}")));
            }
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("T must be positive, got {}", self.t_end)));
        }
        if !(self.c_cfl > 0.0) {
            return Err(Error::Config("c_cfl must be positive".into()));
        }
        if self.l_max < 4 {
            return Err(Error::DegreeTooSmall(self.l_max));
        }
        if self.cadence == 0 {
            return Err(Error::Config("cadence must be at least 1".into()));
        }
        Ok(())
    }

    /// Largest explicit step `c_cfl R² / (F' L (L + n - 1))`.
    pub fn explicit_limit(&self) -> f64 {
        let l = self.l_max as f64;
        self.c_cfl * self.radius * self.radius
            / (self.speed.umbilic_derivative() * l * (l + self.n as f64 - 1.0))
    }

    /// The step actually used: the fixed `dt`, or `0.1 R²/(F' L²)` for imex
    /// and the explicit limit for rk4.
    pub fn effective_dt(&self) -> f64 {
        self.dt.unwrap_or_else(|| match self.integrator {
            Integrator::Imex => {
                let l = self.l_max as f64;
                0.1 * self.radius * self.radius / (self.speed.umbilic_derivative() * l * l)
            }
            Integrator::Rk4 => self.explicit_limit(),
        })
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.l_max, self.oversample)
    }

    /// Eigenvalue of the linearization at 0 on degree-`l` harmonics:
    /// `0` for `l = 0` and `-F'(κ₀) (l-1)(l+n)/R²` otherwise.
    pub fn linear_rate(&self, l: usize) -> f64 {
        linear_rate(self.n, self.radius, self.speed.umbilic_derivative(), l)
    }
}

pub fn linear_rate(n: usize, radius: f64, fprime: f64, l: usize) -> f64 {
    if l == 0 {
        return 0.0;
    }
    let lf = l as f64;
    -fprime * (lf - 1.0) * (lf + n as f64) / (radius * radius)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub rho: RadialField,
}

/// `G(ρ)` with the quantities assembled along the way.
#[derive(Debug, Clone)]
pub struct Velocity {
    /// Degree-`L_max` projection of `G`.
    pub coeffs: Coeffs,
    /// `G` at the grid nodes before projection.
    pub pointwise: Vec<f64>,
    /// `h_{k,ρ}`.
    pub h: f64,
}

impl Velocity {
    pub fn sup(&self) -> f64 {
        self.pointwise.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// One diagnostic record of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub h_k: f64,
    pub volume: f64,
    pub sup_g: f64,
    pub sup_rho: f64,
    pub sphere_residual_sup: f64,
    /// Energy `Σ_p a_{l,p}²` for `l = 0..=L_max`.
    pub mode_energy: Vec<f64>,
    pub kappa_min: f64,
    pub kappa_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// `sup |G| <= g_tol`.
    Converged,
    ReachedEnd,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub steps: usize,
    pub records: Vec<Diagnostics>,
    pub final_state: FlowState,
}

/// A configured flow: the config plus its precomputed grid.
#[derive(Debug, Clone)]
pub struct FlowEngine {
    config: FlowConfig,
    grid: Grid,
}

impl FlowEngine {
    pub fn new(config: FlowConfig) -> Result<Self> {
        config.validate()?;
        let grid = config.grid()?;
        Ok(FlowEngine { config, grid })
    }

    pub fn config(&self) -> &FlowConfig {
        &self.config
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn field(&self, coeffs: Coeffs) -> Result<RadialField> {
        RadialField::from_coeffs(&self.grid, self.config.radius, coeffs)
    }

    /// `h_{k,ρ} = ∫ F E_{k+1} dμ_ρ / ∫ E_{k+1} dμ_ρ`.
    pub fn global_term(&self, rho: &RadialField) -> Result<f64> {
        let bundle = curvature_bundle(rho, &self.grid)?;
        let speed = self.config.speed.eval_speed(&bundle)?;
        self.global_term_from(&bundle, &speed)
    }

    fn global_term_from(&self, bundle: &CurvatureBundle, speed: &[f64]) -> Result<f64> {
        let weight = bundle.elementary((self.config.k + 1) as usize);
        // average deviations from one sample so that constant F gives h = F exactly
        let reference = speed[0];
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, w) in self.grid.weights().iter().enumerate() {
            let m = w * bundle.area_ratio[i] * weight[i];
            num += m * (speed[i] - reference);
            den += m;
        }
        if !(den > 0.0) {
            return Err(Error::ConstraintDegenerate(den));
        }
        Ok(reference + num / den)
    }

    pub fn evaluate_g(&self, rho: &RadialField) -> Result<Velocity> {
        let bundle = curvature_bundle(rho, &self.grid)?;
        let speed = self.config.speed.eval_speed(&bundle)?;
        let h = self.global_term_from(&bundle, &speed)?;
        let pointwise: Vec<f64> = bundle
            .graph_factor
            .iter()
            .zip(&speed)
            .map(|(l, f)| l * (h - f))
            .collect();
        let coeffs = self.grid.analyze(&pointwise, self.config.radius)?;
        Ok(Velocity { coeffs, pointwise, h })
    }

    /// `∂G(0) u`, exact and diagonal in the harmonic basis.
    pub fn linearized_at_zero(&self, u: &Coeffs) -> Coeffs {
        u.scale_by_degree(|l| self.config.linear_rate(l))
    }

    fn stage(&self, base: &Coeffs, dt: f64, slope: &Coeffs, t: f64) -> Result<RadialField> {
        let field = self.field(base.axpy(dt, slope))?;
        field.check_admissible().map_err(|e| Error::StepRejected {
            t,
            suggested_dt: dt / 2.0,
            reason: e.to_string(),
        })?;
        Ok(field)
    }

    /// Classical fourth-order Runge–Kutta step.
    pub fn step_explicit(&self, state: &FlowState, dt: f64) -> Result<FlowState> {
        let g0 = self.evaluate_g(&state.rho)?;
        self.rk4_from(state, dt, &g0)
    }

    fn rk4_from(&self, state: &FlowState, dt: f64, g0: &Velocity) -> Result<FlowState> {
        let limit = self.config.explicit_limit();
        if dt > limit * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt, limit });
        }
        let a = state.rho.coeffs();
        let t = state.t;
        let k1 = &g0.coeffs;
        let k2 = self.evaluate_g(&self.stage(a, 0.5 * dt, k1, t)?)?.coeffs;
        let k3 = self.evaluate_g(&self.stage(a, 0.5 * dt, &k2, t)?)?.coeffs;
        let k4 = self.evaluate_g(&self.stage(a, dt, &k3, t)?)?.coeffs;
        let sum = k1.axpy(2.0, &k2).axpy(2.0, &k3).axpy(1.0, &k4);
        Ok(FlowState {
            t: t + dt,
            rho: self.stage(a, dt / 6.0, &sum, t)?,
        })
    }

    /// Linearly implicit Euler step on the splitting `G = ∂G(0)ρ + G̃(ρ)`:
    /// `(I - dt ∂G(0)) a_new = a + dt G̃(ρ)`.
    pub fn step_imex(&self, state: &FlowState, dt: f64) -> Result<FlowState> {
        let g0 = self.evaluate_g(&state.rho)?;
        self.imex_from(state, dt, &g0)
    }

    fn imex_from(&self, state: &FlowState, dt: f64, g0: &Velocity) -> Result<FlowState> {
        let a = state.rho.coeffs();
        let linear = self.linearized_at_zero(a);
        let rhs = a.axpy(dt, &g0.coeffs.axpy(-1.0, &linear));
        let next = rhs.scale_by_degree(|l| 1.0 / (1.0 - dt * self.config.linear_rate(l)));
        let rho = self.field(next)?;
        rho.check_admissible().map_err(|e| Error::StepRejected {
            t: state.t,
            suggested_dt: dt / 2.0,
            reason: e.to_string(),
        })?;
        Ok(FlowState { t: state.t + dt, rho })
    }

    /// Advance with the configured integrator.
    pub fn step(&self, state: &FlowState, dt: f64) -> Result<FlowState> {
        match self.config.integrator {
            Integrator::Rk4 => self.step_explicit(state, dt),
            Integrator::Imex => self.step_imex(state, dt),
        }
    }

    /// Diagnostic record for a state whose velocity is already known.
    pub fn diagnostics(&self, state: &FlowState, velocity: &Velocity) -> Result<Diagnostics> {
        let rho = &state.rho;
        let bundle = curvature_bundle(rho, &self.grid)?;
        let volume = mixed_volume(rho, &self.grid, self.config.k)?;
        let residual = match fit_sphere(rho, &self.grid) {
            Ok(fit) => fit.residual_sup(),
            Err(_) => f64::NAN,
        };
        let mode_energy = (0..=self.config.l_max).map(|l| rho.coeffs().degree_energy(l)).collect();
        let (kappa_min, kappa_max) = bundle
            .kappa
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &k| (lo.min(k), hi.max(k)));
        Ok(Diagnostics {
            t: state.t,
            h_k: velocity.h,
            volume,
            sup_g: velocity.sup(),
            sup_rho: rho.sup_norm(),
            sphere_residual_sup: residual,
            mode_energy,
            kappa_min,
            kappa_max,
        })
    }

    /// Integrate from `rho0` to `T` or until `sup |G| <= g_tol`, reporting a
    /// record every `cadence` steps and at the final state.
    pub fn run(&self, rho0: RadialField, mut observer: impl FnMut(&Diagnostics)) -> Result<RunOutcome> {
        rho0.check_admissible()?;
        let rho0 = if rho0.coeffs().l_max() == self.config.l_max {
            // keep the evolving unknown band-limited
            self.field(rho0.coeffs().clone())?
        } else {
            return Err(Error::DegreeOverflow {
                degree: rho0.coeffs().l_max(),
                l_max: self.config.l_max,
            });
        };
        let dt = self.config.effective_dt();
        let t_end = self.config.t_end;
        let mut state = FlowState { t: 0.0, rho: rho0 };
        let mut records = Vec::new();
        let mut steps = 0usize;
        loop {
            let velocity = self.evaluate_g(&state.rho)?;
            let converged = velocity.sup() <= self.config.g_tol;
            let finished = converged || state.t >= t_end;
            if steps % self.config.cadence == 0 || finished {
                let d = self.diagnostics(&state, &velocity)?;
                observer(&d);
                records.push(d);
            }
            if finished {
                let status = if converged {
                    RunStatus::Converged
                } else {
                    RunStatus::ReachedEnd
                };
                return Ok(RunOutcome {
                    status,
                    steps,
                    records,
                    final_state: state,
                });
            }
            let next_t = ((steps + 1) as f64 * dt).min(t_end);
            let h = next_t - state.t;
            let mut next = match self.config.integrator {
                Integrator::Rk4 => self.rk4_from(&state, h, &velocity)?,
                Integrator::Imex => self.imex_from(&state, h, &velocity)?,
            };
            next.t = next_t;
            if next.rho.values().iter().any(|v| !v.is_finite()) {
                return Err(Error::StepRejected {
                    t: state.t,
                    suggested_dt: h / 2.0,
                    reason: "non-finite height".into(),
                });
            }
            state = next;
            steps += 1;
        }
    }
}
