//! Symmetric speed functions `F(κ)` and their umbilic derivative.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{elementary_symmetric, CurvatureBundle};

/// Expression in the normalized mean curvatures `H_m = E_m / C(n, m)`, used
/// for speeds outside the built-in families.
#[derive(Debug, Clone, PartialEq)]
pub enum SpeedExpr {
    Const(f64),
    /// `H_m`, `1 <= m <= n`.
    H(usize),
    Add(Box<SpeedExpr>, Box<SpeedExpr>),
    Mul(Box<SpeedExpr>, Box<SpeedExpr>),
    Div(Box<SpeedExpr>, Box<SpeedExpr>),
    Pow(Box<SpeedExpr>, f64),
}

impl SpeedExpr {
    fn eval(&self, h: &[f64]) -> f64 {
        match self {
            SpeedExpr::Const(c) => *c,
            SpeedExpr::H(m) => h[*m],
            SpeedExpr::Add(a, b) => a.eval(h) + b.eval(h),
            SpeedExpr::Mul(a, b) => a.eval(h) * b.eval(h),
            SpeedExpr::Div(a, b) => a.eval(h) / b.eval(h),
            SpeedExpr::Pow(a, e) => a.eval(h).powf(*e),
        }
    }

    fn max_order(&self) -> usize {
        match self {
            SpeedExpr::Const(_) => 0,
            SpeedExpr::H(m) => *m,
            SpeedExpr::Add(a, b) | SpeedExpr::Mul(a, b) | SpeedExpr::Div(a, b) => a.max_order().max(b.max_order()),
            SpeedExpr::Pow(a, _) => a.max_order(),
        }
    }

    fn min_order(&self) -> usize {
        match self {
            SpeedExpr::Const(_) => usize::MAX,
            SpeedExpr::H(m) => *m,
            SpeedExpr::Add(a, b) | SpeedExpr::Mul(a, b) | SpeedExpr::Div(a, b) => a.min_order().min(b.min_order()),
            SpeedExpr::Pow(a, _) => a.min_order(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpeedKind {
    /// `F = E₁ = κ₁ + … + κ_n`.
    Mean,
    /// `F = H_m^β`.
    PowerMean { m: usize, beta: f64 },
    /// `F = E_l`.
    Elementary { l: usize },
    Custom(SpeedExpr),
}

/// A speed function bound to a dimension and reference radius, validated to
/// satisfy `∂F/∂κ_i(κ₀) > 0` at `κ₀ = (1/R, …, 1/R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedSpec {
    kind: SpeedKind,
    n: usize,
    radius: f64,
    umbilic: f64,
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl SpeedSpec {
    pub fn new(kind: SpeedKind, n: usize, radius: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedDimension(n));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("radius must be positive, got {radius}")));
        }
        match &kind {
            SpeedKind::Mean => {}
            SpeedKind::PowerMean { m, beta } => {
                if *m < 1 || *m > n {
                    return Err(Error::BadSpeedParameter {
                        name: "power_mean",
                        reason: format!("m = {m} must lie in 1..={n}"),
                    });
                }
                if !(*beta > 0.0 && beta.is_finite()) {
                    return Err(Error::BadSpeedParameter {
                        name: "power_mean",
                        reason: format!("beta = {beta} must be positive"),
                    });
                }
            }
            SpeedKind::Elementary { l } => {
                if *l < 1 || *l > n {
                    return Err(Error::BadSpeedParameter {
                        name: "elementary",
                        reason: format!("l = {l} must lie in 1..={n}"),
                    });
                }
            }
            SpeedKind::Custom(expr) => {
                if expr.max_order() > n || expr.min_order() == 0 {
                    return Err(Error::BadSpeedParameter {
                        name: "custom",
                        reason: format!("mean-curvature orders must lie in 1..={n}"),
                    });
                }
            }
        }
        let mut spec = SpeedSpec {
            kind,
            n,
            radius,
            umbilic: 0.0,
        };
        let d = spec.closed_form_derivative().unwrap_or_else(|| spec.finite_difference_derivative());
        if !(d > 0.0) {
            return Err(Error::SpeedNotAdmissible(d));
        }
        spec.umbilic = d;
        Ok(spec)
    }

    pub fn mean(n: usize, radius: f64) -> Self {
        SpeedSpec::new(SpeedKind::Mean, n, radius).expect("mean curvature is always admissible")
    }

    pub fn kind(&self) -> &SpeedKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `∂F/∂κ₁(κ₀)`.
    pub fn umbilic_derivative(&self) -> f64 {
        self.umbilic
    }

    /// `F(κ₀)` on the reference sphere.
    pub fn umbilic_value(&self) -> f64 {
        self.eval_kappa(&vec![1.0 / self.radius; self.n]).expect("umbilic point is admissible")
    }

    fn closed_form_derivative(&self) -> Option<f64> {
        let (n, r) = (self.n as f64, self.radius);
        match &self.kind {
            SpeedKind::Mean => Some(1.0),
            SpeedKind::PowerMean { m, beta } => {
                let mb = *m as f64 * beta;
                Some(mb / n * r.powf(1.0 - mb))
            }
            SpeedKind::Elementary { l } => Some(binomial(self.n - 1, l - 1) * r.powi(1 - *l as i32)),
            SpeedKind::Custom(_) => None,
        }
    }

    /// Central difference of `F` in `κ₁` at `κ₀` with step `1e-6/R`.
    pub fn finite_difference_derivative(&self) -> f64 {
        let h = 1e-6 / self.radius;
        let mut k = vec![1.0 / self.radius; self.n];
        k[0] += h;
        let plus = self.eval_kappa(&k).unwrap_or(f64::NAN);
        k[0] -= 2.0 * h;
        let minus = self.eval_kappa(&k).unwrap_or(f64::NAN);
        (plus - minus) / (2.0 * h)
    }

    /// `F` from a vector of principal curvatures.
    pub fn eval_kappa(&self, kappa: &[f64]) -> Result<f64> {
        let sym: Vec<f64> = (0..=self.n)
            .map(|l| elementary_symmetric(kappa, l))
            .collect::<Result<_>>()?;
        self.eval_sym(&sym, 0)
    }

    fn eval_sym(&self, sym: &[f64], node: usize) -> Result<f64> {
        let n = self.n;
        Ok(match &self.kind {
            SpeedKind::Mean => sym[1],
            SpeedKind::Elementary { l } => sym[*l],
            SpeedKind::PowerMean { m, beta } => {
                let h = sym[*m] / binomial(n, *m);
                if beta.fract() == 0.0 && *beta <= i32::MAX as f64 {
                    h.powi(*beta as i32)
                } else if h < 0.0 {
                    return Err(Error::NegativePowerBase { node, base: h });
                } else {
                    h.powf(*beta)
                }
            }
            SpeedKind::Custom(expr) => {
                let h: Vec<f64> = (0..=n).map(|m| sym[m] / binomial(n, m)).collect();
                expr.eval(&h)
            }
        })
    }

    /// Pointwise `F(κ_ρ)` over a curvature bundle.
    pub fn eval_speed(&self, bundle: &CurvatureBundle) -> Result<Vec<f64>> {
        let mut sym = vec![0.0; self.n + 1];
        (0..bundle.node_count())
            .map(|node| {
                for (l, s) in sym.iter_mut().enumerate() {
                    *s = bundle.sym[l][node];
                }
                let f = self.eval_sym(&sym, node)?;
                if f.is_finite() {
                    Ok(f)
                } else {
                    Err(Error::NonFinite { what: "speed", node })
                }
            })
            .collect()
    }
}

impl fmt::Display for SpeedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpeedKind::Mean => write!(f, "mean"),
            SpeedKind::PowerMean { m, beta } => write!(f, "power_mean m={m} beta={beta}"),
            SpeedKind::Elementary { l } => write!(f, "elementary l={l}"),
            SpeedKind::Custom(e) => write!(f, "custom {e:?}"),
        }
    }
}

/// Parses the configuration grammar `mean`, `power_mean m=<int> beta=<real>`,
/// `elementary l=<int>`.
impl FromStr for SpeedKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut words = s.split_whitespace();
        let name = words.next().ok_or("empty speed")?;
        let mut params = std::collections::BTreeMap::new();
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| format!("expected key=value, got `{w}`"))?;
            if params.insert(k.to_string(), v.to_string()).is_some() {
                return Err(format!("duplicate speed parameter `{k}`"));
            }
        }
        let mut take = |key: &str| params.remove(key).ok_or_else(|| format!("speed `{name}` needs `{key}=`"));
        let kind = match name {
            "mean" => SpeedKind::Mean,
            "power_mean" => {
                let m = take("m")?.parse().map_err(|e| format!("m: {e}"))?;
                let beta = take("beta")?.parse().map_err(|e| format!("beta: {e}"))?;
                SpeedKind::PowerMean { m, beta }
            }
            "elementary" => {
                let l = take("l")?.parse().map_err(|e| format!("l: {e}"))?;
                SpeedKind::Elementary { l }
            }
            other => return Err(format!("unknown speed `{other}`")),
        };
        if let Some(k) = params.keys().next() {
            return Err(format!("unknown speed parameter `{k}`"));
        }
        Ok(kind)
    }
}
