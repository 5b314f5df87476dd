//! Line-based `key = value` run configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{sphere_from_coords, SphereCoords};
use crate::error::{Error, Result};
use crate::flow::{FlowConfig, Integrator};
use crate::harmonics::{Coeffs, Grid, RadialField};
use crate::speeds::{SpeedKind, SpeedSpec};

pub const KEYS: &[&str] = &[
    "n", "R", "k", "speed", "integrator", "dt", "T", "L_max", "init", "out_dir", "cadence", "c_cfl",
    "g_tol", "oversample",
];

pub const DEFAULT_SEED: u64 = 42;

/// Initial height function.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Const(f64),
    /// Sum of `amp · Y_{l,p}` terms in the orthonormal basis.
    Harmonic(Vec<(usize, usize, f64)>),
    /// Seeded uniform coefficients on degrees `2..=lmax`, scaled to `sup |ρ| = amp`.
    Random { amp: f64, lmax: usize, seed: u64 },
    /// Exact sphere `(z₀, z₁, …, z_{n+1})`.
    Sphere(Vec<f64>),
}

impl fmt::Display for InitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitSpec::Const(c) => write!(f, "const:{c:e}"),
            InitSpec::Harmonic(terms) => {
                let parts: Vec<String> = terms.iter().map(|(l, p, a)| format!("{l},{p},{a:e}")).collect();
                write!(f, "harmonic:{}", parts.join(";"))
            }
            InitSpec::Random { amp, lmax, seed } => write!(f, "random:{amp:e},{lmax},{seed}"),
            InitSpec::Sphere(z) => {
                let parts: Vec<String> = z.iter().map(|v| format!("{v:e}")).collect();
                write!(f, "sphere:{}", parts.join(","))
            }
        }
    }
}

fn number<T: FromStr>(s: &str, what: &str) -> std::result::Result<T, String>
where
    T::Err: fmt::Display,
{
    s.trim().parse().map_err(|e| format!("{what} `{}`: {e}", s.trim()))
}

impl FromStr for InitSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (kind, args) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| format!("init `{s}` must look like kind:args"))?;
        match kind.trim() {
            "const" => Ok(InitSpec::Const(number(args, "constant")?)),
            "harmonic" => {
                let mut terms = Vec::new();
                for term in args.split(';') {
                    let f: Vec<&str> = term.split(',').collect();
                    if f.len() != 3 {
                        return Err(format!("harmonic term `{term}` needs l,p,amp"));
                    }
                    terms.push((number(f[0], "degree")?, number(f[1], "index")?, number(f[2], "amplitude")?));
                }
                Ok(InitSpec::Harmonic(terms))
            }
            "random" => {
                let f: Vec<&str> = args.split(',').collect();
                if f.len() != 2 && f.len() != 3 {
                    return Err("random init needs amp,lmax[,seed]".into());
                }
                let seed = match f.get(2) {
                    Some(s) => number(s, "seed")?,
                    None => DEFAULT_SEED,
                };
                Ok(InitSpec::Random {
                    amp: number(f[0], "amplitude")?,
                    lmax: number(f[1], "degree")?,
                    seed,
                })
            }
            "sphere" => {
                let z = args.split(',').map(|v| number(v, "coordinate")).collect::<std::result::Result<_, _>>()?;
                Ok(InitSpec::Sphere(z))
            }
            other => Err(format!("unknown init kind `{other}`")),
        }
    }
}

impl InitSpec {
    /// Sample the initial height on `grid`.
    pub fn build(&self, grid: &Grid, radius: f64) -> Result<RadialField> {
        let n = grid.dim();
        let l_max = grid.l_max();
        let field = match self {
            InitSpec::Const(c) => RadialField::constant(grid, radius, *c),
            InitSpec::Harmonic(terms) => {
                let mut c = Coeffs::zeros(n, l_max);
                for &(l, p, amp) in terms {
                    let i = c.index(l, p)?;
                    c.as_mut_slice()[i] += amp;
                }
                RadialField::from_coeffs(grid, radius, c)?
            }
            InitSpec::Random { amp, lmax, seed } => {
                if *lmax > l_max {
                    return Err(Error::DegreeOverflow { degree: *lmax, l_max });
                }
                if *lmax < 2 {
                    return Err(Error::Config("random init needs lmax >= 2".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut c = Coeffs::zeros(n, l_max);
                for i in 0..c.len() {
                    let l = c.degree_of(i);
                    if (2..=*lmax).contains(&l) {
                        c.as_mut_slice()[i] = rng.gen_range(-1.0..1.0);
                    }
                }
                let raw = RadialField::from_coeffs(grid, radius, c.clone())?;
                let scale = amp / raw.sup_norm();
                RadialField::from_coeffs(grid, radius, c.scale_by_degree(|_| scale))?
            }
            InitSpec::Sphere(z) => {
                if z.len() != n + 2 {
                    return Err(Error::ShapeMismatch {
                        expected: n + 2,
                        got: z.len(),
                    });
                }
                sphere_from_coords(&SphereCoords::from_slice(z), grid, radius)?
            }
        };
        field.check_admissible()?;
        Ok(field)
    }
}

/// A fully validated run: flow parameters, initial data and output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub flow: FlowConfig,
    pub init: InitSpec,
    pub out_dir: PathBuf,
}

impl RunSpec {
    /// `key = value` lines that reproduce this spec.
    pub fn echo(&self) -> Vec<(String, String)> {
        let f = &self.flow;
        let dt = match f.dt {
            Some(dt) => format!("{dt:e}"),
            None => "auto".into(),
        };
        vec![
            ("n".into(), f.n.to_string()),
            ("R".into(), format!("{:e}", f.radius)),
            ("k".into(), f.k.to_string()),
            ("speed".into(), f.speed.kind().to_string()),
            ("integrator".into(), f.integrator.to_string()),
            ("dt".into(), dt),
            ("T".into(), format!("{:e}", f.t_end)),
            ("L_max".into(), f.l_max.to_string()),
            ("oversample".into(), f.oversample.to_string()),
            ("c_cfl".into(), format!("{:e}", f.c_cfl)),
            ("g_tol".into(), format!("{:e}", f.g_tol)),
            ("cadence".into(), f.cadence.to_string()),
            ("init".into(), self.init.to_string()),
        ]
    }
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    /// `None` for programmatic overrides.
    line: Option<usize>,
}

/// Raw, syntactically valid entries prior to semantic validation.
#[derive(Debug, Clone, Default)]
pub struct ConfigEntries {
    entries: Vec<Entry>,
}

fn located(line: Option<usize>, msg: String) -> Error {
    match line {
        Some(line) => Error::Parse { line, msg },
        None => Error::Config(msg),
    }
}

impl ConfigEntries {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = ConfigEntries::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected `key = value`, got `{body}`"),
            })?;
            let key = key.trim();
            if out.position(key).is_some() {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate key `{key}`"),
                });
            }
            out.insert(key, value.trim(), Some(line))?;
        }
        Ok(out)
    }

    pub fn from_pairs<K: AsRef<str>, V: AsRef<str>>(pairs: &[(K, V)]) -> Result<Self> {
        let mut out = ConfigEntries::default();
        for (k, v) in pairs {
            out.set(k.as_ref(), v.as_ref())?;
        }
        Ok(out)
    }

    fn position(&self, key: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.key == key)
    }

    fn insert(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(located(line, format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(located(line, format!("empty value for `{key}`")));
        }
        self.entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line,
        });
        Ok(())
    }

    /// Insert or replace one entry.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if let Some(i) = self.position(key) {
            self.entries.remove(i);
        }
        self.insert(key, value.trim(), None)
    }

    /// Apply a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{pair}` must be key=value")))?;
        self.set(k.trim(), v)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.position(key).map(|i| self.entries[i].value.as_str())
    }

    fn value<T: FromStr>(&self, key: &str) -> Result<Option<(T, Option<usize>)>>
    where
        T::Err: fmt::Display,
    {
        let Some(i) = self.position(key) else {
            return Ok(None);
        };
        let e = &self.entries[i];
        let v = e
            .value
            .parse::<T>()
            .map_err(|err| located(e.line, format!("{key}: cannot parse `{}`: {err}", e.value)))?;
        Ok(Some((v, e.line)))
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<(T, Option<usize>)>
    where
        T::Err: fmt::Display,
    {
        self.value(key)?
            .ok_or_else(|| Error::Config(format!("missing required key `{key}`")))
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.position(key).and_then(|i| self.entries[i].line)
    }

    /// Semantic validation into a [`RunSpec`].
    pub fn build(&self) -> Result<RunSpec> {
        let (n, n_line): (usize, _) = self.required("n")?;
        if n != 1 && n != 2 {
            return Err(located(n_line, Error::UnsupportedDimension(n).to_string()));
        }
        let (radius, r_line): (f64, _) = self.required("R")?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(located(r_line, format!("R must be positive, got {radius}")));
        }
        let (k, k_line): (i32, _) = self.required("k")?;
        if k < -1 || k > n as i32 - 1 {
            return Err(located(
                k_line,
                Error::ConstraintIndex { k, n, max: n as i32 - 1 }.to_string(),
            ));
        }
        let (kind, s_line): (SpeedKind, _) = self.required("speed")?;
        let speed = SpeedSpec::new(kind, n, radius).map_err(|e| located(s_line, e.to_string()))?;
        let mut flow = FlowConfig {
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
        if let Some((v, _)) = self.value("integrator")? {
            flow.integrator = v;
        }
        if let Some(i) = self.position("dt") {
            let e = &self.entries[i];
            if e.value != "auto" {
                let dt: f64 = e
                    .value
                    .parse()
                    .map_err(|err| located(e.line, format!("dt: cannot parse `{}`: {err}", e.value)))?;
                flow.dt = Some(dt);
            }
        }
        if let Some((v, _)) = self.value("T")? {
            flow.t_end = v;
        }
        if let Some((v, _)) = self.value("L_max")? {
            flow.l_max = v;
        }
        if let Some((v, _)) = self.value("oversample")? {
            flow.oversample = v;
        }
        if let Some((v, _)) = self.value("c_cfl")? {
            flow.c_cfl = v;
        }
        if let Some((v, _)) = self.value("g_tol")? {
            flow.g_tol = v;
        }
        if let Some((v, _)) = self.value("cadence")? {
            flow.cadence = v;
        }
        flow.validate().map_err(|e| {
            let key = match &e {
                Error::DegreeTooSmall(_) => "L_max",
                Error::Config(m) if m.starts_with("dt") => "dt",
                Error::Config(m) if m.starts_with('T') => "T",
                Error::Config(m) if m.starts_with("c_cfl") => "c_cfl",
                Error::Config(m) if m.starts_with("cadence") => "cadence",
                _ => "",
            };
            located(self.line_of(key), e.to_string())
        })?;
        if flow.integrator == Integrator::Rk4 {
            if let Some(dt) = flow.dt {
                let limit = flow.explicit_limit();
                if dt > limit {
                    return Err(located(
                        self.line_of("dt"),
                        Error::CflViolation { dt, limit }.to_string(),
                    ));
                }
            }
        }
        let (init, i_line): (InitSpec, _) = self.required("init")?;
        let grid = flow.grid()?;
        init.build(&grid, radius).map_err(|e| located(i_line, format!("init: {e}")))?;
        let out_dir = self.get("out_dir").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out"));
        Ok(RunSpec { flow, init, out_dir })
    }
}

pub fn parse_config(text: &str) -> Result<RunSpec> {
    ConfigEntries::parse(text)?.build()
}

pub fn read_config(path: &Path) -> Result<RunSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}
