//! Run output (`run.csv`, final snapshot) and the named experiment presets.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::SymmetricEigen;

use super::config::{ConfigEntries, InitSpec, RunSpec};
use super::snapshot::Snapshot;
use crate::analysis::{
    fit_decay_rate, fit_sphere, mixed_volume, numerical_jacobian, sphere_from_coords, Jacobian,
};
use crate::error::{Error, Result};
use crate::flow::{Diagnostics, FlowConfig, FlowEngine, RunOutcome, RunStatus};

pub const RUN_COLUMNS: &[&str] = &[
    "t",
    "h_k",
    "V",
    "sup_G",
    "sup_rho",
    "sphere_residual_sup",
    "mode_energy_l2",
    "mode_energy_l3",
    "mode_energy_l4",
    "mode_energy_l5",
    "mode_energy_l6",
    "mode_energy_l7",
    "mode_energy_l8",
];

/// One CSV row; every number in shortest round-trip form.
pub fn format_row(d: &Diagnostics) -> String {
    let mut fields = vec![d.t, d.h_k, d.volume, d.sup_g, d.sup_rho, d.sphere_residual_sup];
    fields.extend((2..=8).map(|l| d.mode_energy.get(l).copied().unwrap_or(0.0)));
    let parts: Vec<String> = fields.iter().map(|v| format!("{v:e}")).collect();
    parts.join(",")
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// `#`-prefixed provenance lines written above the CSV header.
pub fn run_header(spec: &RunSpec) -> Vec<String> {
    let f = &spec.flow;
    let nodes = match f.grid() {
        Ok(g) => {
            let (a, b) = g.shape();
            format!("{a}x{b}")
        }
        Err(_) => "?".into(),
    };
    let mut out = vec![
        format!("# mixedflow {}", env!("CARGO_PKG_VERSION")),
        format!("# grid n={} L_max={} oversample={} nodes={nodes}", f.n, f.l_max, f.oversample),
    ];
    out.extend(spec.echo().into_iter().map(|(k, v)| format!("# {k} = {v}")));
    out
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub outcome: RunOutcome,
    pub run_csv: PathBuf,
    pub snapshot: PathBuf,
}

/// Run `spec` and stream its records to `out_dir/run.csv`; the final state
/// goes to `out_dir/final.snap`.
pub fn execute_run(spec: &RunSpec, out_dir: &Path) -> Result<RunArtifacts> {
    std::fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let engine = FlowEngine::new(spec.flow.clone())?;
    let rho0 = spec.init.build(engine.grid(), spec.flow.radius)?;
    let run_csv = out_dir.join("run.csv");
    let file = File::create(&run_csv).map_err(|e| io_err(&run_csv, e))?;
    let mut w = BufWriter::new(file);
    let mut write_err: Option<std::io::Error> = None;
    let mut emit = |w: &mut BufWriter<File>, line: &str| {
        if write_err.is_none() {
            if let Err(e) = writeln!(w, "{line}") {
                write_err = Some(e);
            }
        }
    };
    for line in run_header(spec) {
        emit(&mut w, &line);
    }
    emit(&mut w, &RUN_COLUMNS.join(","));
    let result = engine.run(rho0, |d| emit(&mut w, &format_row(d)));
    if let Some(e) = write_err {
        return Err(io_err(&run_csv, e));
    }
    w.flush().map_err(|e| io_err(&run_csv, e))?;
    let outcome = result?;
    let snapshot = out_dir.join("final.snap");
    Snapshot::from_state(&outcome.final_state).write(&snapshot)?;
    Ok(RunArtifacts {
        outcome,
        run_csv,
        snapshot,
    })
}

/// One pass/fail assertion with its threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `<=` or `==`.
    pub relation: &'static str,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            relation: "<=",
            passed: value <= threshold,
        }
    }

    pub fn equals(name: &str, value: f64, expected: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold: expected,
            relation: "==",
            passed: value == expected,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {:e} {} {:e} {}",
            self.name,
            self.value,
            self.relation,
            self.threshold,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Stationarity,
    LinearDecay,
    ZeroModes,
    Conservation,
    NonlinearConvergence,
    Spectrum,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Stationarity,
        Preset::LinearDecay,
        Preset::ZeroModes,
        Preset::Conservation,
        Preset::NonlinearConvergence,
        Preset::Spectrum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Stationarity => "stationarity",
            Preset::LinearDecay => "linear-decay",
            Preset::ZeroModes => "zero-modes",
            Preset::Conservation => "conservation",
            Preset::NonlinearConvergence => "nonlinear-convergence",
            Preset::Spectrum => "spectrum",
        }
    }

    /// The complete configuration of the preset before overrides.
    pub fn settings(self) -> Vec<(&'static str, &'static str)> {
        let mut s = vec![("n", "2"), ("R", "1"), ("k", "-1"), ("speed", "mean"), ("L_max", "16")];
        s.extend(match self {
            Preset::Stationarity => vec![("init", "const:0.5"), ("T", "1"), ("dt", "auto")],
            Preset::LinearDecay => vec![
                ("init", "harmonic:2,1,1e-4"),
                ("integrator", "imex"),
                ("dt", "1e-4"),
                ("T", "1"),
                ("cadence", "100"),
            ],
            Preset::ZeroModes => vec![
                ("init", "harmonic:0,1,1e-3;1,1,1e-3;1,2,1e-3;1,3,-1e-3"),
                ("integrator", "imex"),
                ("dt", "1e-3"),
                ("T", "2"),
                ("cadence", "10"),
            ],
            Preset::Conservation => vec![
                ("k", "0"),
                ("init", "random:0.05,6,42"),
                ("integrator", "rk4"),
                ("dt", "1e-4"),
                ("T", "0.5"),
                ("cadence", "100"),
            ],
            Preset::NonlinearConvergence => vec![
                ("init", "random:0.05,6,42"),
                ("integrator", "imex"),
                ("dt", "auto"),
                ("T", "3"),
                ("cadence", "20"),
            ],
            Preset::Spectrum => vec![("L_max", "8"), ("init", "const:0")],
        });
        // later entries replace earlier ones
        let mut out: Vec<(&'static str, &'static str)> = Vec::new();
        for (k, v) in s {
            out.retain(|(key, _)| *key != k);
            out.push((k, v));
        }
        out
    }

    pub fn entries(self) -> ConfigEntries {
        ConfigEntries::from_pairs(&self.settings()).expect("preset keys are valid")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                format!("unknown preset `{s}` (one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub preset: Preset,
    pub spec: RunSpec,
    pub out_dir: PathBuf,
    pub checks: Vec<Check>,
    /// Extra `key: value` lines for the summary.
    pub notes: Vec<(String, String)>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn summary_text(&self) -> String {
        let mut s = format!("preset: {}\n", self.preset);
        for (k, v) in self.spec.echo() {
            s.push_str(&format!("config {k} = {v}\n"));
        }
        for (k, v) in &self.notes {
            s.push_str(&format!("{k}: {v}\n"));
        }
        for c in &self.checks {
            s.push_str(&format!("check {c}\n"));
        }
        s.push_str(&format!("result: {}\n", if self.passed() { "PASS" } else { "FAIL" }));
        s
    }
}

/// Spectrum checks on a numerical Jacobian at 0.
pub fn spectrum_checks(config: &FlowConfig, jac: &Jacobian) -> Vec<Check> {
    let lmax = jac.report.lambda_max_abs();
    let mut diag_err: f64 = 0.0;
    for (j, &l) in jac.degrees.iter().enumerate() {
        let want = config.linear_rate(l);
        let got = jac.matrix[(j, j)];
        let err = if want == 0.0 {
            got.abs() / lmax
        } else {
            ((got - want) / want).abs()
        };
        diag_err = diag_err.max(err);
    }
    let sym = (&jac.matrix + jac.matrix.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let zero = eig.eigenvalues.iter().filter(|l| l.abs() < 1e-6 * lmax).count();
    vec![
        Check::at_most("offdiag_max/|lambda_max|", jac.report.offdiag_max.unwrap_or(f64::NAN) / lmax, 1e-6),
        Check::at_most(
            "asymmetry_max/|lambda_max|",
            jac.report.asymmetry_max.unwrap_or(f64::NAN) / lmax,
            1e-7,
        ),
        Check::at_most("diagonal_rel_err", diag_err, 1e-6),
        Check::equals("zero_multiplicity", zero as f64, (config.n + 2) as f64),
    ]
}

fn amplitude_series(records: &[Diagnostics], degrees: &[usize]) -> Vec<(f64, f64)> {
    records
        .iter()
        .map(|d| {
            let e: f64 = degrees.iter().map(|&l| d.mode_energy.get(l).copied().unwrap_or(0.0)).sum();
            (d.t, e.sqrt())
        })
        .collect()
}

/// Run a preset with `key=value` overrides and write `run.csv`,
/// `spectrum.csv` (spectrum preset) and `summary.txt` to the output
/// directory: `out_dir` if given, else the config's `out_dir` key, else
/// `out/<preset>`.
pub fn run_experiment(preset: Preset, overrides: &[String], out_dir: Option<&Path>) -> Result<ExperimentReport> {
    let mut entries = preset.entries();
    entries.set("out_dir", &format!("out/{}", preset.name()))?;
    for o in overrides {
        entries.set_pair(o)?;
    }
    let spec = entries.build()?;
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| spec.out_dir.clone());
    std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    let cfg = spec.flow.clone();
    let mut notes = Vec::new();
    let checks = match preset {
        Preset::Spectrum => {
            let jac = numerical_jacobian(&cfg, cfg.l_max, 1e-5 * cfg.radius)?;
            let path = dir.join("spectrum.csv");
            std::fs::write(&path, jac.report.to_csv()).map_err(|e| io_err(&path, e))?;
            notes.push(("basis_dimension".into(), jac.degrees.len().to_string()));
            spectrum_checks(&cfg, &jac)
        }
        _ => {
            let art = execute_run(&spec, &dir)?;
            let out = &art.outcome;
            notes.push(("status".into(), format!("{:?}", out.status)));
            notes.push(("steps".into(), out.steps.to_string()));
            notes.push(("final_t".into(), format!("{:e}", out.final_state.t)));
            experiment_checks(preset, &spec, out, &mut notes)?
        }
    };
    let report = ExperimentReport {
        preset,
        spec,
        out_dir: dir.clone(),
        checks,
        notes,
    };
    let path = dir.join("summary.txt");
    std::fs::write(&path, report.summary_text()).map_err(|e| io_err(&path, e))?;
    Ok(report)
}

fn experiment_checks(
    preset: Preset,
    spec: &RunSpec,
    out: &RunOutcome,
    notes: &mut Vec<(String, String)>,
) -> Result<Vec<Check>> {
    let cfg = &spec.flow;
    let first = &out.records[0];
    let last = out.records.last().unwrap();
    Ok(match preset {
        Preset::Stationarity => {
            let f0 = cfg.speed.umbilic_value();
            vec![
                Check::at_most("sup_G(0)/F(kappa0)", first.sup_g / f0, 1e-10),
                Check::equals(
                    "converged",
                    (out.status == RunStatus::Converged) as u8 as f64,
                    1.0,
                ),
            ]
        }
        Preset::LinearDecay => {
            let l = match &spec.init {
                InitSpec::Harmonic(t) => t[0].0,
                _ => 2,
            };
            let predicted = cfg.linear_rate(l);
            let rate = fit_decay_rate(&amplitude_series(&out.records, &[l]), 0.5)?;
            notes.push((format!("fitted_rate_l{l}"), format!("{rate:e}")));
            notes.push(("predicted_rate".into(), format!("{predicted:e}")));
            vec![Check::at_most("rate_rel_err", ((rate - predicted) / predicted).abs(), 1e-2)]
        }
        Preset::ZeroModes => {
            let rate = fit_decay_rate(&amplitude_series(&out.records, &[0, 1]), 0.5)?;
            notes.push(("fitted_rate_center".into(), format!("{rate:e}")));
            let grid = cfg.grid()?;
            let fit = fit_sphere(&out.final_state.rho, &grid)?;
            let bound = 1e-3 * (cfg.n as f64 + 2.0) / (cfg.radius * cfg.radius);
            vec![
                Check::at_most("|rate|", rate.abs(), bound),
                Check::at_most("final_fit_residual_sup", fit.residual_sup(), 1e-8),
            ]
        }
        Preset::Conservation => {
            let drift = out
                .records
                .iter()
                .map(|d| ((d.volume - first.volume) / first.volume).abs())
                .fold(0.0, f64::max);
            notes.push(("V0".into(), format!("{:e}", first.volume)));
            vec![Check::at_most("max_rel_drift", drift, 1e-6)]
        }
        Preset::NonlinearConvergence => {
            let t_end = last.t;
            let tail: Vec<(f64, f64)> = out
                .records
                .iter()
                .filter(|d| d.t >= t_end / 3.0)
                .map(|d| (d.t, d.sphere_residual_sup))
                .collect();
            let increases = tail.windows(2).filter(|w| !(w[1].1 <= w[0].1)).count();
            let rate = fit_decay_rate(&tail, 0.5)?;
            let lambda1 = cfg.linear_rate(2);
            let grid = cfg.grid()?;
            let fit = fit_sphere(&out.final_state.rho, &grid)?;
            let sphere = sphere_from_coords(&fit.coords, &grid, cfg.radius)?;
            let v_fit = mixed_volume(&sphere, &grid, cfg.k)?;
            let v0 = first.volume;
            notes.push(("transient_end".into(), format!("{:e}", t_end / 3.0)));
            notes.push(("fitted_residual_rate".into(), format!("{rate:e}")));
            notes.push(("lambda1".into(), format!("{lambda1:e}")));
            notes.push((
                "final_sphere".into(),
                fit.coords.to_vec().iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(","),
            ));
            vec![
                Check::equals("residual_increases_after_transient", increases as f64, 0.0),
                Check::at_most("rate_rel_err", ((rate - lambda1) / lambda1).abs(), 0.1),
                Check::at_most("volume_fit_rel_err", ((v_fit - v0) / v0).abs(), 1e-4),
            ]
        }
        Preset::Spectrum => unreachable!("handled without a run"),
    })
}
