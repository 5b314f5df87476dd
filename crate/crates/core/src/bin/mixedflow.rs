use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use mixedflow::analysis::{fit_sphere, numerical_jacobian};
use mixedflow::harmonics::Grid;
use mixedflow::io::{execute_run, read_config, run_experiment, spectrum_checks, Preset, Snapshot};

#[derive(Parser)]
#[command(name = "mixedflow", version, about = "Mixed-volume-preserving curvature flow of radial graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the flow described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a named experiment and check it against the linear theory.
    Preset {
        /// stationarity, linear-decay, zero-modes, conservation,
        /// nonlinear-convergence or spectrum
        name: Preset,
        /// Override a config key, e.g. `--set T=0.5`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Numerical Jacobian of the flow at the reference sphere.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        lmax: usize,
        #[arg(long, default_value_t = 1e-5)]
        eps: f64,
    },
    /// Fit a round sphere to a snapshot.
    FitSphere {
        #[arg(long)]
        snapshot: PathBuf,
    },
}

fn out_dir(default: &Path) -> PathBuf {
    std::env::var_os("MIXEDFLOW_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| default.to_path_buf())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config } => {
            let spec = read_config(&config).with_context(|| format!("reading {}", config.display()))?;
            let dir = out_dir(&spec.out_dir);
            let art = execute_run(&spec, &dir)?;
            let last = art.outcome.records.last().expect("at least one record");
            println!(
                "{:?} after {} steps at t = {:e}; sup|G| = {:e}, V = {:e}",
                art.outcome.status, art.outcome.steps, last.t, last.sup_g, last.volume
            );
            println!("wrote {} and {}", art.run_csv.display(), art.snapshot.display());
            Ok(true)
        }
        Command::Preset { name, overrides } => {
            let env = std::env::var_os("MIXEDFLOW_OUT").map(PathBuf::from);
            let report = run_experiment(name, &overrides, env.as_deref())?;
            print!("{}", report.summary_text());
            println!("wrote {}", report.out_dir.display());
            Ok(report.passed())
        }
        Command::Spectrum { config, lmax, eps } => {
            let spec = read_config(&config).with_context(|| format!("reading {}", config.display()))?;
            let jac = numerical_jacobian(&spec.flow, lmax, eps * spec.flow.radius)?;
            let dir = out_dir(&spec.out_dir);
            std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join("spectrum.csv");
            std::fs::write(&path, jac.report.to_csv()).with_context(|| format!("writing {}", path.display()))?;
            print!("{}", jac.report.to_csv());
            let checks = spectrum_checks(&spec.flow, &jac);
            for c in &checks {
                println!("check {c}");
            }
            println!("wrote {}", path.display());
            Ok(checks.iter().all(|c| c.passed))
        }
        Command::FitSphere { snapshot } => {
            let snap = Snapshot::read(&snapshot)?;
            let grid = Grid::new(snap.coeffs.dim(), snap.coeffs.l_max(), 2)?;
            let state = snap.to_state(&grid)?;
            let fit = fit_sphere(&state.rho, &grid)?;
            let z: Vec<String> = fit.coords.to_vec().iter().map(|v| format!("{v:e}")).collect();
            println!("z = {}", z.join(","));
            println!("residual_sup = {:e}", fit.residual_sup());
            println!("residual_l2 = {:e}", fit.residual_l2(&grid, snap.radius));
            println!("iterations = {}", fit.iterations);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
