//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod support;

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mixedflow::analysis::{fit_sphere, numerical_jacobian, sphere_from_coords, SphereCoords};
use mixedflow::flow::{FlowConfig, FlowEngine, Integrator};
use mixedflow::geometry::{curvature_bundle, surface_area};
use mixedflow::harmonics::{Coeffs, Grid, RadialField};
use mixedflow::io::{run_experiment, spectrum_checks, InitSpec, Preset};
use mixedflow::speeds::SpeedKind;
use support::closed_form_harmonic;
use support::log_log_slope;
use support::mesh_oracle::MeshOracle;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn config(n: usize, radius: f64, k: i32, speed: SpeedKind, l_max: usize) -> FlowConfig {
    let mut cfg = FlowConfig::new(n, radius, k, speed).unwrap();
    cfg.l_max = l_max;
    cfg
}

fn sphere_stationarity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in [1usize, 2] {
        let speeds = [
            SpeedKind::Mean,
            SpeedKind::PowerMean { m: 1, beta: 2.0 },
            SpeedKind::Elementary { l: n },
        ];
        for radius in [1.0, 2.0] {
            for speed in &speeds {
                for k in -1..n as i32 {
                    let engine = FlowEngine::new(config(n, radius, k, speed.clone(), 8)).unwrap();
                    let f0 = engine.config().speed.umbilic_value();
                    for c in [-0.3 * radius, 0.0, 0.5 * radius] {
                        let rho = RadialField::constant(engine.grid(), radius, c);
                        let g = engine.evaluate_g(&rho).map_err(|e| e.to_string())?;
                        worst = worst.max(g.sup() / f0);
                        cases += 1;
                    }
                }
            }
        }
    }
    verdict(worst <= 1e-10, format!("{cases} cases, max sup|G|/F0 = {worst:e} (<= 1e-10)"))
}

fn curvature_oracle() -> Outcome {
    let height = |t: f64, p: f64| 0.1 * closed_form_harmonic(2, 1, t, p);
    let grid = Grid::new(2, 16, 2).unwrap();
    let values = (0..grid.node_count())
        .map(|i| {
            let (t, p) = grid.node_angles(i);
            height(t, p)
        })
        .collect();
    let rho = RadialField::from_values(&grid, 1.0, values).unwrap();
    let bundle = curvature_bundle(&rho, &grid).map_err(|e| e.to_string())?;
    let oracle = MeshOracle::new(height, 1.0);
    let mut kappa_err: f64 = 0.0;
    for i in 0..grid.node_count() {
        let (t, p) = grid.node_angles(i);
        let o = oracle.at(t, p);
        kappa_err = kappa_err
            .max((bundle.kappa[0][i] - o.kappa[0]).abs())
            .max((bundle.kappa[1][i] - o.kappa[1]).abs());
    }
    let (area_ref, _) = oracle.area_and_volume(100, 100);
    let area_err = ((surface_area(&bundle, &grid, 1.0) - area_ref) / area_ref).abs();
    verdict(
        kappa_err <= 1e-6 && area_err <= 1e-8,
        format!("kappa sup err {kappa_err:e} (<= 1e-6), area rel err {area_err:e} (<= 1e-8)"),
    )
}

fn linearization() -> Outcome {
    let engine = FlowEngine::new(config(2, 1.0, -1, SpeedKind::Mean, 16)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let eps = [1e-2, 5e-3, 2.5e-3];
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..20 {
        let mut u = Coeffs::zeros(2, 16);
        for (idx, (l, _)) in u.clone().labels().enumerate() {
            if l <= 8 {
                u.as_mut_slice()[idx] = rng.gen_range(-1.0..1.0);
            }
        }
        let scale = 1.0 / engine.field(u.clone()).unwrap().sup_norm();
        let u = u.scale_by_degree(|_| scale);
        let lin = engine.linearized_at_zero(&u);
        let mut errs = Vec::new();
        for &e in &eps {
            let plus = engine.evaluate_g(&engine.field(u.scale_by_degree(|_| e)).unwrap());
            let minus = engine.evaluate_g(&engine.field(u.scale_by_degree(|_| -e)).unwrap());
            let (plus, minus) = (plus.map_err(|x| x.to_string())?, minus.map_err(|x| x.to_string())?);
            let d = plus.coeffs.axpy(-1.0, &minus.coeffs).scale_by_degree(|_| 0.5 / e);
            errs.push(d.axpy(-1.0, &lin).norm());
        }
        let s = log_log_slope(&eps, &errs);
        lo = lo.min(s);
        hi = hi.max(s);
    }
    verdict(
        lo >= 1.8 && hi <= 2.2,
        format!("20 directions, observed orders in [{lo:.3}, {hi:.3}] (2 +- 0.2)"),
    )
}

fn spectrum() -> Outcome {
    let cfg = config(2, 1.0, -1, SpeedKind::Mean, 8);
    let jac = numerical_jacobian(&cfg, 8, 1e-5).map_err(|e| e.to_string())?;
    let mut diag_err: f64 = 0.0;
    for (j, &m) in jac.degrees.iter().enumerate() {
        let xi = -((m as f64) - 1.0) * (m as f64 + 2.0);
        let got = jac.matrix[(j, j)];
        let err = if m <= 1 { got.abs() } else { ((got - xi) / xi).abs() };
        diag_err = diag_err.max(err);
    }
    let checks = spectrum_checks(&cfg, &jac);
    let ok = jac.degrees.len() == 81 && diag_err <= 1e-6 && checks.iter().all(|c| c.passed);
    let mut detail = format!("D = {}, diagonal vs -(m-1)(m+2) err {diag_err:e}", jac.degrees.len());
    for c in &checks {
        detail.push_str(&format!("; {c}"));
    }
    verdict(ok, detail)
}

fn decay_rate(n: usize, k: i32, speed: SpeedKind, m: usize) -> Result<f64, String> {
    let mut cfg = config(n, 1.0, k, speed, 12);
    cfg.integrator = Integrator::Imex;
    cfg.dt = Some(1e-4);
    cfg.t_end = 1.0;
    cfg.cadence = 100;
    let engine = FlowEngine::new(cfg).map_err(|e| e.to_string())?;
    let rho0 = InitSpec::Harmonic(vec![(m, 1, 1e-4)])
        .build(engine.grid(), 1.0)
        .map_err(|e| e.to_string())?;
    let out = engine.run(rho0, |_| {}).map_err(|e| e.to_string())?;
    let series: Vec<(f64, f64)> = out.records.iter().map(|d| (d.t, d.mode_energy[m].sqrt())).collect();
    mixedflow::analysis::fit_decay_rate(&series, 0.5).map_err(|e| e.to_string())
}

fn linear_decay() -> Outcome {
    let mut cases: Vec<(String, usize, i32, SpeedKind, usize, f64)> = Vec::new();
    for (m, rate) in [(2, 4.0), (3, 10.0), (4, 18.0)] {
        cases.push(("mean k=-1".into(), 2, -1, SpeedKind::Mean, m, rate));
        cases.push(("mean k=0".into(), 2, 0, SpeedKind::Mean, m, rate));
        cases.push(("power_mean(1,2)".into(), 2, -1, SpeedKind::PowerMean { m: 1, beta: 2.0 }, m, rate));
    }
    for (m, rate) in [(2, 3.0), (3, 8.0), (4, 15.0)] {
        cases.push(("n=1 mean".into(), 1, -1, SpeedKind::Mean, m, rate));
    }
    let results: Vec<Result<f64, String>> = std::thread::scope(|s| {
        let handles: Vec<_> = cases
            .iter()
            .map(|(_, n, k, speed, m, _)| s.spawn(move || decay_rate(*n, *k, speed.clone(), *m)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for ((name, _, _, _, m, want), got) in cases.iter().zip(results) {
        let got = got?;
        let err = ((-got - want) / want).abs();
        worst = worst.max(err);
        parts.push(format!("{name} m={m}: {:.4}", -got));
    }
    verdict(
        worst <= 1e-2,
        format!("max rel err {worst:e} (<= 1e-2); {}", parts.join(", ")),
    )
}

fn preset_checks(preset: Preset, overrides: &[String]) -> Result<(bool, String), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let report = run_experiment(preset, overrides, Some(dir.path())).map_err(|e| e.to_string())?;
    let detail = report.checks.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; ");
    Ok((report.passed(), detail))
}

fn zero_modes() -> Outcome {
    let (ok, detail) = preset_checks(Preset::ZeroModes, &[])?;
    verdict(ok, detail)
}

fn rk4_drift(k: i32, dt: f64) -> Result<f64, String> {
    let mut cfg = config(2, 1.0, k, SpeedKind::Mean, 24);
    cfg.integrator = Integrator::Rk4;
    cfg.dt = Some(dt);
    cfg.t_end = 0.1;
    cfg.cadence = 1_000_000;
    let engine = FlowEngine::new(cfg).map_err(|e| e.to_string())?;
    let rho0 = InitSpec::Random {
        amp: 0.05,
        lmax: 6,
        seed: 42,
    }
    .build(engine.grid(), 1.0)
    .map_err(|e| e.to_string())?;
    let out = engine.run(rho0, |_| {}).map_err(|e| e.to_string())?;
    let v0 = out.records[0].volume;
    let v1 = out.records.last().unwrap().volume;
    Ok(((v1 - v0) / v0).abs())
}

fn conservation() -> Outcome {
    let ks = [-1, 0, 1];
    let (drifts, orders) = std::thread::scope(|s| {
        let d: Vec<_> = ks
            .iter()
            .map(|&k| s.spawn(move || preset_checks(Preset::Conservation, &[format!("k={k}")])))
            .collect();
        let o: Vec<_> = ks
            .iter()
            .map(|&k| {
                s.spawn(move || -> Result<f64, String> {
                    let coarse = rk4_drift(k, 8e-4)?;
                    let fine = rk4_drift(k, 4e-4)?;
                    Ok((coarse / fine).log2())
                })
            })
            .collect();
        (
            d.into_iter().map(|h| h.join().unwrap()).collect::<Vec<_>>(),
            o.into_iter().map(|h| h.join().unwrap()).collect::<Vec<_>>(),
        )
    });
    let mut ok = true;
    let mut parts = Vec::new();
    for ((k, d), o) in ks.iter().zip(drifts).zip(orders) {
        let (passed, detail) = d?;
        let order = o?;
        ok &= passed && order >= 3.5;
        parts.push(format!("k={k}: {detail}, order {order:.3} (>= 3.5)"));
    }
    verdict(ok, parts.join("; "))
}

fn nonlinear_convergence() -> Outcome {
    let (ok, detail) = preset_checks(Preset::NonlinearConvergence, &[])?;
    verdict(ok, detail)
}

fn sphere_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut coord_err: f64 = 0.0;
    let mut geo_err: f64 = 0.0;
    let mut count = 0;
    for n in [1usize, 2] {
        for radius in [1.0, 2.5] {
            let grid = Grid::new(n, 16, 2).unwrap();
            for _ in 0..50 {
                let mut z: Vec<f64> = (0..n + 2).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
                let target = rng.gen_range(0.0..0.2) * radius;
                z.iter_mut().for_each(|v| *v *= target / norm);
                let coords = SphereCoords::from_slice(&z);
                let rho = sphere_from_coords(&coords, &grid, radius).map_err(|e| e.to_string())?;
                let fit = fit_sphere(&rho, &grid).map_err(|e| e.to_string())?;
                coord_err = coord_err.max(fit.coords.max_abs_diff(&coords));
                for (i, r) in rho.values().iter().enumerate() {
                    let omega = grid.node_direction(i);
                    let dist = omega
                        .iter()
                        .zip(&z[1..])
                        .map(|(w, c)| ((radius + r) * w - c).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    geo_err = geo_err.max((dist - (radius + z[0])).abs());
                }
                count += 1;
            }
        }
    }
    verdict(
        coord_err <= 1e-9 && geo_err <= 1e-12,
        format!("{count} spheres, coordinate err {coord_err:e} (<= 1e-9), |X-c| err {geo_err:e} (<= 1e-12)"),
    )
}

fn determinism() -> Outcome {
    let mut files = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        run_experiment(Preset::NonlinearConvergence, &[], Some(dir.path())).map_err(|e| e.to_string())?;
        files.push(std::fs::read(dir.path().join("run.csv")).map_err(|e| e.to_string())?);
    }
    verdict(
        files[0] == files[1],
        format!("run.csv sizes {} and {} bytes, identical: {}", files[0].len(), files[1].len(), files[0] == files[1]),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("sphere stationarity", sphere_stationarity),
        ("curvature oracle", curvature_oracle),
        ("linearization", linearization),
        ("spectrum", spectrum),
        ("linear decay rates", linear_decay),
        ("zero modes", zero_modes),
        ("conservation", conservation),
        ("nonlinear convergence", nonlinear_convergence),
        ("sphere parametrization round trip", sphere_round_trip),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|s| name.contains(s.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {:2} {name}: PASS ({d}) [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:2} {name}: FAIL ({d}) [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
