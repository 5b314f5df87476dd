use mixedflow::flow::{FlowConfig, FlowEngine, Integrator};
use mixedflow::io::InitSpec;
use mixedflow::speeds::SpeedKind;

fn drift(k: i32, integrator: Integrator, l_max: usize, dt: f64, t_end: f64) -> f64 {
    let mut cfg = FlowConfig::new(2, 1.0, k, SpeedKind::Mean).unwrap();
    cfg.integrator = integrator;
    cfg.l_max = l_max;
    cfg.dt = Some(dt);
    cfg.t_end = t_end;
    cfg.cadence = 1_000_000;
    let engine = FlowEngine::new(cfg).unwrap();
    let rho0 = InitSpec::Random {
        amp: 0.05,
        lmax: 6,
        seed: 42,
    }
    .build(engine.grid(), 1.0)
    .unwrap();
    let out = engine.run(rho0, |_| {}).unwrap();
    let v0 = out.records[0].volume;
    let v1 = out.records.last().unwrap().volume;
    ((v1 - v0) / v0).abs()
}

fn slopes(dts: &[f64], drifts: &[f64]) -> Vec<f64> {
    dts.windows(2)
        .zip(drifts.windows(2))
        .map(|(d, v)| (v[0] / v[1]).ln() / (d[0] / d[1]).ln())
        .collect()
}

#[test]
fn imex_drift_is_first_order() {
    let dts = [4e-4, 2e-4, 1e-4];
    for k in [-1, 0] {
        let drifts: Vec<f64> = dts.iter().map(|&dt| drift(k, Integrator::Imex, 16, dt, 0.1)).collect();
        for s in slopes(&dts, &drifts) {
            assert!((s - 1.0).abs() <= 0.25, "k={k}: drifts {drifts:?}");
        }
    }
}

#[test]
fn rk4_drift_is_fourth_order() {
    let dts = [8e-4, 8e-4 / 2f64.sqrt(), 4e-4];
    for k in [-1, 0, 1] {
        let drifts: Vec<f64> = dts.iter().map(|&dt| drift(k, Integrator::Rk4, 24, dt, 0.1)).collect();
        for s in slopes(&dts, &drifts) {
            assert!((s - 4.0).abs() <= 1.0, "k={k}: drifts {drifts:?}");
        }
    }
}
