use std::fmt::Write as _;
use std::path::Path;

use fowt_core::sim::{self, Disturbance, SimConfig, TimeSeries};
use fowt_core::{AeroSensitivities, ControlGains};

use super::{closed_loop, resolve_gains, stats, strategy_warning, Outcome};
use crate::config::RunConfig;
use crate::error::Result;
use crate::output::{num, series_table, Header};
use crate::signals::{realize, SignalContext};

/// Integration settings of `cfg` around the given fine pitch.
pub(crate) fn sim_config(cfg: &RunConfig, fine_pitch: f64) -> SimConfig {
    let s = &cfg.simulation;
    let mut c = SimConfig::new(s.dt, s.duration).with_method(s.method).with_x0(s.x0);
    if let Some(l) = s.limits {
        c = c.with_limits(l.around(fine_pitch));
    }
    c.operating_point = cfg.operating.point;
    c
}

pub(crate) fn run(
    cfg: &RunConfig,
    sens: &AeroSensitivities,
    g: &ControlGains,
    disturbances: &[Disturbance],
    fine_pitch: f64,
) -> Result<TimeSeries> {
    let ss = closed_loop(cfg, sens, g)?;
    Ok(sim::simulate(&ss, disturbances, &sim_config(cfg, fine_pitch))?)
}

/// Time-domain run of the closed loop under the configured disturbances.
pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    outcome.warnings.extend(strategy_warning(cfg));
    let g = resolve_gains(cfg, &cfg.sens, None)?;
    let (disturbances, warnings) = realize(cfg, SignalContext::for_run(cfg))?;
    outcome.warnings.extend(warnings);
    let ts = run(cfg, &cfg.sens, &g, &disturbances, cfg.operating.fine_pitch)?;

    let diverged = ts.diverged_at.map_or_else(|| "none".to_string(), num);
    if let Some(t) = ts.diverged_at {
        outcome
            .warnings
            .push(format!("simulation diverged at t = {t} s; series truncated"));
    }
    let header = Header::new(cfg, "simulate")
        .with("method", format!("{:?}", cfg.simulation.method).to_lowercase())
        .with("diverged_at", diverged);
    let path = out.join("timeseries.csv");
    series_table(&ts).write(&path, &header)?;
    outcome.files.push(path);

    let r = &mut outcome.report;
    writeln!(r, "parameter set: {}", cfg.parameter_set).unwrap();
    writeln!(r, "samples: {} at dt = {} s", ts.len(), ts.dt).unwrap();
    for name in ["phi", "omega", "beta", "tower_moment"] {
        let (min, mean, max, std) = stats(ts.channel(name).unwrap_or_default());
        writeln!(
            r,
            "{name:<13} min {min:+.6e}  mean {mean:+.6e}  max {max:+.6e}  std {std:.6e}"
        )
        .unwrap();
    }
    if let Some(t) = ts.diverged_at {
        writeln!(r, "diverged at t = {t} s").unwrap();
    }
    Ok(outcome)
}
