use std::fmt::Write as _;
use std::path::Path;

use fowt_core::stability::{natural_platform_damping, platform_summary, rotor_summary, ModeSummary};
use fowt_core::{AeroSensitivities, ControlGains};

use super::{resolve_gains, strategy_warning, Outcome};
use crate::config::{DisturbanceSpec, RunConfig};
use crate::error::{Error, Result};
use crate::output::{num, Header, Table};
use crate::signals::{read_wind_file, resample};

pub const GAIN_COLUMNS: [(&str, &str); 4] = [("kP", "s"), ("kI", "-"), ("kBeta", "s"), ("kTauG", "N*m*s/rad")];

fn gain_fields(g: &ControlGains) -> Vec<String> {
    vec![num(g.kp), num(g.ki), num(g.kbeta), num(g.ktaug)]
}

fn describe(mode: &ModeSummary) -> String {
    match mode {
        ModeSummary::Oscillator { nu, zeta } => format!("nu = {nu:.6} rad/s, zeta = {zeta:.6}"),
        ModeSummary::Degenerate { radicand } => format!("no real natural frequency (nu^2 = {radicand:.6e})"),
    }
}

/// Gains for the configured operating point, exported as a loadable
/// `[gains]` section and as CSV. With a `[schedule]` the gains are also
/// tabulated per wind speed, and a wind-file disturbance yields a low-pass
/// filtered gain trajectory.
pub fn tune(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    outcome.warnings.extend(strategy_warning(cfg));
    let g = resolve_gains(cfg, &cfg.sens, None)?;
    let rotor = rotor_summary(&cfg.params, &cfg.sens, g.kp, g.ki);
    let platform = platform_summary(&cfg.params, &cfg.sens, g.kbeta);
    let natural = natural_platform_damping(&cfg.params, &cfg.sens);
    let strategy = match (cfg.controller.fixed_gains, cfg.controller.strategy) {
        (Some(_), _) => "fixed".to_string(),
        (None, Some(s)) => s.to_string(),
        (None, None) => unreachable!("validated in RunConfig"),
    };

    let r = &mut outcome.report;
    writeln!(r, "parameter set: {}", cfg.parameter_set).unwrap();
    writeln!(r, "strategy:      {strategy}").unwrap();
    writeln!(r, "kP    = {:.6e} s", g.kp).unwrap();
    writeln!(r, "kI    = {:.6e}", g.ki).unwrap();
    writeln!(r, "kBeta = {:.6e} s", g.kbeta).unwrap();
    writeln!(r, "kTauG = {:.6e} N*m*s/rad", g.ktaug).unwrap();
    writeln!(r, "rotor:    {}", describe(&rotor)).unwrap();
    writeln!(r, "platform: {} (open loop zeta = {natural:.6})", describe(&platform)).unwrap();

    let header = Header::new(cfg, "tune").with("strategy", strategy.clone());
    let ini = out.join("gains.ini");
    let mut text = String::new();
    for line in ["tool", "config_hash", "parameter_set", "seed", "strategy"] {
        writeln!(text, "; {line}={}", header.get(line).unwrap_or_default()).unwrap();
    }
    text.push_str("[gains]\n");
    for ((name, _), value) in GAIN_COLUMNS.iter().zip(gain_fields(&g)) {
        writeln!(text, "{name} = {value}").unwrap();
    }
    std::fs::write(&ini, text).map_err(|e| Error::io(&ini, e))?;
    outcome.files.push(ini);

    let mut cols = GAIN_COLUMNS.to_vec();
    cols.extend([
        ("nu_rot", "rad/s"),
        ("zeta_rot", "-"),
        ("nu_plt", "rad/s"),
        ("zeta_plt", "-"),
    ]);
    let mut table = Table::new(&cols);
    let mode_fields = |m: &ModeSummary| [num(m.nu().unwrap_or(f64::NAN)), num(m.zeta().unwrap_or(f64::NAN))];
    let mut row = gain_fields(&g);
    row.extend(mode_fields(&rotor));
    row.extend(mode_fields(&platform));
    table.push(row);
    let path = out.join("tune.csv");
    table.write(&path, &header)?;
    outcome.files.push(path);

    if let (Some(schedule), None) = (&cfg.schedule, cfg.controller.fixed_gains) {
        let mut cols = vec![("wind_speed", "m/s")];
        cols.extend(GAIN_COLUMNS);
        let mut table = Table::new(&cols);
        for (ws, sens, _) in &schedule.rows {
            let sens = AeroSensitivities {
                dtw_dw: cfg.sens.dtw_dw,
                ..*sens
            };
            let mut row = vec![num(*ws)];
            row.extend(gain_fields(&resolve_gains(cfg, &sens, cfg.controller.strategy)?));
            table.push(row);
        }
        let path = out.join("tune_schedule.csv");
        table.write(&path, &header)?;
        outcome.files.push(path);

        let wind = cfg.disturbances.iter().find_map(|(_, d)| match d {
            DisturbanceSpec::WindFile { file } => Some(file.clone()),
            _ => None,
        });
        if let Some(file) = wind {
            let path = gain_trajectory(cfg, &file, out, &header, &mut outcome.warnings)?;
            outcome.files.push(path);
        }
    }
    Ok(outcome)
}

/// Gains recomputed at every sample of an absolute wind record (clamped to
/// the schedule span) and passed through the configured low-pass filter.
fn gain_trajectory(
    cfg: &RunConfig,
    file: &str,
    out: &Path,
    header: &Header,
    warnings: &mut Vec<String>,
) -> Result<std::path::PathBuf> {
    let schedule = cfg.schedule.as_ref().expect("caller checked");
    let path = cfg
        .base_dir
        .join(file.replace("{ws}", &cfg.operating.wind_speed.unwrap_or(0.0).to_string()));
    let points = read_wind_file(&path)?;
    let dt = cfg.simulation.dt;
    let n = (cfg.simulation.duration / dt).round() as usize + 1;
    let (lo, hi) = (schedule.rows[0].0, schedule.rows[schedule.rows.len() - 1].0);
    let wind = resample(&points, dt, n);
    if wind.iter().any(|v| !(lo..=hi).contains(v)) {
        warnings.push(format!(
            "gain trajectory: wind outside the schedule span [{lo}, {hi}] m/s is clamped"
        ));
    }

    let mut filter = cfg.controller.gain_filter;
    let mut cols = vec![("t", "s"), ("v", "m/s")];
    cols.extend(GAIN_COLUMNS);
    let mut table = Table::new(&cols);
    for (k, v) in wind.into_iter().enumerate() {
        let (sens, _) = schedule.at(v.clamp(lo, hi), &cfg.sens)?;
        let g = filter.update(dt, resolve_gains(cfg, &sens, cfg.controller.strategy)?);
        let mut row = vec![num(k as f64 * dt), num(v)];
        row.extend(gain_fields(&g));
        table.push(row);
    }
    let target = out.join("gain_trajectory.csv");
    table.write(
        &target,
        &header
            .clone()
            .with("gain_filter_tau", num(cfg.controller.gain_filter_tau)),
    )?;
    Ok(target)
}
