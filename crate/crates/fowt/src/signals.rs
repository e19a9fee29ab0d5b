//! Input signals that need std: seeded irregular waves and wind files.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use fowt_core::sim::{jonswap_density, Disturbance, Target, TimeSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{num_complex::Complex64, FftPlanner};

use crate::config::{DisturbanceSpec, RunConfig};
use crate::error::{Error, Result};

/// A record shorter than this many peak periods resolves the spectrum poorly.
pub const MIN_PERIODS: f64 = 10.0;

/// Irregular wave elevation `w(t)` on `[0, duration]` from the JONSWAP
/// density, with uniform random phases drawn from `seed`/`stream`.
///
/// Components sit on the harmonics of the record length, so the record's
/// mean square equals `Σ S(ω_k) Δω` whatever the phases.
pub fn jonswap_wave(
    hs: f64,
    tp: f64,
    gamma: f64,
    seed: u64,
    stream: u64,
    dt: f64,
    duration: f64,
) -> Result<(TimeSeries, Option<String>)> {
    if !(hs >= 0.0 && tp > 0.0 && gamma >= 1.0) {
        return Err(Error::config("jonswap: needs hs >= 0, tp > 0, gamma >= 1"));
    }
    if !(dt > 0.0 && duration >= dt) {
        return Err(Error::config("jonswap: needs dt > 0 and duration >= dt"));
    }
    let n = (duration / dt).round() as usize + 1;
    let dw = 2.0 * PI / (n as f64 * dt);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    for (k, bin) in spectrum.iter_mut().enumerate().take(n.div_ceil(2)).skip(1) {
        let amp = (2.0 * jonswap_density(k as f64 * dw, hs, tp, gamma) * dw).sqrt();
        let phase = 2.0 * PI * rng.gen::<f64>();
        *bin = Complex64::from_polar(amp, phase);
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut spectrum);

    let mut ts = TimeSeries::new(0.0, dt)?;
    ts.push_channel("w", "m", spectrum.iter().map(|z| z.re).collect())?;
    let warning = (duration < MIN_PERIODS * tp).then(|| {
        format!(
            "jonswap: duration {duration} s is shorter than {MIN_PERIODS} peak periods ({} s)",
            MIN_PERIODS * tp
        )
    });
    Ok((ts, warning))
}

/// Reads a two-column `t, v` CSV. Lines starting with `#` and a non-numeric
/// first row are skipped; times must increase strictly.
pub fn read_wind_file(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |message: String| Error::Input {
        path: path.to_path_buf(),
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            source: e,
        })?;
        if record.len() < 2 {
            return Err(bad(format!("row {}: expected two columns", i + 1)));
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        let (t, v) = match parsed {
            (Ok(t), Ok(v)) if t.is_finite() && v.is_finite() => (t, v),
            _ if i == 0 => continue,
            _ => return Err(bad(format!("row {}: non-numeric or non-finite value", i + 1))),
        };
        if out.last().is_some_and(|&(prev, _)| t <= prev) {
            return Err(bad(format!("row {}: time {t} does not increase", i + 1)));
        }
        out.push((t, v));
    }
    if out.is_empty() {
        return Err(bad("no samples".into()));
    }
    Ok(out)
}

/// Linear interpolation of `(t, v)` pairs onto `t = k·dt`, `k = 0..n`, held
/// flat outside the span.
pub fn resample(points: &[(f64, f64)], dt: f64, n: usize) -> Vec<f64> {
    let mut j = 0;
    (0..n)
        .map(|k| {
            let t = k as f64 * dt;
            while j + 1 < points.len() && points[j + 1].0 <= t {
                j += 1;
            }
            let (t0, v0) = points[j];
            match points.get(j + 1) {
                Some(&(t1, v1)) if t > t0 => v0 + (t - t0) / (t1 - t0) * (v1 - v0),
                _ => v0,
            }
        })
        .collect()
}

/// Per-run context for turning specs into signals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalContext {
    /// Mean wind speed removed from wind files, if known.
    pub wind_speed: Option<f64>,
    /// Independent random stream group (one per campaign wind speed).
    pub stream_group: u64,
}

impl SignalContext {
    pub fn for_run(cfg: &RunConfig) -> Self {
        SignalContext {
            wind_speed: cfg.operating.wind_speed,
            stream_group: 0,
        }
    }
}

/// Turns every configured disturbance into a core [`Disturbance`], returning
/// warnings alongside.
pub fn realize(cfg: &RunConfig, ctx: SignalContext) -> Result<(Vec<Disturbance>, Vec<String>)> {
    let dt = cfg.simulation.dt;
    let duration = cfg.simulation.duration;
    let n = (duration / dt).round() as usize + 1;
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for (index, (name, spec)) in cfg.disturbances.iter().enumerate() {
        let d = match spec {
            DisturbanceSpec::StepBeta { onset, amplitude } => Disturbance::step_beta(*onset, *amplitude),
            DisturbanceSpec::StepWind { onset, amplitude } => Disturbance::step_wind(*onset, *amplitude),
            DisturbanceSpec::MonoWave { period, height } => Disturbance::MonoWave {
                period: *period,
                height: *height,
            },
            DisturbanceSpec::Jonswap { hs, tp, gamma, seed } => {
                let seed = seed
                    .or(cfg.seed)
                    .ok_or_else(|| Error::config(format!("disturbance.{name}: no seed")))?;
                let stream = (ctx.stream_group << 16) | index as u64;
                let (ts, warning) = jonswap_wave(*hs, *tp, *gamma, seed, stream, dt, duration)?;
                warnings.extend(warning.map(|w| format!("disturbance.{name}: {w}")));
                Disturbance::Samples {
                    target: Target::Wave,
                    t0: 0.0,
                    dt,
                    values: ts.channels()[0].values.clone(),
                }
            }
            DisturbanceSpec::WindFile { file } => {
                let path = wind_path(cfg, file, ctx.wind_speed);
                let points = read_wind_file(&path)?;
                let mean = ctx.wind_speed.unwrap_or(0.0);
                let values = resample(&points, dt, n).into_iter().map(|v| v - mean).collect();
                if points.last().is_some_and(|p| p.0 < duration) {
                    warnings.push(format!(
                        "disturbance.{name}: {} ends before the simulation; last value held",
                        path.display()
                    ));
                }
                Disturbance::Samples {
                    target: Target::Wind,
                    t0: 0.0,
                    dt,
                    values,
                }
            }
        };
        out.push(d);
    }
    Ok((out, warnings))
}

fn wind_path(cfg: &RunConfig, file: &str, wind_speed: Option<f64>) -> PathBuf {
    let file = match wind_speed {
        Some(ws) => file.replace("{ws}", &ws.to_string()),
        None => file.to_string(),
    };
    cfg.base_dir.join(file)
}
