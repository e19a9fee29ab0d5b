//! Subcommands. Each returns an [`Outcome`]; writing files is part of the
//! command, printing is left to the caller.

use std::path::PathBuf;

use fowt_core::fatigue::{self, Cycle};
use fowt_core::model::build_open_loop;
use fowt_core::{gains, AeroSensitivities, ControlGains, StateSpace};

use crate::config::{FatigueConfig, RunConfig, StrategySpec};
use crate::error::{Error, Result};

mod analyze;
mod bode;
mod campaign;
mod fatigue_cmd;
mod simulate;
mod tune;

pub use analyze::analyze;
pub use bode::bode;
pub use campaign::{campaign, CASES_DIR, SUMMARY_FILE};
pub use fatigue_cmd::fatigue;
pub use simulate::simulate;
pub use tune::tune;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    /// Human-readable summary for stdout.
    pub report: String,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Gains for one operating point: fixed `[gains]` when present, otherwise
/// synthesised with `strategy` (falling back to the configured one).
pub fn resolve_gains(
    cfg: &RunConfig,
    sens: &AeroSensitivities,
    strategy: Option<StrategySpec>,
) -> Result<ControlGains> {
    if strategy.is_none() {
        if let Some(g) = cfg.controller.fixed_gains {
            return Ok(g);
        }
    }
    let spec = strategy
        .or(cfg.controller.strategy)
        .ok_or_else(|| Error::config("no strategy and no fixed gains"))?;
    Ok(gains::synthesize(
        &cfg.params,
        sens,
        &cfg.controller.rotor,
        &spec.to_strategy()?,
        cfg.controller.m_taug,
    )?)
}

pub fn closed_loop(cfg: &RunConfig, sens: &AeroSensitivities, g: &ControlGains) -> Result<StateSpace> {
    Ok(build_open_loop(&cfg.params, sens)?.close_loop(g)?)
}

fn strategy_warning(cfg: &RunConfig) -> Option<String> {
    (cfg.controller.fixed_gains.is_some() && cfg.controller.strategy.is_some())
        .then(|| "[gains] present: fixed gains used, [controller] strategy ignored".to_string())
}

/// Population statistics `(min, mean, max, std)`; NaN for an empty slice.
pub fn stats(x: &[f64]) -> (f64, f64, f64, f64) {
    if x.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN, f64::NAN);
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, mean, max, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FatigueSummary {
    pub cycles: Vec<Cycle>,
    pub n_ref: f64,
    pub del: f64,
    /// Only for a moment channel with a section modulus.
    pub damage: Option<f64>,
}

/// Rainflow, DEL and Miner damage of `x` sampled over `window` seconds.
pub fn fatigue_summary(x: &[f64], window: f64, channel: &str, fc: &FatigueConfig) -> Result<FatigueSummary> {
    let cycles = fatigue::rainflow_with(x, fc.hysteresis);
    let n_ref = fc.n_ref.unwrap_or(fc.f_ref * window);
    let del = fatigue::del(&cycles, fc.m, n_ref)?;
    let damage = match (channel, fc.section_modulus) {
        ("tower_moment", Some(z)) => Some(fatigue::miner_damage(&cycles, &fc.curve, z, fc.lifetime_scale)?),
        _ => None,
    };
    Ok(FatigueSummary {
        cycles,
        n_ref,
        del,
        damage,
    })
}
