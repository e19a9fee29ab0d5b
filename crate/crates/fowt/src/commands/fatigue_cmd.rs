use std::fmt::Write as _;
use std::path::Path;

use fowt_core::fatigue::total_count;

use super::{fatigue_summary, stats, Outcome};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::output::{num, read_table, Header, Table};

/// Rainflow cycles, DEL and Miner damage of one channel of a series CSV,
/// over the statistics window `t ≥ stats_start`.
pub fn fatigue(cfg: &RunConfig, series: &Path, out: &Path) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    let fc = &cfg.fatigue;
    let table = read_table(series)?;
    let input_err = |message: String| Error::Input {
        path: series.to_path_buf(),
        message,
    };
    let t = table.column("t").ok_or_else(|| input_err("no `t` column".into()))?;
    let x = table
        .column(&fc.channel)
        .ok_or_else(|| input_err(format!("no `{}` column", fc.channel)))?;
    let unit = table.unit(&fc.channel).unwrap_or_default().to_string();
    let start = t.partition_point(|&ti| ti < fc.stats_start);
    if t.len() < start + 2 {
        return Err(input_err(format!(
            "fewer than two samples after stats_start = {} s",
            fc.stats_start
        )));
    }
    let (t, x) = (&t[start..], &x[start..]);
    let window = t[t.len() - 1] - t[0];
    let summary = fatigue_summary(x, window, &fc.channel, fc)?;
    if summary.damage.is_none() {
        outcome.warnings.push(format!(
            "no damage for channel `{}` (needs tower_moment and a section modulus)",
            fc.channel
        ));
    }

    let source_hash = table
        .header
        .iter()
        .find(|(k, _)| k == "config_hash")
        .map_or("unknown", |(_, v)| v.as_str());
    let header = Header::new(cfg, "fatigue")
        .with("series", series.display().to_string())
        .with("series_config_hash", source_hash)
        .with("channel", fc.channel.clone());

    let mut cycles = Table::new(&[("range", unit.as_str()), ("mean", unit.as_str()), ("count", "-")]);
    for c in &summary.cycles {
        cycles.push(vec![num(c.range), num(c.mean), num(c.count)]);
    }
    let path = out.join("cycles.csv");
    cycles.write(&path, &header)?;
    outcome.files.push(path);

    let (min, mean, max, std) = stats(x);
    let mut table = Table::new(&[
        ("window", "s"),
        ("cycles", "-"),
        ("n_ref", "-"),
        ("m", "-"),
        ("del", unit.as_str()),
        ("damage", "-"),
        ("min", unit.as_str()),
        ("mean", unit.as_str()),
        ("max", unit.as_str()),
        ("std", unit.as_str()),
    ]);
    table.push(vec![
        num(window),
        num(total_count(&summary.cycles)),
        num(summary.n_ref),
        num(fc.m),
        num(summary.del),
        summary.damage.map_or_else(String::new, num),
        num(min),
        num(mean),
        num(max),
        num(std),
    ]);
    let path = out.join("fatigue.csv");
    table.write(&path, &header)?;
    outcome.files.push(path);

    let r = &mut outcome.report;
    writeln!(
        r,
        "channel {} over {window} s: {} cycles",
        fc.channel,
        total_count(&summary.cycles)
    )
    .unwrap();
    writeln!(
        r,
        "DEL (m = {}, n_ref = {}) = {:.6e} {unit}",
        fc.m, summary.n_ref, summary.del
    )
    .unwrap();
    if let Some(d) = summary.damage {
        writeln!(r, "Miner damage = {d:.6e}").unwrap();
    }
    Ok(outcome)
}
