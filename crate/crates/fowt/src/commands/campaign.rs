use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fowt_core::sim::TimeSeries;
use fowt_core::stability::modal_report;
use fowt_core::AeroSensitivities;
use rayon::prelude::*;

use super::simulate::run;
use super::{closed_loop, fatigue_summary, resolve_gains, stats, Outcome};
use crate::config::{RunConfig, StrategySpec};
use crate::error::{Error, Result};
use crate::output::{num, series_table, Header, Table};
use crate::signals::{realize, SignalContext};

pub const SUMMARY_FILE: &str = "campaign.csv";
pub const CASES_DIR: &str = "cases";

const STAT_CHANNELS: [(&str, &str); 5] = [
    ("phi", "rad"),
    ("omega", "rad/s"),
    ("beta", "rad"),
    ("tower_moment", "N*m"),
    ("power", "W"),
];

fn columns() -> Vec<(String, String)> {
    let mut cols: Vec<(String, String)> = [
        ("case_id", "-"),
        ("wind_speed", "m/s"),
        ("strategy", "-"),
        ("status", "-"),
        ("diverged_at", "s"),
        ("kP", "s"),
        ("kI", "-"),
        ("kBeta", "s"),
        ("kTauG", "N*m*s/rad"),
        ("stable", "-"),
        ("max_re", "1/s"),
    ]
    .iter()
    .map(|(n, u)| (n.to_string(), u.to_string()))
    .collect();
    for (ch, unit) in STAT_CHANNELS {
        for stat in ["min", "mean", "max", "std"] {
            cols.push((format!("{ch}_{stat}"), unit.to_string()));
        }
    }
    cols.push(("del".into(), "N*m".into()));
    cols.push(("damage".into(), "-".into()));
    cols.push(("message".into(), "-".into()));
    cols
}

#[derive(Debug, Clone, Copy)]
struct Case {
    id: usize,
    wind_index: usize,
    wind_speed: f64,
    strategy: StrategySpec,
}

struct CaseRun {
    row: Vec<String>,
    series: Option<TimeSeries>,
    warnings: Vec<String>,
}

fn case_sensitivities(cfg: &RunConfig, ws: f64) -> Result<(AeroSensitivities, f64)> {
    match &cfg.schedule {
        Some(s) => s.at(ws, &cfg.sens),
        None => Ok((cfg.sens, cfg.operating.fine_pitch)),
    }
}

fn run_case(cfg: &RunConfig, case: Case) -> CaseRun {
    let n_cols = columns().len();
    let mut row = vec![case.id.to_string(), num(case.wind_speed), case.strategy.to_string()];
    match simulate_case(cfg, case) {
        Ok((fields, series, warnings)) => {
            row.extend(fields);
            CaseRun { row, series, warnings }
        }
        Err(e) => {
            row.push("error".into());
            row.resize(n_cols - 1, String::new());
            row.push(e.to_string());
            CaseRun {
                row,
                series: None,
                warnings: vec![format!("case {}: {e}", case.id)],
            }
        }
    }
}

type CaseFields = (Vec<String>, Option<TimeSeries>, Vec<String>);

fn simulate_case(cfg: &RunConfig, case: Case) -> Result<CaseFields> {
    let (sens, fine_pitch) = case_sensitivities(cfg, case.wind_speed)?;
    let g = resolve_gains(cfg, &sens, Some(case.strategy))?;
    let modes = modal_report(&closed_loop(cfg, &sens, &g)?.a)?;
    let ctx = SignalContext {
        wind_speed: Some(case.wind_speed),
        stream_group: case.wind_index as u64,
    };
    let (disturbances, mut warnings) = realize(cfg, ctx)?;
    warnings.iter_mut().for_each(|w| *w = format!("case {}: {w}", case.id));
    let ts = run(cfg, &sens, &g, &disturbances, fine_pitch)?;

    let start = ts.index_at(cfg.fatigue.stats_start).min(ts.len());
    let window = |name: &str| &ts.channel(name).unwrap_or_default()[start..];
    let mut fields = vec![
        if ts.diverged_at.is_some() { "diverged" } else { "ok" }.to_string(),
        ts.diverged_at.map_or_else(String::new, num),
        num(g.kp),
        num(g.ki),
        num(g.kbeta),
        num(g.ktaug),
        modes.stable.to_string(),
        num(modes.max_real_part()),
    ];
    for (ch, _) in STAT_CHANNELS {
        let (min, mean, max, std) = stats(window(ch));
        fields.extend([num(min), num(mean), num(max), num(std)]);
    }
    let moment = window("tower_moment");
    let span = moment.len().saturating_sub(1) as f64 * ts.dt;
    if span > 0.0 {
        let f = fatigue_summary(moment, span, "tower_moment", &cfg.fatigue)?;
        fields.push(num(f.del));
        fields.push(f.damage.map_or_else(String::new, num));
    } else {
        fields.extend([String::new(), String::new()]);
        warnings.push(format!("case {}: empty statistics window", case.id));
    }
    fields.push(String::new());
    let series = cfg.campaign.as_ref().is_some_and(|c| c.write_series).then_some(ts);
    Ok((fields, series, warnings))
}

/// Runs every (wind speed, strategy) case on `jobs` worker threads, writes
/// one file per case under `cases/` and merges them, in case order, into
/// `campaign.csv`. Failed or diverged cases keep their row and are flagged.
pub fn campaign(cfg: &RunConfig, out: &Path, jobs: Option<usize>) -> Result<Outcome> {
    let cc = cfg
        .campaign
        .as_ref()
        .ok_or_else(|| Error::config("missing [campaign] section"))?;
    if cfg.fatigue.stats_start >= cfg.simulation.duration {
        return Err(Error::config(format!(
            "[fatigue] stats_start = {} s leaves no window in a {} s run",
            cfg.fatigue.stats_start, cfg.simulation.duration
        )));
    }
    let mut outcome = Outcome::default();
    if cfg.schedule.is_none() {
        outcome
            .warnings
            .push("no [schedule]: every wind speed uses the base sensitivities".into());
    }
    if cfg.controller.fixed_gains.is_some() {
        outcome
            .warnings
            .push("[gains] ignored: campaign cases synthesise their own gains".into());
    }

    let cases: Vec<Case> = cc
        .wind_speeds
        .iter()
        .enumerate()
        .flat_map(|(wi, &ws)| cc.strategies.iter().map(move |&s| (wi, ws, s)))
        .enumerate()
        .map(|(id, (wind_index, wind_speed, strategy))| Case {
            id,
            wind_index,
            wind_speed,
            strategy,
        })
        .collect();

    let cases_dir = out.join(CASES_DIR);
    std::fs::create_dir_all(&cases_dir).map_err(|e| Error::io(&cases_dir, e))?;
    let cols = columns();
    let width = cases.len().saturating_sub(1).to_string().len();
    let case_path = |id: usize| cases_dir.join(format!("case_{id:0width$}.csv"));

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| Error::config(format!("worker pool: {e}")))?;
    let written: Vec<Result<Vec<String>>> = pool.install(|| {
        cases
            .par_iter()
            .map(|&case| {
                let run = run_case(cfg, case);
                let header = Header::new(cfg, "campaign")
                    .with("case_id", case.id.to_string())
                    .with("wind_speed", num(case.wind_speed))
                    .with("strategy", case.strategy.to_string());
                let mut table = Table::new(&cols);
                table.push(run.row);
                table.write(&case_path(case.id), &header)?;
                if let Some(ts) = &run.series {
                    let path = cases_dir.join(format!("case_{:0width$}_series.csv", case.id));
                    series_table(ts).write(&path, &header)?;
                }
                Ok(run.warnings)
            })
            .collect()
    });

    let mut merged = Table::new(&cols);
    let mut diverged = 0;
    let mut failed = 0;
    for (case, result) in cases.iter().zip(written) {
        outcome.warnings.extend(result?);
        let path = case_path(case.id);
        let row = read_case_row(&path)?;
        match row.get(3).map(String::as_str) {
            Some("diverged") => diverged += 1,
            Some("error") => failed += 1,
            _ => {}
        }
        merged.push(row);
        outcome.files.push(path);
    }
    let summary = out.join(SUMMARY_FILE);
    merged.write(
        &summary,
        &Header::new(cfg, "campaign").with("cases", cases.len().to_string()),
    )?;
    outcome.files.insert(0, summary);

    writeln!(
        outcome.report,
        "{} cases ({} wind speeds x {} strategies): {} ok, {diverged} diverged, {failed} failed",
        cases.len(),
        cc.wind_speeds.len(),
        cc.strategies.len(),
        cases.len() - diverged - failed
    )
    .unwrap();
    Ok(outcome)
}

fn read_case_row(path: &PathBuf) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let record = rdr
        .records()
        .next()
        .ok_or_else(|| Error::Input {
            path: path.clone(),
            message: "case file has no data row".into(),
        })?
        .map_err(|e| Error::Csv {
            path: path.clone(),
            source: e,
        })?;
    Ok(record.iter().map(String::from).collect())
}
