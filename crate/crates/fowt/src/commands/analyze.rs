use std::fmt::Write as _;
use std::path::Path;

use fowt_core::stability::{
    coupled_char_poly, modal_report, nmpz_omega_condition, nmpz_omega_condition_printed, nmpz_phi_condition,
    numerator_omega, numerator_phi, Condition,
};
use fowt_core::Complex;

use super::{closed_loop, resolve_gains, strategy_warning, Outcome};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::output::{num, Header, Table};

/// NMPZ conditions, numerator and characteristic roots, closed-loop modes and
/// the stability verdict.
pub fn analyze(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    outcome.warnings.extend(strategy_warning(cfg));
    let (p, s) = (&cfg.params, &cfg.sens);
    let g = resolve_gains(cfg, s, None)?;
    let ss = closed_loop(cfg, s, &g)?;
    let report = modal_report(&ss.a)?;
    let verdict = if report.stable { "stable" } else { "unstable" };

    let mut conditions: Vec<(&str, Condition)> = vec![
        ("phi_nmpz", nmpz_phi_condition(s)?),
        ("omega_nmpz", nmpz_omega_condition(p, s, g.ktaug)?),
    ];
    // The rearranged form divides by h_t; it is a cross-check only.
    if let Ok(c) = nmpz_omega_condition_printed(p, s, g.ktaug) {
        conditions.push(("omega_nmpz_rearranged", c));
    }
    let polys = [
        ("N_phi_beta", numerator_phi(p, s)),
        ("N_omega_beta", numerator_omega(p, s, g.ktaug)),
        ("chi_A", coupled_char_poly(p, s, &g)),
    ];
    let roots: Vec<(&str, Vec<Complex>)> = polys
        .iter()
        .map(|(name, poly)| {
            Ok((
                *name,
                if poly.degree().unwrap_or(0) == 0 {
                    Vec::new()
                } else {
                    poly.roots()?
                },
            ))
        })
        .collect::<Result<_>>()?;

    let header = Header::new(cfg, "analyze").with("verdict", verdict);
    let mut table = Table::new(&[
        ("condition", "-"),
        ("holds", "-"),
        ("margin", "-"),
        ("near_boundary", "-"),
    ]);
    for (name, c) in &conditions {
        table.push(vec![
            name.to_string(),
            c.holds.to_string(),
            num(c.margin),
            c.near_boundary.to_string(),
        ]);
    }
    let path = out.join("conditions.csv");
    table.write(&path, &header)?;
    outcome.files.push(path);

    let mut table = Table::new(&[("polynomial", "-"), ("re", "1/s"), ("im", "1/s")]);
    for (name, rs) in &roots {
        for z in rs {
            table.push(vec![name.to_string(), num(z.re), num(z.im)]);
        }
    }
    let path = out.join("roots.csv");
    table.write(&path, &header)?;
    outcome.files.push(path);

    let mut table = Table::new(&[("re", "1/s"), ("im", "1/s"), ("nu", "rad/s"), ("zeta", "-")]);
    for m in &report.modes {
        table.push(vec![
            num(m.eigenvalue.re),
            num(m.eigenvalue.im),
            num(m.nu),
            num(m.zeta.unwrap_or(f64::NAN)),
        ]);
    }
    let path = out.join("modes.csv");
    table.write(&path, &header)?;
    outcome.files.push(path);

    let r = &mut outcome.report;
    writeln!(r, "parameter set: {}", cfg.parameter_set).unwrap();
    writeln!(
        r,
        "gains: kP = {:.6e}, kI = {:.6e}, kBeta = {:.6e}, kTauG = {:.6e}",
        g.kp, g.ki, g.kbeta, g.ktaug
    )
    .unwrap();
    for (name, c) in &conditions {
        let flag = if c.near_boundary { " (near boundary)" } else { "" };
        writeln!(r, "{name:<24} {:<5} margin {:+.6e}{flag}", c.holds, c.margin).unwrap();
    }
    for (name, rs) in &roots {
        let list: Vec<String> = rs.iter().map(|z| format!("{:.6e}{:+.6e}i", z.re, z.im)).collect();
        writeln!(r, "roots {name:<13} [{}]", list.join(", ")).unwrap();
    }
    for m in &report.modes {
        let zeta = m.zeta.map_or("-".to_string(), |z| format!("{z:.6}"));
        writeln!(r, "mode  nu = {:.6} rad/s  zeta = {zeta}", m.nu).unwrap();
    }
    writeln!(r, "verdict: {verdict} (max Re = {:.6e} 1/s)", report.max_real_part()).unwrap();
    if let Some(c) = conditions.iter().find(|(_, c)| c.near_boundary) {
        outcome
            .warnings
            .push(format!("{} is within tolerance of its boundary", c.0));
    }

    let path = out.join("report.txt");
    let mut text = String::new();
    for key in ["tool", "config_hash", "parameter_set", "seed"] {
        writeln!(text, "# {key}={}", header.get(key).unwrap_or_default()).unwrap();
    }
    text.push_str(&outcome.report);
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    outcome.files.push(path);
    Ok(outcome)
}
