use std::fmt::Write as _;
use std::path::Path;

use fowt_core::freq::{
    bode_gplt, bode_grot, log_grid, FrequencyResponse, Input, Output, PlatformInput, TransferMatrix,
};

use super::{closed_loop, resolve_gains, strategy_warning, Outcome};
use crate::config::RunConfig;
use crate::error::Result;
use crate::output::{num, Header, Table};

const OUTPUTS: [Output; 2] = [Output::Omega, Output::Phi];
const INPUTS: [Input; 4] = [Input::Beta, Input::TauG, Input::Wind, Input::Wave];

/// Closed-loop Bode data for every (ω, φ) × input pair plus the reduced
/// rotor and platform filters, one CSV per pair in dB and degrees.
pub fn bode(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    outcome.warnings.extend(strategy_warning(cfg));
    let (p, s) = (&cfg.params, &cfg.sens);
    let g = resolve_gains(cfg, s, None)?;
    let nu_plt = (p.pitch_stiffness / p.pitch_inertia).sqrt();
    let (lo, hi) = cfg.bode.range.unwrap_or((nu_plt / 100.0, nu_plt * 100.0));
    let grid = log_grid(lo, hi, cfg.bode.points)?;

    let tm = TransferMatrix::new(&closed_loop(cfg, s, &g)?)?;
    let mut responses: Vec<(String, fowt_core::Result<FrequencyResponse>)> = Vec::new();
    for o in OUTPUTS {
        for i in INPUTS {
            responses.push((format!("bode_{}_{}", o.name(), i.name()), tm.bode(o, i, &grid)));
        }
    }
    let rotor = bode_grot(p, s, g.kp, g.ki, &grid);
    if let Ok(r) = &rotor {
        if !r.band_pass {
            outcome
                .warnings
                .push("reduced rotor filter is not band-pass for these PI gains".into());
        }
    }
    responses.push(("bode_omega_v_reduced".into(), rotor.map(|r| r.response)));
    responses.push((
        "bode_phi_v_reduced".into(),
        bode_gplt(p, s, g.kbeta, PlatformInput::Wind, &grid),
    ));
    responses.push((
        "bode_phi_w_reduced".into(),
        bode_gplt(p, s, g.kbeta, PlatformInput::Wave, &grid),
    ));

    let base = Header::new(cfg, "bode");
    for (stem, response) in responses {
        let fr = match response {
            Ok(fr) => fr,
            Err(e) => {
                outcome.warnings.push(format!("{stem}: skipped ({e})"));
                continue;
            }
        };
        let mut table = Table::new(&[("nu", "rad/s"), ("magnitude", "dB"), ("phase", "deg")]);
        for ((nu, db), ph) in fr.nu.iter().zip(fr.magnitude_db()).zip(fr.phase()) {
            table.push(vec![num(*nu), num(db), num(ph.to_degrees())]);
        }
        let path = out.join(format!("{stem}.csv"));
        table.write(&path, &base.clone().with("pair", fr.label.clone()))?;
        outcome.files.push(path);
    }
    writeln!(
        outcome.report,
        "{} Bode files, {} points over [{lo:.4e}, {hi:.4e}] rad/s (nu_plt = {nu_plt:.6} rad/s)",
        outcome.files.len(),
        grid.len()
    )
    .unwrap();
    Ok(outcome)
}
