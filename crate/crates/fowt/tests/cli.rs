use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fowt::output::read_table;

fn fowt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fowt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = fowt(args);
    assert!(
        out.status.success(),
        "fowt {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Data rows only, without the `#` header.
fn body(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

const MONO: &str = "use = umaine-iea15
[controller]
strategy = zeta-fixed 0.10
[simulation]
dt = 0.05
duration = 400
[disturbance.wave]
kind = mono-wave
period = 28.75
height = 1.5
";

#[test]
fn exported_gains_reproduce_the_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = write(d, "run.ini", MONO);
    let (c, tuned, a, b) = (cfg.to_str().unwrap(), d.join("tuned"), d.join("a"), d.join("b"));
    ok(&["tune", "-c", c, "-o", tuned.to_str().unwrap()]);
    ok(&["simulate", "-c", c, "-o", a.to_str().unwrap()]);

    let fixed = MONO.replace("use = umaine-iea15", "use = umaine-iea15, tuned/gains");
    let fixed = fixed.replace("[controller]\nstrategy = zeta-fixed 0.10\n", "");
    let cfg2 = write(d, "fixed.ini", &fixed);
    ok(&["simulate", "-c", cfg2.to_str().unwrap(), "-o", b.to_str().unwrap()]);
    assert_eq!(body(&a.join("timeseries.csv")), body(&b.join("timeseries.csv")));
}

#[test]
fn strategy_none_reports_zero_kbeta() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.ini", &MONO.replace("zeta-fixed 0.10", "none"));
    let out = dir.path().join("out");
    ok(&["tune", "-c", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    let t = read_table(&out.join("tune.csv")).unwrap();
    assert_eq!(t.column("kBeta").unwrap(), &[0.0]);
}

#[test]
fn zeta_fixed_kbeta_opposes_the_thrust_pitch_derivative() {
    // Adding damping needs k_β ∂Fa/∂β < 0; with ∂Fa/∂β < 0 that is k_β > 0.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.ini", MONO);
    let out = dir.path().join("out");
    let report = ok(&["tune", "-c", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    let t = read_table(&out.join("tune.csv")).unwrap();
    assert!(t.column("kBeta").unwrap()[0] > 0.0);
    assert!((t.column("zeta_plt").unwrap()[0] - 0.10).abs() < 1e-12);
    assert!(report.contains("kBeta"));
}

#[test]
fn analyze_flags_double_nmpz_as_unstable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "both-nmpz.ini",
        "use = nmpz-demo, both-nmpz\n[controller]\nstrategy = none\n",
    );
    let out = dir.path().join("out");
    let report = ok(&["analyze", "-c", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert!(report.contains("verdict: unstable"), "{report}");
    let t = read_table(&out.join("modes.csv")).unwrap();
    assert_eq!(t.header.iter().find(|(k, _)| k == "verdict").unwrap().1, "unstable");
    let c = std::fs::read_to_string(out.join("conditions.csv")).unwrap();
    assert!(c.contains("phi_nmpz,true") && c.contains("omega_nmpz,true"), "{c}");
}

#[test]
fn bode_default_grid_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.ini", MONO);
    let out = dir.path().join("out");
    ok(&["bode", "-c", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    let t = read_table(&out.join("bode_phi_w.csv")).unwrap();
    let nu = t.column("nu").unwrap();
    assert_eq!(nu.len(), 400);
    assert!(nu.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(t.unit("phase"), Some("deg"));
    assert!(out.join("bode_phi_w_reduced.csv").is_file());
}

#[test]
fn every_output_carries_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.ini", MONO);
    let c = cfg.to_str().unwrap();
    let out = dir.path().join("out");
    let o = out.to_str().unwrap();
    for cmd in ["tune", "analyze", "simulate", "bode"] {
        ok(&[cmd, "-c", c, "-o", o]);
    }
    ok(&[
        "fatigue",
        "-c",
        c,
        "-o",
        o,
        "--series",
        out.join("timeseries.csv").to_str().unwrap(),
    ]);
    let mut seen = 0;
    for entry in std::fs::read_dir(&out).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        for key in ["tool=fowt ", "config_hash=", "parameter_set=umaine-iea15", "seed=none"] {
            assert!(text.contains(key), "{} lacks {key}", path.display());
        }
        seen += 1;
    }
    assert!(seen >= 20, "{seen} files");
    let f = read_table(&out.join("fatigue.csv")).unwrap();
    assert!(f.column("del").unwrap()[0] > 0.0);
    assert!(f.column("damage").unwrap()[0] > 0.0);
}

const CAMPAIGN: &str = "use = umaine-iea15, umaine-iea15-schedule
[controller]
strategy = zeta-fixed 0.10
[simulation]
dt = 0.1
duration = 400
[disturbance.sea]
kind = jonswap-wave
hs = 1.5
tp = 11
gamma = 2.0
[campaign]
wind_speeds = 12, 14, 16, 18, 20, 22, 24
strategies = zeta-fixed 0.10, reference
";

#[test]
fn campaign_is_complete_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "campaign.ini", CAMPAIGN);
    let c = cfg.to_str().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let out = fowt(&[
        "campaign",
        "-c",
        c,
        "-o",
        a.to_str().unwrap(),
        "--seed",
        "5",
        "--jobs",
        "4",
    ]);
    assert!(out.status.success());
    // 400 s exceeds ten peak periods.
    assert!(!String::from_utf8_lossy(&out.stderr).contains("peak period"));
    ok(&[
        "campaign",
        "-c",
        c,
        "-o",
        b.to_str().unwrap(),
        "--seed",
        "5",
        "--jobs",
        "1",
    ]);

    let summary = std::fs::read(a.join("campaign.csv")).unwrap();
    assert_eq!(summary, std::fs::read(b.join("campaign.csv")).unwrap());
    let t = read_table_text(&a.join("campaign.csv"));
    assert_eq!(t.len(), 14);
    for (i, row) in t.iter().enumerate() {
        assert_eq!(row[0], i.to_string());
        assert_eq!(row[3], "ok");
    }
    assert_eq!(t[0][2], "zeta-fixed 0.1");
    assert_eq!(t[1][2], "reference");

    let other = dir.path().join("c");
    ok(&["campaign", "-c", c, "-o", other.to_str().unwrap(), "--seed", "6"]);
    assert_ne!(summary, std::fs::read(other.join("campaign.csv")).unwrap());
}

#[test]
fn campaign_keeps_failed_and_diverged_cases() {
    let dir = tempfile::tempdir().unwrap();
    let text = "use = nmpz-demo, both-nmpz
[controller]
strategy = none
[simulation]
dt = 0.1
duration = 3000
[fatigue]
stats_start = 0
[disturbance.push]
kind = step-wind
amplitude = 1
[campaign]
wind_speeds = 14, 16
strategies = none, zeta-fixed 0.5
";
    let cfg = write(dir.path(), "c.ini", text);
    let out = dir.path().join("out");
    ok(&["campaign", "-c", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    let rows = read_table_text(&out.join("campaign.csv"));
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().any(|r| r[3] == "diverged"), "{rows:?}");
}

fn read_table_text(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    rdr.records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn hard_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = out.to_str().unwrap();
    assert!(!fowt(&["tune", "-o", o]).status.success());
    assert!(!fowt(&["tune", "-c", "/nonexistent.ini", "-o", o]).status.success());
    let bad = write(dir.path(), "bad.ini", "use = no-such-set\n");
    let e = fowt(&["tune", "-c", bad.to_str().unwrap(), "-o", o]);
    assert!(!e.status.success());
    assert!(String::from_utf8_lossy(&e.stderr).contains("no-such-set"));

    let sea = format!("{MONO}[disturbance.sea]\nkind = jonswap-wave\nhs = 1.5\ntp = 11\n");
    let unseeded = write(dir.path(), "sea.ini", &sea);
    let u = unseeded.to_str().unwrap();
    assert!(!fowt(&["simulate", "-c", u, "-o", o]).status.success());
    ok(&["simulate", "-c", u, "-o", o, "--seed", "1"]);
}

#[test]
fn warnings_keep_exit_code_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.ini", &format!("{MONO}[bode]\npionts = 10\n"));
    let out = fowt(&[
        "tune",
        "-c",
        cfg.to_str().unwrap(),
        "-o",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key [bode] pionts"));
}

#[test]
fn params_lists_builtins() {
    let list = ok(&["params"]);
    assert!(list.lines().any(|l| l == "umaine-iea15"));
    assert!(ok(&["params", "phi-nmpz"]).contains("dFa_dBeta"));
    assert!(!fowt(&["params", "nope"]).status.success());
}
