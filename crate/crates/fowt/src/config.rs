//! Run configuration: INI text with `use = <set>` includes, flattened into a
//! [`Document`] and then typed into a [`RunConfig`].
//!
//! Keys outside any section are limited to `use`, a comma-separated list of
//! parameter sets merged in order before the file's own sections. A set name
//! resolves to `<name>`, `<name>.ini` or `params/<name>.ini` next to the
//! including file, then to a built-in set. Later values replace earlier ones
//! key by key.
//!
//! | section | keys |
//! |---|---|
//! | `run` | `seed`, `parameter_set` |
//! | `structure` | `Ng`, `Jr` (kg·m²), `Jt` (kg·m²), `Dt` (N·m·s/rad), `Kt` (N·m/rad), `ht` (m) |
//! | `sensitivities` | `units` (`SI` or `kN`), `dTa_dV`, `dFa_dV`, `dTa_dOmega`, `dFa_dOmega`, `dTa_dBeta`, `dFa_dBeta`, `dTw_dW` |
//! | `operating_point` | `wind_speed` (m/s), `generator_speed_rpm`, `generator_torque` (N·m), `fine_pitch_deg` |
//! | `controller` | `strategy`, `zeta_rot`, `nu_rot` (rad/s), `m_taug`, `gain_filter_tau` (s) |
//! | `gains` | `kP`, `kI`, `kBeta`, `kTauG`: fixed gains, replacing synthesis |
//! | `simulation` | `dt`, `duration` (s), `method` (`rk4`/`exact`), `limits` (`on`/`off`), `pitch_min_deg`, `pitch_max_deg`, `pitch_rate_deg_s`, `phi0_deg`, `phidot0_deg_s` |
//! | `disturbance.<name>` | `kind` and the keys of that kind, see [`DisturbanceSpec`] |
//! | `fatigue` | `channel`, `m`, `f_ref` (Hz), `n_ref`, `hysteresis`, `curve` (`bilinear`/`single`/`cutoff`), `m1`, `m2`, `knee_cycles`, `knee_stress_mpa`, `section_modulus` (m³), `lifetime_scale`, `stats_start` (s) |
//! | `bode` | `points`, `nu_min`, `nu_max` (rad/s) |
//! | `campaign` | `wind_speeds` (m/s list), `strategies` (list), `write_series` |
//! | `schedule` | `units`, and one `<wind speed> = dTa_dV, dFa_dV, dTa_dOmega, dFa_dOmega, dTa_dBeta, dFa_dBeta, fine_pitch_deg` row per speed |

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use fowt_core::fatigue::{WohlerCurve, DEFAULT_HYSTERESIS};
use fowt_core::gains::{GainFilter, PlatformTarget, RotorTarget};
use fowt_core::sim::{Method, OperatingPoint, PitchLimits};
use fowt_core::{AeroSensitivities, ControlGains, State, Strategy, StructuralParams};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::params;

const KN: f64 = 1.0e3;
const RPM: f64 = std::f64::consts::PI / 30.0;

/// Flattened section → key → value map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    sections: BTreeMap<String, BTreeMap<String, String>>,
    uses: Vec<String>,
    base_dir: PathBuf,
}

impl Document {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut stack = vec![file_id(path)];
        Self::parse(&text, Some(&base), &mut stack)
    }

    /// Parses config text; includes resolve against `base_dir` when given,
    /// otherwise against the built-in sets only.
    pub fn from_str(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        Self::parse(text, base_dir, &mut Vec::new())
    }

    fn parse(text: &str, base_dir: Option<&Path>, stack: &mut Vec<String>) -> Result<Self> {
        let ini = ini::Ini::load_from_str(text).map_err(|e| Error::config(e.to_string()))?;
        let mut own = BTreeMap::<String, BTreeMap<String, String>>::new();
        let mut uses = Vec::new();
        for (section, props) in ini.iter() {
            match section {
                None => {
                    for (k, v) in props.iter() {
                        if k != "use" {
                            return Err(Error::config(format!("key `{k}` must be inside a section")));
                        }
                        uses.extend(v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from));
                    }
                }
                Some(name) => {
                    let entry = own.entry(name.trim().to_string()).or_default();
                    for (k, v) in props.iter() {
                        entry.insert(k.trim().to_string(), v.trim().to_string());
                    }
                }
            }
        }

        let mut doc = Document {
            base_dir: base_dir.map(Path::to_path_buf).unwrap_or_default(),
            uses: uses.clone(),
            ..Document::default()
        };
        for name in &uses {
            let (id, text, dir) = resolve(name, base_dir, stack)?;
            if stack.contains(&id) {
                return Err(Error::IncludeCycle(name.clone()));
            }
            stack.push(id);
            let included = Self::parse(&text, dir.as_deref(), stack)?;
            stack.pop();
            doc.merge(included);
        }
        for (section, keys) in own {
            doc.sections.entry(section).or_default().extend(keys);
        }
        Ok(doc)
    }

    fn merge(&mut self, other: Document) {
        for (section, keys) in other.sections {
            self.sections.entry(section).or_default().extend(keys);
        }
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) {
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value.into());
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    /// Directly included sets, in order.
    pub fn uses(&self) -> &[String] {
        &self.uses
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    /// Canonical text: sections and keys sorted, one `key=value` per line.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (section, keys) in &self.sections {
            out.push('[');
            out.push_str(section);
            out.push_str("]\n");
            for (k, v) in keys {
                out.push_str(k);
                out.push('=');
                out.push_str(v);
                out.push('\n');
            }
        }
        out
    }

    /// SHA-256 of [`Document::canonical`], hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn file_id(path: &Path) -> String {
    std::fs::canonicalize(path)
        .unwrap_or_else(|_| path.to_path_buf())
        .display()
        .to_string()
}

/// Files already being parsed are skipped, so `run/both-nmpz.ini` may
/// include the built-in `both-nmpz`.
fn resolve(name: &str, base_dir: Option<&Path>, stack: &[String]) -> Result<(String, String, Option<PathBuf>)> {
    let mut skipped = false;
    if let Some(dir) = base_dir {
        let candidates = [
            dir.join(name),
            dir.join(format!("{name}.ini")),
            dir.join("params").join(format!("{name}.ini")),
        ];
        for path in candidates.iter().filter(|p| p.is_file()) {
            let id = file_id(path);
            if stack.contains(&id) {
                skipped = true;
                continue;
            }
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            return Ok((id, text, path.parent().map(Path::to_path_buf)));
        }
    }
    match params::builtin(name) {
        Some(text) => Ok((format!("builtin:{name}"), text.to_string(), None)),
        None if skipped => Err(Error::IncludeCycle(name.to_string())),
        None => Err(Error::UnresolvedSet(name.to_string())),
    }
}

/// Typed view over a [`Document`] that remembers which keys were read.
struct Reader<'a> {
    doc: &'a Document,
    used: RefCell<BTreeSet<(String, String)>>,
}

impl<'a> Reader<'a> {
    fn new(doc: &'a Document) -> Self {
        Reader {
            doc,
            used: RefCell::new(BTreeSet::new()),
        }
    }

    fn str(&self, section: &str, key: &str) -> Option<&'a str> {
        self.used.borrow_mut().insert((section.to_string(), key.to_string()));
        self.doc.get(section, key)
    }

    fn f64(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.str(section, key).map(|v| parse_f64(section, key, v)).transpose()
    }

    fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64(section, key)?.unwrap_or(default))
    }

    fn require_f64(&self, section: &str, key: &str) -> Result<f64> {
        self.f64(section, key)?
            .ok_or_else(|| Error::config(format!("missing [{section}] {key}")))
    }

    fn u64(&self, section: &str, key: &str) -> Result<Option<u64>> {
        self.str(section, key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| Error::config(format!("[{section}] {key} = `{v}` is not a non-negative integer")))
            })
            .transpose()
    }

    fn bool_or(&self, section: &str, key: &str, default: bool) -> Result<bool> {
        match self.str(section, key) {
            None => Ok(default),
            Some("on" | "true" | "yes" | "1") => Ok(true),
            Some("off" | "false" | "no" | "0") => Ok(false),
            Some(v) => Err(Error::config(format!("[{section}] {key} = `{v}` is not on/off"))),
        }
    }

    fn list(&self, section: &str, key: &str) -> Vec<&'a str> {
        self.str(section, key)
            .map(|v| v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect())
            .unwrap_or_default()
    }

    /// Every key of every section that was never read.
    fn unused(&self) -> Vec<String> {
        let used = self.used.borrow();
        let mut out = Vec::new();
        for (section, keys) in &self.doc.sections {
            for k in keys.keys() {
                if !used.contains(&(section.clone(), k.clone())) {
                    out.push(format!("unknown key [{section}] {k}"));
                }
            }
        }
        out
    }

    fn mark_section(&self, section: &str) {
        if let Some(keys) = self.doc.sections.get(section) {
            let mut used = self.used.borrow_mut();
            for k in keys.keys() {
                used.insert((section.to_string(), k.clone()));
            }
        }
    }
}

fn parse_f64(section: &str, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::config(format!("[{section}] {key} = `{v}` is not a finite number")))
}

/// How `k_β` is chosen, as written in a config.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategySpec {
    ZetaFixed(f64),
    Reference,
    None,
}

impl StrategySpec {
    /// Accepts `zeta-fixed <ζ>` (or `zeta-fixed:<ζ>`), `reference`
    /// (alias `decoupling`) and `none`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some(rest) = t.strip_prefix("zeta-fixed") {
            let arg = rest.trim_start_matches([' ', ':', '=']).trim();
            let zeta = arg
                .parse::<f64>()
                .map_err(|_| Error::config(format!("strategy `{t}`: expected `zeta-fixed <zeta>`")))?;
            PlatformTarget::new(zeta)?;
            return Ok(StrategySpec::ZetaFixed(zeta));
        }
        match t {
            "reference" | "decoupling" => Ok(StrategySpec::Reference),
            "none" => Ok(StrategySpec::None),
            _ => Err(Error::config(format!(
                "strategy `{t}`: expected `zeta-fixed <zeta>`, `reference` or `none`"
            ))),
        }
    }

    pub fn to_strategy(self) -> Result<Strategy> {
        Ok(match self {
            StrategySpec::ZetaFixed(z) => Strategy::ZetaFixed(PlatformTarget::new(z)?),
            StrategySpec::Reference => Strategy::Decoupling,
            StrategySpec::None => Strategy::None,
        })
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::ZetaFixed(z) => write!(f, "zeta-fixed {z}"),
            StrategySpec::Reference => f.write_str("reference"),
            StrategySpec::None => f.write_str("none"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingConditions {
    /// Mean wind speed (m/s); subtracted from wind files when set.
    pub wind_speed: Option<f64>,
    /// Generator speed (rad/s) and torque (N·m) for the power channel.
    pub point: OperatingPoint,
    /// Operating-point blade pitch (rad).
    pub fine_pitch: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig {
    /// `None` only when fixed gains are given.
    pub strategy: Option<StrategySpec>,
    pub rotor: RotorTarget,
    pub m_taug: f64,
    pub gain_filter: GainFilter,
    pub gain_filter_tau: f64,
    pub fixed_gains: Option<ControlGains>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchLimitSpec {
    pub min: f64,
    pub max: f64,
    pub rate: f64,
}

impl PitchLimitSpec {
    pub fn around(&self, fine_pitch: f64) -> PitchLimits {
        PitchLimits {
            fine_pitch,
            min: self.min,
            max: self.max,
            rate: self.rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub dt: f64,
    pub duration: f64,
    pub method: Method,
    pub limits: Option<PitchLimitSpec>,
    pub x0: State,
}

/// One `[disturbance.<name>]` section.
///
/// | kind | keys |
/// |---|---|
/// | `step-beta` | `onset` (s), `amplitude_deg` |
/// | `step-wind` | `onset` (s), `amplitude` (m/s) |
/// | `mono-wave` | `period` (s), `height` |
/// | `jonswap-wave` | `hs` (m), `tp` (s), `gamma` (default 3.3), `seed` (default: run seed) |
/// | `wind-file` | `file`: two-column CSV `t, v`; `{ws}` expands to the case wind speed |
#[derive(Debug, Clone, PartialEq)]
pub enum DisturbanceSpec {
    StepBeta {
        onset: f64,
        amplitude: f64,
    },
    StepWind {
        onset: f64,
        amplitude: f64,
    },
    MonoWave {
        period: f64,
        height: f64,
    },
    Jonswap {
        hs: f64,
        tp: f64,
        gamma: f64,
        seed: Option<u64>,
    },
    WindFile {
        file: String,
    },
}

impl DisturbanceSpec {
    pub fn is_stochastic(&self) -> bool {
        matches!(self, DisturbanceSpec::Jonswap { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Bilinear,
    Single,
    CutOff,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FatigueConfig {
    pub channel: String,
    /// DEL exponent.
    pub m: f64,
    /// Reference frequency (Hz); `n_ref = f_ref · window length` unless set.
    pub f_ref: f64,
    pub n_ref: Option<f64>,
    /// Fraction of the peak-to-peak range below which reversals are dropped.
    pub hysteresis: f64,
    pub curve: WohlerCurve,
    pub section_modulus: Option<f64>,
    pub lifetime_scale: f64,
    /// Start of the statistics window (s).
    pub stats_start: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodeConfig {
    pub points: usize,
    pub range: Option<(f64, f64)>,
}

/// Sensitivities tabulated against mean wind speed.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    /// `(wind speed, sensitivities, fine pitch in rad)`, sorted by speed.
    pub rows: Vec<(f64, AeroSensitivities, f64)>,
}

impl Schedule {
    /// Linear interpolation between rows; `dTw_dW` is taken from `base`.
    pub fn at(&self, wind_speed: f64, base: &AeroSensitivities) -> Result<(AeroSensitivities, f64)> {
        let rows = &self.rows;
        let (lo, hi) = (rows[0].0, rows[rows.len() - 1].0);
        if !(lo..=hi).contains(&wind_speed) {
            return Err(Error::config(format!(
                "wind speed {wind_speed} m/s outside the schedule [{lo}, {hi}]"
            )));
        }
        let j = rows.iter().position(|r| r.0 >= wind_speed).unwrap_or(rows.len() - 1);
        let (i, f) = if j == 0 || rows[j].0 == wind_speed {
            (j, 0.0)
        } else {
            (j - 1, (wind_speed - rows[j - 1].0) / (rows[j].0 - rows[j - 1].0))
        };
        let a = &rows[i];
        let b = &rows[(i + 1).min(rows.len() - 1)];
        let mix = |x: f64, y: f64| x + f * (y - x);
        let s = AeroSensitivities {
            dta_dv: mix(a.1.dta_dv, b.1.dta_dv),
            dfa_dv: mix(a.1.dfa_dv, b.1.dfa_dv),
            dta_domega: mix(a.1.dta_domega, b.1.dta_domega),
            dfa_domega: mix(a.1.dfa_domega, b.1.dfa_domega),
            dta_dbeta: mix(a.1.dta_dbeta, b.1.dta_dbeta),
            dfa_dbeta: mix(a.1.dfa_dbeta, b.1.dfa_dbeta),
            dtw_dw: base.dtw_dw,
        };
        Ok((s, mix(a.2, b.2)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub wind_speeds: Vec<f64>,
    pub strategies: Vec<StrategySpec>,
    pub write_series: bool,
}

/// Everything a subcommand needs, validated.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub parameter_set: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub base_dir: PathBuf,
    pub params: StructuralParams,
    pub sens: AeroSensitivities,
    pub operating: OperatingConditions,
    pub controller: ControllerConfig,
    pub simulation: SimulationConfig,
    /// Sorted by section name.
    pub disturbances: Vec<(String, DisturbanceSpec)>,
    pub fatigue: FatigueConfig,
    pub bode: BodeConfig,
    pub campaign: Option<CampaignConfig>,
    pub schedule: Option<Schedule>,
    /// Non-fatal findings, e.g. unknown keys.
    pub warnings: Vec<String>,
}

impl RunConfig {
    pub fn load(path: &Path, seed_override: Option<u64>) -> Result<Self> {
        let mut doc = Document::load(path)?;
        if let Some(seed) = seed_override {
            doc.set("run", "seed", seed.to_string());
        }
        Self::from_document(&doc)
    }

    pub fn from_document(doc: &Document) -> Result<Self> {
        let r = Reader::new(doc);
        let seed = r.u64("run", "seed")?;
        let parameter_set = match r.str("run", "parameter_set") {
            Some(name) => name.to_string(),
            None if doc.uses().is_empty() => "inline".to_string(),
            None => doc.uses().join("+"),
        };

        let params = StructuralParams {
            gearbox_ratio: r.require_f64("structure", "Ng")?,
            rotor_inertia: r.require_f64("structure", "Jr")?,
            pitch_inertia: r.require_f64("structure", "Jt")?,
            pitch_damping: r.f64_or("structure", "Dt", 0.0)?,
            pitch_stiffness: r.require_f64("structure", "Kt")?,
            hub_height: r.require_f64("structure", "ht")?,
        };
        params.validate()?;

        let scale = unit_scale(r.str("sensitivities", "units"), "sensitivities")?;
        let sens_key = |k: &str| -> Result<f64> { Ok(r.require_f64("sensitivities", k)? * scale) };
        let sens = AeroSensitivities {
            dta_dv: sens_key("dTa_dV")?,
            dfa_dv: sens_key("dFa_dV")?,
            dta_domega: sens_key("dTa_dOmega")?,
            dfa_domega: sens_key("dFa_dOmega")?,
            dta_dbeta: sens_key("dTa_dBeta")?,
            dfa_dbeta: sens_key("dFa_dBeta")?,
            dtw_dw: r.f64_or("sensitivities", "dTw_dW", 0.0)? * scale,
        };
        sens.validate()?;

        let operating = OperatingConditions {
            wind_speed: r.f64("operating_point", "wind_speed")?,
            point: OperatingPoint {
                generator_speed: r.f64_or("operating_point", "generator_speed_rpm", 0.0)? * RPM,
                generator_torque: r.f64_or("operating_point", "generator_torque", 0.0)?,
            },
            fine_pitch: r.f64_or("operating_point", "fine_pitch_deg", 0.0)?.to_radians(),
        };

        let fixed_gains = if doc.has_section("gains") {
            let g = ControlGains {
                kp: r.require_f64("gains", "kP")?,
                ki: r.require_f64("gains", "kI")?,
                kbeta: r.require_f64("gains", "kBeta")?,
                ktaug: r.require_f64("gains", "kTauG")?,
            };
            g.validate()?;
            Some(g)
        } else {
            None
        };
        let strategy = r.str("controller", "strategy").map(StrategySpec::parse).transpose()?;
        if strategy.is_none() && fixed_gains.is_none() {
            return Err(Error::config("missing [controller] strategy (or a [gains] section)"));
        }
        let gain_filter_tau = r.f64_or("controller", "gain_filter_tau", 10.0)?;
        let controller = ControllerConfig {
            strategy,
            rotor: RotorTarget::new(
                r.f64_or("controller", "zeta_rot", 0.6)?,
                r.f64_or("controller", "nu_rot", 0.01)?,
            )?,
            m_taug: r.f64_or("controller", "m_taug", 0.0)?,
            gain_filter: GainFilter::new(gain_filter_tau)?,
            gain_filter_tau,
            fixed_gains,
        };

        let method = match r.str("simulation", "method").unwrap_or("rk4") {
            "rk4" => Method::Rk4,
            "exact" => Method::Exact,
            other => {
                return Err(Error::config(format!(
                    "[simulation] method = `{other}`: expected rk4 or exact"
                )))
            }
        };
        let limits = if r.bool_or("simulation", "limits", false)? {
            Some(PitchLimitSpec {
                min: r.f64_or("simulation", "pitch_min_deg", 0.0)?.to_radians(),
                max: r.f64_or("simulation", "pitch_max_deg", 90.0)?.to_radians(),
                rate: r.f64_or("simulation", "pitch_rate_deg_s", 2.0)?.to_radians(),
            })
        } else {
            None
        };
        if limits.is_some() && method == Method::Exact {
            return Err(Error::config(
                "[simulation] method = exact cannot be combined with pitch limits",
            ));
        }
        let simulation = SimulationConfig {
            dt: r.f64_or("simulation", "dt", 0.01)?,
            duration: r.f64_or("simulation", "duration", 1000.0)?,
            method,
            limits,
            x0: State {
                phi: r.f64_or("simulation", "phi0_deg", 0.0)?.to_radians(),
                phidot: r.f64_or("simulation", "phidot0_deg_s", 0.0)?.to_radians(),
                ..State::default()
            },
        };
        if !(simulation.dt > 0.0 && simulation.duration >= simulation.dt) {
            return Err(Error::config("[simulation] needs dt > 0 and duration >= dt"));
        }

        let mut disturbances = Vec::new();
        for section in doc.sections.keys() {
            if let Some(name) = section.strip_prefix("disturbance.") {
                disturbances.push((name.to_string(), disturbance(&r, section)?));
            }
        }
        if seed.is_none()
            && disturbances
                .iter()
                .any(|(_, d)| matches!(d, DisturbanceSpec::Jonswap { seed: None, .. }))
        {
            return Err(Error::config(
                "a stochastic disturbance needs [run] seed, --seed or its own seed",
            ));
        }

        let fatigue = fatigue(&r)?;
        let bode = BodeConfig {
            points: r
                .u64("bode", "points")?
                .map(|n| n as usize)
                .unwrap_or(fowt_core::freq::DEFAULT_GRID_POINTS),
            range: match (r.f64("bode", "nu_min")?, r.f64("bode", "nu_max")?) {
                (Some(lo), Some(hi)) => Some((lo, hi)),
                (None, None) => None,
                _ => return Err(Error::config("[bode] nu_min and nu_max go together")),
            },
        };

        let campaign = if doc.has_section("campaign") {
            let wind_speeds = r
                .list("campaign", "wind_speeds")
                .into_iter()
                .map(|v| parse_f64("campaign", "wind_speeds", v))
                .collect::<Result<Vec<_>>>()?;
            let mut strategies = r
                .list("campaign", "strategies")
                .into_iter()
                .map(StrategySpec::parse)
                .collect::<Result<Vec<_>>>()?;
            if strategies.is_empty() {
                strategies.extend(strategy);
            }
            if wind_speeds.is_empty() || strategies.is_empty() {
                return Err(Error::config("[campaign] needs wind_speeds and strategies"));
            }
            Some(CampaignConfig {
                wind_speeds,
                strategies,
                write_series: r.bool_or("campaign", "write_series", false)?,
            })
        } else {
            None
        };
        let schedule = schedule(&r, doc)?;

        let warnings = r.unused();
        Ok(RunConfig {
            parameter_set,
            config_hash: doc.hash(),
            seed,
            base_dir: doc.base_dir().to_path_buf(),
            params,
            sens,
            operating,
            controller,
            simulation,
            disturbances,
            fatigue,
            bode,
            campaign,
            schedule,
            warnings,
        })
    }

    pub fn has_stochastic_input(&self) -> bool {
        self.disturbances.iter().any(|(_, d)| d.is_stochastic())
    }
}

fn unit_scale(units: Option<&str>, section: &str) -> Result<f64> {
    match units.unwrap_or("SI") {
        "SI" | "si" => Ok(1.0),
        "kN" | "kn" => Ok(KN),
        other => Err(Error::config(format!(
            "[{section}] units = `{other}`: expected SI or kN"
        ))),
    }
}

fn disturbance(r: &Reader<'_>, section: &str) -> Result<DisturbanceSpec> {
    let kind = r
        .str(section, "kind")
        .ok_or_else(|| Error::config(format!("missing [{section}] kind")))?;
    let d = match kind {
        "step-beta" => DisturbanceSpec::StepBeta {
            onset: r.f64_or(section, "onset", 0.0)?,
            amplitude: r.require_f64(section, "amplitude_deg")?.to_radians(),
        },
        "step-wind" => DisturbanceSpec::StepWind {
            onset: r.f64_or(section, "onset", 0.0)?,
            amplitude: r.require_f64(section, "amplitude")?,
        },
        "mono-wave" => DisturbanceSpec::MonoWave {
            period: r.require_f64(section, "period")?,
            height: r.require_f64(section, "height")?,
        },
        "jonswap-wave" => {
            let d = DisturbanceSpec::Jonswap {
                hs: r.require_f64(section, "hs")?,
                tp: r.require_f64(section, "tp")?,
                gamma: r.f64_or(section, "gamma", 3.3)?,
                seed: r.u64(section, "seed")?,
            };
            if let DisturbanceSpec::Jonswap { hs, tp, gamma, .. } = d {
                if !(hs >= 0.0 && tp > 0.0 && gamma >= 1.0) {
                    return Err(Error::config(format!("[{section}] needs hs >= 0, tp > 0, gamma >= 1")));
                }
            }
            d
        }
        "wind-file" => DisturbanceSpec::WindFile {
            file: r
                .str(section, "file")
                .ok_or_else(|| Error::config(format!("missing [{section}] file")))?
                .to_string(),
        },
        other => {
            return Err(Error::config(format!(
                "[{section}] kind = `{other}`: expected step-beta, step-wind, mono-wave, jonswap-wave or wind-file"
            )))
        }
    };
    match &d {
        DisturbanceSpec::StepBeta { onset, .. } | DisturbanceSpec::StepWind { onset, .. } if *onset < 0.0 => {
            Err(Error::config(format!("[{section}] onset must be >= 0")))
        }
        DisturbanceSpec::MonoWave { period, height } if !(*period > 0.0 && *height >= 0.0) => {
            Err(Error::config(format!("[{section}] needs period > 0 and height >= 0")))
        }
        _ => Ok(d),
    }
}

fn fatigue(r: &Reader<'_>) -> Result<FatigueConfig> {
    let s = "fatigue";
    let m1 = r.f64_or(s, "m1", 3.0)?;
    let knee_cycles = r.f64_or(s, "knee_cycles", 1e6)?;
    let knee_stress = r.f64_or(s, "knee_stress_mpa", 83.4)? * 1e6;
    let curve = match r.str(s, "curve").unwrap_or("bilinear") {
        "bilinear" => WohlerCurve::bilinear(m1, r.f64_or(s, "m2", 5.0)?, knee_cycles, knee_stress)?,
        "single" => WohlerCurve::single(m1, knee_cycles, knee_stress)?,
        "cutoff" => WohlerCurve {
            tail: fowt_core::fatigue::SnTail::CutOff,
            ..WohlerCurve::single(m1, knee_cycles, knee_stress)?
        },
        other => {
            return Err(Error::config(format!(
                "[fatigue] curve = `{other}`: expected bilinear, single or cutoff"
            )))
        }
    };
    let cfg = FatigueConfig {
        channel: r.str(s, "channel").unwrap_or("tower_moment").to_string(),
        m: r.f64_or(s, "m", 3.0)?,
        f_ref: r.f64_or(s, "f_ref", 1.0)?,
        n_ref: r.f64(s, "n_ref")?,
        hysteresis: r.f64_or(s, "hysteresis", DEFAULT_HYSTERESIS)?,
        curve,
        section_modulus: r.f64(s, "section_modulus")?,
        lifetime_scale: r.f64_or(s, "lifetime_scale", 1.0)?,
        stats_start: r.f64_or(s, "stats_start", 200.0)?,
    };
    if !(cfg.m > 0.0 && cfg.f_ref > 0.0 && cfg.stats_start >= 0.0 && (0.0..1.0).contains(&cfg.hysteresis)) {
        return Err(Error::config(
            "[fatigue] needs m > 0, f_ref > 0, stats_start >= 0 and 0 <= hysteresis < 1",
        ));
    }
    Ok(cfg)
}

fn schedule(r: &Reader<'_>, doc: &Document) -> Result<Option<Schedule>> {
    let Some(keys) = doc.sections.get("schedule") else {
        return Ok(None);
    };
    r.mark_section("schedule");
    let scale = unit_scale(doc.get("schedule", "units"), "schedule")?;
    let mut rows = Vec::new();
    for (k, v) in keys {
        if k == "units" {
            continue;
        }
        let ws = parse_f64("schedule", k, k)?;
        let vals = v
            .split(',')
            .map(|x| parse_f64("schedule", k, x.trim()))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != 7 {
            return Err(Error::config(format!(
                "[schedule] {k}: expected 7 values, found {}",
                vals.len()
            )));
        }
        let s = AeroSensitivities {
            dta_dv: vals[0] * scale,
            dfa_dv: vals[1] * scale,
            dta_domega: vals[2] * scale,
            dfa_domega: vals[3] * scale,
            dta_dbeta: vals[4] * scale,
            dfa_dbeta: vals[5] * scale,
            dtw_dw: 0.0,
        };
        rows.push((ws, s, vals[6].to_radians()));
    }
    if rows.is_empty() {
        return Err(Error::config("[schedule] has no rows"));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Some(Schedule { rows }))
}
