//! Time-domain integration of the closed loop and free-decay identification.
//!
//! Inputs are zero-order hold: every disturbance is sampled at the start of a
//! step and held over it, for both integrators. With that convention the
//! `Exact` method is the exact discretisation of the linear system.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{SMatrix, Vector4};
// Float supplies the libm-backed math methods when std is absent.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::expm;
use crate::model::{State, StateSpace};
use crate::{Error, Result};

/// State norm above which a run is declared diverged.
pub const DIVERGENCE_BOUND: f64 = 1e30;

/// Uniformly sampled multichannel signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub t0: f64,
    pub dt: f64,
    channels: Vec<Channel>,
    /// Time at which the state left the finite / bounded region, if it did.
    /// Channels stop at the last good sample.
    pub diverged_at: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub name: String,
    pub unit: String,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t0: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt", dt, "must be > 0"));
        }
        if !t0.is_finite() {
            return Err(Error::param("t0", t0, "must be finite"));
        }
        Ok(TimeSeries {
            t0,
            dt,
            channels: Vec::new(),
            diverged_at: None,
        })
    }

    pub fn push_channel(&mut self, name: &str, unit: &str, values: Vec<f64>) -> Result<()> {
        if self.channels.iter().any(|c| c.name == name) {
            return Err(Error::InvalidInput("duplicate channel name"));
        }
        if let Some(first) = self.channels.first() {
            if first.values.len() != values.len() {
                return Err(Error::InvalidInput("channel length mismatch"));
            }
        }
        self.channels.push(Channel {
            name: name.to_string(),
            unit: unit.to_string(),
            values,
        });
        Ok(())
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, |c| c.values.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    /// Index of the first sample at or after `t`.
    pub fn index_at(&self, t: f64) -> usize {
        let k = ((t - self.t0) / self.dt - 1e-9).ceil();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.len())
        }
    }
}

/// Which input a disturbance drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// Open-loop blade pitch added to the feedback (rad).
    Beta,
    /// Open-loop generator torque added to the feedback (N·m).
    TauG,
    /// Wind speed perturbation (m/s).
    Wind,
    /// Wave forcing signal.
    Wave,
}

impl Target {
    fn index(self) -> usize {
        match self {
            Target::Beta => 0,
            Target::TauG => 1,
            Target::Wind => 2,
            Target::Wave => 3,
        }
    }
}

/// One additive input signal.
#[derive(Debug, Clone, PartialEq)]
pub enum Disturbance {
    /// `amplitude` for `t ≥ onset`, zero before.
    Step { target: Target, onset: f64, amplitude: f64 },
    /// Wave signal `(height/2) sin(2π t / period)`.
    MonoWave { period: f64, height: f64 },
    /// Sampled signal, linearly interpolated and held flat outside its span.
    Samples {
        target: Target,
        t0: f64,
        dt: f64,
        values: Vec<f64>,
    },
}

impl Disturbance {
    pub fn step_beta(onset: f64, amplitude: f64) -> Self {
        Disturbance::Step {
            target: Target::Beta,
            onset,
            amplitude,
        }
    }

    pub fn step_wind(onset: f64, amplitude: f64) -> Self {
        Disturbance::Step {
            target: Target::Wind,
            onset,
            amplitude,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Disturbance::Step { onset, amplitude, .. } => {
                if !(*onset >= 0.0 && onset.is_finite()) {
                    return Err(Error::param("onset", *onset, "must be >= 0"));
                }
                if !amplitude.is_finite() {
                    return Err(Error::param("amplitude", *amplitude, "must be finite"));
                }
            }
            Disturbance::MonoWave { period, height } => {
                if !(*period > 0.0 && period.is_finite()) {
                    return Err(Error::param("Tp", *period, "must be > 0"));
                }
                if !(*height >= 0.0 && height.is_finite()) {
                    return Err(Error::param("Hw", *height, "must be >= 0"));
                }
            }
            Disturbance::Samples { dt, values, .. } => {
                if !(*dt > 0.0) {
                    return Err(Error::param("dt", *dt, "must be > 0"));
                }
                if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("sampled disturbance must be non-empty and finite"));
                }
            }
        }
        Ok(())
    }

    pub fn target(&self) -> Target {
        match self {
            Disturbance::Step { target, .. } | Disturbance::Samples { target, .. } => *target,
            Disturbance::MonoWave { .. } => Target::Wave,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Disturbance::Step { onset, amplitude, .. } => {
                if t >= *onset {
                    *amplitude
                } else {
                    0.0
                }
            }
            Disturbance::MonoWave { period, height } => 0.5 * height * (2.0 * PI * t / period).sin(),
            Disturbance::Samples { t0, dt, values, .. } => interpolate(*t0, *dt, values, t),
        }
    }
}

fn interpolate(t0: f64, dt: f64, values: &[f64], t: f64) -> f64 {
    let x = (t - t0) / dt;
    if x <= 0.0 {
        return values[0];
    }
    let i = x.floor() as usize;
    if i + 1 >= values.len() {
        return values[values.len() - 1];
    }
    let f = x - i as f64;
    values[i] + f * (values[i + 1] - values[i])
}

/// Sum of all disturbances at `t`, as `(β_ol, τ_g,ol, v, w)`.
fn inputs(disturbances: &[Disturbance], t: f64) -> Vector4<f64> {
    let mut u = Vector4::zeros();
    for d in disturbances {
        u[d.target().index()] += d.value(t);
    }
    u
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Rk4,
    /// Matrix-exponential discretisation. Linear runs only.
    Exact,
}

/// Blade-pitch actuator limits. `fine_pitch` is the operating-point pitch;
/// the absolute command `fine_pitch + β` is clamped to `[min, max]` and its
/// rate to `±rate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchLimits {
    pub fine_pitch: f64,
    pub min: f64,
    pub max: f64,
    pub rate: f64,
}

impl PitchLimits {
    /// `[0°, 90°]` and `2 °/s` around the given fine pitch.
    pub fn standard(fine_pitch: f64) -> Self {
        PitchLimits {
            fine_pitch,
            min: 0.0,
            max: PI / 2.0,
            rate: 2.0_f64.to_radians(),
        }
    }

    fn apply(&self, command: f64, previous: f64, dt: f64) -> f64 {
        let lo = self.min - self.fine_pitch;
        let hi = self.max - self.fine_pitch;
        let step = self.rate * dt;
        command.clamp(previous - step, previous + step).clamp(lo, hi)
    }
}

/// Operating point used only for the derived power channel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OperatingPoint {
    /// Generator speed `Ω̄` (rad/s).
    pub generator_speed: f64,
    /// Generator torque `T̄_g` (N·m).
    pub generator_torque: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub duration: f64,
    pub method: Method,
    pub x0: State,
    pub limits: Option<PitchLimits>,
    pub operating_point: OperatingPoint,
}

impl SimConfig {
    pub fn new(dt: f64, duration: f64) -> Self {
        SimConfig {
            dt,
            duration,
            method: Method::Rk4,
            x0: State::default(),
            limits: None,
            operating_point: OperatingPoint::default(),
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_x0(mut self, x0: State) -> Self {
        self.x0 = x0;
        self
    }

    pub fn with_limits(mut self, limits: PitchLimits) -> Self {
        self.limits = Some(limits);
        self
    }

    fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param("dt", self.dt, "must be > 0"));
        }
        if !(self.duration >= self.dt && self.duration.is_finite()) {
            return Err(Error::param("T", self.duration, "must be >= dt"));
        }
        Ok((self.duration / self.dt).round() as usize)
    }
}

/// Channel names, units in the order they appear in a simulation result.
pub const CHANNELS: [(&str, &str); 11] = [
    ("theta", "rad"),
    ("omega", "rad/s"),
    ("phi", "rad"),
    ("phidot", "rad/s"),
    ("beta", "rad"),
    ("tau_g", "N*m"),
    ("v", "m/s"),
    ("w", "-"),
    ("v_rel", "m/s"),
    ("tower_moment", "N*m"),
    ("power", "W"),
];

type Step = dyn Fn(&Vector4<f64>, &Vector4<f64>) -> Vector4<f64>;

/// Integrates `ẋ = A x + Bc u_ol + Bd u_d` from `config.x0`.
///
/// Without limits the feedback is the continuous one inside `A`. With
/// [`PitchLimits`] the pitch command is evaluated at each step start, limited,
/// and held; the torque feedback stays continuous.
pub fn simulate(ss: &StateSpace, disturbances: &[Disturbance], config: &SimConfig) -> Result<TimeSeries> {
    let n = config.steps()?;
    for d in disturbances {
        d.validate()?;
    }
    if config.limits.is_some() && config.method == Method::Exact {
        return Err(Error::InvalidInput(
            "exact discretisation is only valid without pitch limits",
        ));
    }
    let dt = config.dt;
    let k0 = ss.k0();

    // Dynamics seen by the integrator: pitch feedback is either inside the
    // matrix or applied explicitly through the first input.
    let a = match config.limits {
        None => ss.a,
        Some(_) => ss.a0 + ss.bc.column(1) * k0.row(1),
    };
    let b = ss.b();

    let step: alloc::boxed::Box<Step> = match config.method {
        Method::Rk4 => alloc::boxed::Box::new(move |x: &Vector4<f64>, u: &Vector4<f64>| {
            let bu = b * u;
            let f = |x: &Vector4<f64>| a * x + bu;
            let k1 = f(x);
            let k2 = f(&(x + k1 * (dt / 2.0)));
            let k3 = f(&(x + k2 * (dt / 2.0)));
            let k4 = f(&(x + k3 * dt));
            x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
        }),
        Method::Exact => {
            let mut m = SMatrix::<f64, 8, 8>::zeros();
            m.fixed_view_mut::<4, 4>(0, 0).copy_from(&(a * dt));
            m.fixed_view_mut::<4, 4>(0, 4).copy_from(&(b * dt));
            let e = expm(&m);
            let phi: nalgebra::Matrix4<f64> = e.fixed_view::<4, 4>(0, 0).into();
            let gamma: nalgebra::Matrix4<f64> = e.fixed_view::<4, 4>(0, 4).into();
            alloc::boxed::Box::new(move |x: &Vector4<f64>, u: &Vector4<f64>| phi * x + gamma * u)
        }
    };

    let mut rows: Vec<[f64; 11]> = Vec::with_capacity(n + 1);
    let mut x = config.x0.to_vector();
    let mut beta_prev = 0.0;
    let mut diverged_at = None;
    let p = &ss.params;
    let s = &ss.sens;
    let op = &config.operating_point;

    for k in 0..=n {
        let t = k as f64 * dt;
        let mut u = inputs(disturbances, t);
        let beta_cmd = ss.gains.ki * x[0] + ss.gains.kp * x[1] + ss.gains.kbeta * x[3] + u[0];
        let beta = match config.limits {
            Some(l) => {
                let b = l.apply(beta_cmd, beta_prev, dt);
                beta_prev = b;
                u[0] = b;
                b
            }
            None => beta_cmd,
        };
        let tau_g = ss.gains.ktaug * x[3] + u[1];
        let (v, w) = (u[2], u[3]);
        let v_rel = v - p.hub_height * x[3];
        let moment =
            p.hub_height * (s.dfa_dv * v_rel + s.dfa_domega * x[1] + s.dfa_dbeta * beta) + p.pitch_stiffness * x[2];
        let power = p.gearbox_ratio * (op.generator_torque + tau_g) * (op.generator_speed + x[1]);
        rows.push([x[0], x[1], x[2], x[3], beta, tau_g, v, w, v_rel, moment, power]);

        if k == n {
            break;
        }
        let next = step(&x, &u);
        if next.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_BOUND) {
            diverged_at = Some(t + dt);
            break;
        }
        x = next;
    }

    let mut ts = TimeSeries::new(0.0, dt)?;
    for (j, (name, unit)) in CHANNELS.iter().enumerate() {
        ts.push_channel(name, unit, rows.iter().map(|r| r[j]).collect())?;
    }
    ts.diverged_at = diverged_at;
    Ok(ts)
}

/// Wave signal `w(t) = (H_w/2) sin(2π t/T_p)` on `[0, T]`.
pub fn mono_wave(period: f64, height: f64, dt: f64, duration: f64) -> Result<TimeSeries> {
    let d = Disturbance::MonoWave { period, height };
    d.validate()?;
    let n = SimConfig::new(dt, duration).steps()?;
    let mut ts = TimeSeries::new(0.0, dt)?;
    ts.push_channel("w", "-", (0..=n).map(|k| d.value(k as f64 * dt)).collect())?;
    Ok(ts)
}

/// JONSWAP spectral density `S(ω)` in m²·s/rad for significant height `hs`,
/// peak period `tp` and peak enhancement `gamma`.
///
/// Uses the Pierson–Moskowitz shape with the normalisation
/// `1 − 0.287 ln γ`, so `∫ S dω ≈ (H_s/4)²`.
pub fn jonswap_density(omega: f64, hs: f64, tp: f64, gamma: f64) -> f64 {
    if omega <= 0.0 {
        return 0.0;
    }
    let wp = 2.0 * PI / tp;
    let sigma = if omega <= wp { 0.07 } else { 0.09 };
    let r = (-(omega - wp).powi(2) / (2.0 * sigma * sigma * wp * wp)).exp();
    let norm = 1.0 - 0.287 * gamma.ln();
    let pm = 5.0 / 16.0 * hs * hs * wp.powi(4) / omega.powi(5) * (-1.25 * (wp / omega).powi(4)).exp();
    norm * pm * gamma.powf(r)
}

/// Damping identified from a free decay of platform pitch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayEstimate {
    Underdamped {
        zeta: f64,
        nu: f64,
        /// Number of positive peaks used.
        peaks: usize,
    },
    /// Fewer than three positive peaks: no oscillation to measure.
    /// `decay_rate` is the exponential-fit rate of `|φ|` (1/s).
    Overdamped { decay_rate: f64, peaks: usize },
}

impl DecayEstimate {
    pub fn zeta(&self) -> Option<f64> {
        match self {
            DecayEstimate::Underdamped { zeta, .. } => Some(*zeta),
            DecayEstimate::Overdamped { .. } => None,
        }
    }
}

/// Interior local maxima of `x` above `floor`, refined by a parabola
/// through the three samples around each: `(time, value)` pairs.
pub fn positive_peaks(x: &[f64], dt: f64, floor: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..x.len().saturating_sub(1) {
        let (a, b, c) = (x[i - 1], x[i], x[i + 1]);
        if b > a && b >= c && b > floor {
            let denom = a - 2.0 * b + c;
            let (shift, value) = if denom < 0.0 {
                let d = 0.5 * (a - c) / denom;
                (d, b - 0.25 * (a - c) * d)
            } else {
                (0.0, b)
            };
            out.push(((i as f64 + shift) * dt, value));
        }
    }
    out
}

/// Minimum number of peaks for a log-decrement estimate.
pub const MIN_DECAY_PEAKS: usize = 3;

/// Free decay of the closed loop from `x0`, with `ζ` from the logarithmic
/// decrement over the successive positive peaks of `φ`:
/// `δ = ln(p₀/p_n)/n`, `ζ = δ/√(4π² + δ²)`, and `ν` from the mean peak
/// spacing, `ν = 2π/(T_d √(1 − ζ²))`.
pub fn free_decay(ss: &StateSpace, x0: State, dt: f64, duration: f64) -> Result<DecayEstimate> {
    let ts = simulate(ss, &[], &SimConfig::new(dt, duration).with_x0(x0))?;
    let phi = ts.channel("phi").unwrap_or(&[]);
    let scale = phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::InvalidInput("free decay needs a nonzero platform pitch"));
    }
    let peaks = positive_peaks(phi, dt, 1e-9 * scale);
    if peaks.len() < MIN_DECAY_PEAKS {
        return Ok(DecayEstimate::Overdamped {
            decay_rate: exponential_rate(phi, dt, scale),
            peaks: peaks.len(),
        });
    }
    let n = (peaks.len() - 1) as f64;
    let (t_first, p_first) = peaks[0];
    let (t_last, p_last) = peaks[peaks.len() - 1];
    let delta = (p_first / p_last).ln() / n;
    let zeta = delta / (4.0 * PI * PI + delta * delta).sqrt();
    let period = (t_last - t_first) / n;
    let nu = 2.0 * PI / (period * (1.0 - zeta * zeta).sqrt());
    Ok(DecayEstimate::Underdamped {
        zeta,
        nu,
        peaks: peaks.len(),
    })
}

/// Least-squares slope of `−ln|x|` against time over samples well above
/// round-off.
fn exponential_rate(x: &[f64], dt: f64, scale: f64) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > 1e-9 * scale)
        .map(|(i, v)| (i as f64 * dt, v.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return f64::INFINITY;
    }
    let n = pts.len() as f64;
    let (st, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t, b + y));
    let (mt, my) = (st / n, sy / n);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| {
        (a + (t - mt) * (y - my), b + (t - mt) * (t - mt))
    });
    -num / den
}

/// Half the peak-to-peak excursion of `x` over the samples from `start`.
pub fn amplitude(x: &[f64], start: usize) -> f64 {
    let tail = &x[start.min(x.len())..];
    let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if tail.is_empty() {
        0.0
    } else {
        0.5 * (hi - lo)
    }
}

/// Largest pointwise difference between two equally sampled signals.
pub fn max_abs_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::freq::{gplt, PlatformInput};
    use crate::gains::{kbeta_zeta_fixed, tune_pi, PlatformTarget, RotorTarget};
    use crate::model::build_open_loop;
    use crate::stability::platform_summary;
    use crate::{Complex, ControlGains};
    use alloc::vec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn closed(sens: crate::AeroSensitivities, zeta_plt: Option<f64>) -> StateSpace {
        let p = umaine();
        let (kp, ki) = tune_pi(&p, &sens, &RotorTarget::new(0.6, 0.01).unwrap()).unwrap();
        let kbeta = zeta_plt
            .map(|z| kbeta_zeta_fixed(&p, &sens, &PlatformTarget::new(z).unwrap()).unwrap())
            .unwrap_or(0.0);
        build_open_loop(&p, &sens)
            .unwrap()
            .close_loop(&ControlGains {
                kp,
                ki,
                kbeta,
                ktaug: 0.0,
            })
            .unwrap()
    }

    /// Platform loop alone on a model without rotor/platform coupling.
    fn decoupled(sens: crate::AeroSensitivities, zeta_plt: f64) -> StateSpace {
        let sens = sens.with_coupling_scaled(0.0);
        let kbeta = kbeta_zeta_fixed(&umaine(), &sens, &PlatformTarget::new(zeta_plt).unwrap()).unwrap();
        build_open_loop(&umaine(), &sens)
            .unwrap()
            .close_loop(&ControlGains {
                kbeta,
                ..Default::default()
            })
            .unwrap()
    }

    fn wave_sens() -> crate::AeroSensitivities {
        crate::AeroSensitivities {
            dtw_dw: 5.0e7,
            ..phi_minphase()
        }
    }

    #[test]
    fn zero_input_zero_state() {
        let ts = simulate(&closed(phi_minphase(), Some(0.1)), &[], &SimConfig::new(0.01, 10.0)).unwrap();
        assert_eq!(ts.len(), 1001);
        for c in ts.channels() {
            if c.name != "power" {
                assert!(c.values.iter().all(|v| *v == 0.0), "{}", c.name);
            }
        }
        assert!(ts.diverged_at.is_none());
    }

    #[test]
    fn rk4_matches_exact() {
        let ss = closed(wave_sens(), Some(0.1));
        let d = [
            Disturbance::step_beta(10.0, 0.01),
            Disturbance::MonoWave {
                period: 28.75,
                height: 2.0,
            },
        ];
        let cfg = SimConfig::new(0.01, 100.0);
        let a = simulate(&ss, &d, &cfg).unwrap();
        let b = simulate(&ss, &d, &cfg.clone().with_method(Method::Exact)).unwrap();
        for name in ["theta", "omega", "phi", "phidot"] {
            let e = max_abs_difference(a.channel(name).unwrap(), b.channel(name).unwrap());
            assert!(e < 1e-8, "{name}: {e}");
        }
    }

    #[test]
    fn superposition() {
        let ss = closed(wave_sens(), Some(0.25));
        let cfg = SimConfig::new(0.05, 200.0);
        let u1 = Disturbance::step_wind(5.0, 1.0);
        let u2 = Disturbance::MonoWave {
            period: 11.0,
            height: 3.0,
        };
        let a = simulate(&ss, core::slice::from_ref(&u1), &cfg).unwrap();
        let b = simulate(&ss, core::slice::from_ref(&u2), &cfg).unwrap();
        let c = simulate(&ss, &[u1, u2], &cfg).unwrap();
        for name in ["omega", "phi", "tower_moment"] {
            let sum: Vec<f64> = a
                .channel(name)
                .unwrap()
                .iter()
                .zip(b.channel(name).unwrap())
                .map(|(x, y)| x + y)
                .collect();
            let got = c.channel(name).unwrap();
            let scale = got.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(max_abs_difference(&sum, got) <= 1e-9 * scale);
        }
    }

    #[test]
    fn derived_channels() {
        let ss = closed(wave_sens(), Some(0.1));
        let ts = simulate(&ss, &[Disturbance::step_wind(0.0, 1.0)], &SimConfig::new(0.1, 50.0)).unwrap();
        let i = 300;
        let (omega, phidot, phi) = (
            ts.channel("omega").unwrap()[i],
            ts.channel("phidot").unwrap()[i],
            ts.channel("phi").unwrap()[i],
        );
        let theta = ts.channel("theta").unwrap()[i];
        let g = ss.gains;
        assert_relative_eq!(
            ts.channel("beta").unwrap()[i],
            g.ki * theta + g.kp * omega + g.kbeta * phidot
        );
        assert_relative_eq!(ts.channel("v_rel").unwrap()[i], 1.0 - 150.0 * phidot);
        let p = ss.params;
        let s = ss.sens;
        let beta = ts.channel("beta").unwrap()[i];
        let m = p.hub_height * (s.dfa_dv * (1.0 - 150.0 * phidot) + s.dfa_domega * omega + s.dfa_dbeta * beta)
            + p.pitch_stiffness * phi;
        assert_relative_eq!(ts.channel("tower_moment").unwrap()[i], m, max_relative = 1e-12);
    }

    #[test]
    fn saturation_and_rate_limit() {
        let ss = closed(phi_minphase(), Some(0.1));
        let limits = PitchLimits::standard(0.15);
        let cfg = SimConfig::new(0.01, 30.0).with_limits(limits);
        let ts = simulate(&ss, &[Disturbance::step_beta(1.0, -1.0)], &cfg).unwrap();
        let beta = ts.channel("beta").unwrap();
        assert!(beta.iter().all(|b| *b >= -0.15 - 1e-15));
        assert!(beta
            .windows(2)
            .all(|w| (w[1] - w[0]).abs() <= limits.rate * 0.01 + 1e-15));
        assert!(beta.iter().any(|b| (*b + 0.15).abs() < 1e-12));
        assert!(simulate(&ss, &[], &cfg.with_method(Method::Exact)).is_err());
    }

    #[test]
    fn inactive_limits_match_linear_closely() {
        // Small inputs never hit the limits; the only difference is the held
        // pitch feedback, first order in dt.
        let ss = closed(phi_minphase(), Some(0.1));
        let d = [Disturbance::step_wind(1.0, 0.1)];
        let lin = simulate(&ss, &d, &SimConfig::new(0.01, 100.0)).unwrap();
        let lim = simulate(
            &ss,
            &d,
            &SimConfig::new(0.01, 100.0).with_limits(PitchLimits::standard(0.15)),
        )
        .unwrap();
        let a = lin.channel("phi").unwrap();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(max_abs_difference(a, lim.channel("phi").unwrap()) < 1e-2 * scale);
    }

    #[test]
    fn divergence_truncates() {
        // Negative stiffness and damping: exponential growth.
        let mut ss = closed(phi_minphase(), None);
        ss.a[(3, 2)] = 50.0;
        let ts = simulate(&ss, &[], &SimConfig::new(0.01, 1000.0).with_x0(State::platform(0.1))).unwrap();
        let t = ts.diverged_at.unwrap();
        assert!(t < 1000.0);
        assert_eq!(ts.len(), ts.index_at(t));
        assert!(ts.channel("phi").unwrap().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn decoupled_free_decay_recovers_zeta() {
        for zeta in [0.05, 0.1, 0.25, 0.5] {
            let ss = decoupled(phi_minphase(), zeta);
            let est = free_decay(&ss, State::platform(0.05), 0.01, 600.0).unwrap();
            match est {
                DecayEstimate::Underdamped { zeta: z, nu, peaks } => {
                    assert!(peaks >= 5, "{peaks}");
                    assert_relative_eq!(z, zeta, max_relative = 2e-3);
                    assert_relative_eq!(nu, 0.21852940772540505, max_relative = 2e-3);
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn critical_damping_is_overdamped() {
        let ss = decoupled(phi_minphase(), 1.0);
        let est = free_decay(&ss, State::platform(0.05), 0.01, 300.0).unwrap();
        assert!(matches!(est, DecayEstimate::Overdamped { .. }), "{est:?}");
    }

    #[test]
    fn parabolic_peak() {
        let dt = 0.1;
        let x: Vec<f64> = (0..100).map(|k| (k as f64 * dt - 3.0333).cos()).collect();
        let p = positive_peaks(&x, dt, 0.0);
        assert_relative_eq!(p[0].0, 3.0333, epsilon = 1e-3);
        assert_relative_eq!(p[0].1, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn mono_wave_signal() {
        let w = mono_wave(28.75, 0.0, 0.1, 100.0).unwrap();
        assert!(w.channel("w").unwrap().iter().all(|v| *v == 0.0));
        let w = mono_wave(10.0, 4.0, 0.1, 100.0).unwrap();
        assert_relative_eq!(w.channel("w").unwrap()[25], 2.0, epsilon = 1e-12);
        assert!(mono_wave(0.0, 1.0, 0.1, 10.0).is_err());
    }

    #[test]
    fn mono_wave_at_platform_period_excites_resonance() {
        let nu = platform_summary(&umaine(), &phi_minphase(), 0.0).nu().unwrap();
        assert_relative_eq!(2.0 * PI / 28.75, nu, max_relative = 1e-3);
    }

    #[test]
    fn steady_state_matches_frequency_response() {
        let p = umaine();
        for zeta in [0.1, 0.25] {
            let ss = decoupled(wave_sens(), zeta);
            let s = ss.sens;
            let nu = platform_summary(&p, &s, ss.gains.kbeta).nu().unwrap();
            let period = 2.0 * PI / nu;
            let ts = simulate(
                &ss,
                &[Disturbance::MonoWave { period, height: 2.0 }],
                &SimConfig::new(0.01, 1200.0),
            )
            .unwrap();
            let start = ts.index_at(1200.0 - 3.0 * period);
            let amp = amplitude(ts.channel("phi").unwrap(), start);
            let g = gplt(&p, &s, ss.gains.kbeta, PlatformInput::Wave)
                .eval(Complex::new(0.0, nu))
                .norm();
            assert_relative_eq!(amp, g, max_relative = 1e-2);
        }
    }

    #[test]
    fn jonswap_area() {
        let (hs, tp) = (1.5, 10.0);
        for gamma in [1.0, 3.3, 7.0] {
            let n = 20000;
            let dw = 6.0 / n as f64;
            let m0: f64 = (1..n).map(|k| jonswap_density(k as f64 * dw, hs, tp, gamma) * dw).sum();
            assert_relative_eq!(m0, (hs / 4.0).powi(2), max_relative = 0.05);
        }
    }

    #[test]
    fn time_series_invariants() {
        let mut ts = TimeSeries::new(0.0, 0.5).unwrap();
        ts.push_channel("a", "m", vec![1.0, 2.0]).unwrap();
        assert!(ts.push_channel("a", "m", vec![1.0, 2.0]).is_err());
        assert!(ts.push_channel("b", "m", vec![1.0]).is_err());
        assert!(TimeSeries::new(0.0, 0.0).is_err());
        assert_eq!(ts.index_at(0.5), 1);
        assert_eq!(ts.index_at(0.49), 1);
    }

    #[test]
    fn sampled_disturbance_interpolates() {
        let d = Disturbance::Samples {
            target: Target::Wind,
            t0: 1.0,
            dt: 2.0,
            values: vec![0.0, 4.0, 2.0],
        };
        assert_eq!(d.value(0.0), 0.0);
        assert_eq!(d.value(2.0), 2.0);
        assert_eq!(d.value(4.0), 3.0);
        assert_eq!(d.value(99.0), 2.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn linear_in_inputs(a1 in -1.0f64..1.0, a2 in -1.0f64..1.0, h in 0.0f64..5.0) {
            let ss = closed(wave_sens(), Some(0.1));
            let cfg = SimConfig::new(0.1, 100.0);
            let u1 = Disturbance::step_beta(3.0, a1 * 0.01);
            let u2 = Disturbance::step_wind(7.0, a2);
            let u3 = Disturbance::MonoWave { period: 20.0, height: h };
            let parts: Vec<TimeSeries> = [&u1, &u2, &u3].iter().map(|u| simulate(&ss, &[(*u).clone()], &cfg).unwrap()).collect();
            let all = simulate(&ss, &[u1, u2, u3], &cfg).unwrap();
            for name in ["theta", "omega", "phi", "phidot"] {
                let got = all.channel(name).unwrap();
                let scale = got.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
                let sum: Vec<f64> = (0..got.len()).map(|i| parts.iter().map(|p| p.channel(name).unwrap()[i]).sum()).collect();
                prop_assert!(max_abs_difference(&sum, got) <= 1e-9 * scale);
            }
        }
    }
}
