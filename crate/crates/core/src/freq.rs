//! Frequency responses of the full transfer matrix and of the reduced rotor
//! and platform filters.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use nalgebra::Matrix4;
// Float supplies the libm-backed math methods when std is absent.
#[allow(unused_imports)]
use num_traits::Float;

use crate::model::{AeroSensitivities, StateSpace, StructuralParams};
use crate::poly::Polynomial;
use crate::stability::{chi_plt, chi_rot, modal_report, rotor_summary, ModeSummary};
use crate::{Complex, Error, Result};

/// Relative distance to a pole below which evaluation is refused.
pub const POLE_TOL: f64 = 1e-9;

/// Default number of points of a Bode grid.
pub const DEFAULT_GRID_POINTS: usize = 400;

/// State rows of the transfer matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Output {
    Theta = 0,
    Omega = 1,
    Phi = 2,
    PhiDot = 3,
}

/// Input columns of the transfer matrix: open-loop `β`, open-loop `τ_g`,
/// wind `v`, wave signal `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Input {
    Beta = 0,
    TauG = 1,
    Wind = 2,
    Wave = 3,
}

impl Output {
    pub fn name(self) -> &'static str {
        ["theta", "omega", "phi", "phidot"][self as usize]
    }
}

impl Input {
    pub fn name(self) -> &'static str {
        ["beta", "tau_g", "v", "w"][self as usize]
    }
}

/// `G(s) = (sI − A)⁻¹ [Bc | Bd]` with the closed-loop poles cached for the
/// near-pole check.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    a: Matrix4<f64>,
    b: Matrix4<f64>,
    poles: Vec<Complex>,
}

impl TransferMatrix {
    pub fn new(ss: &StateSpace) -> Result<Self> {
        Ok(TransferMatrix {
            a: ss.a,
            b: ss.b(),
            poles: modal_report(&ss.a)?.eigenvalues,
        })
    }

    pub fn poles(&self) -> &[Complex] {
        &self.poles
    }

    pub fn eval(&self, s: Complex) -> Result<Matrix4<Complex>> {
        for p in &self.poles {
            let distance = (s - p).norm();
            if distance <= POLE_TOL * p.norm().max(1.0) {
                return Err(Error::NearPole { distance });
            }
        }
        let m = Matrix4::from_fn(|i, j| {
            let d = if i == j { s } else { Complex::new(0.0, 0.0) };
            d - Complex::new(self.a[(i, j)], 0.0)
        });
        let b = self.b.map(|v| Complex::new(v, 0.0));
        m.lu().solve(&b).ok_or(Error::NearPole { distance: 0.0 })
    }

    pub fn entry(&self, output: Output, input: Input, s: Complex) -> Result<Complex> {
        Ok(self.eval(s)?[(output as usize, input as usize)])
    }

    /// Response of one entry on `s = jν` for every `ν` of `grid`.
    pub fn bode(&self, output: Output, input: Input, grid: &[f64]) -> Result<FrequencyResponse> {
        check_grid(grid)?;
        let response = grid
            .iter()
            .map(|&nu| self.entry(output, input, Complex::new(0.0, nu)))
            .collect::<Result<Vec<_>>>()?;
        Ok(FrequencyResponse {
            label: alloc::format!("{}<-{}", output.name(), input.name()),
            nu: grid.to_vec(),
            response,
        })
    }
}

/// Convenience wrapper around [`TransferMatrix::eval`].
pub fn eval_g(ss: &StateSpace, s: Complex) -> Result<Matrix4<Complex>> {
    TransferMatrix::new(ss)?.eval(s)
}

/// Complex response sampled on an angular-frequency grid. Magnitudes are
/// linear and phases in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    /// `output<-input` style channel pair.
    pub label: String,
    pub nu: Vec<f64>,
    pub response: Vec<Complex>,
}

impl FrequencyResponse {
    pub fn magnitude(&self) -> Vec<f64> {
        self.response.iter().map(|z| z.norm()).collect()
    }

    pub fn magnitude_db(&self) -> Vec<f64> {
        self.response.iter().map(|z| 20.0 * z.norm().log10()).collect()
    }

    /// Phase unwrapped along the grid, starting in `(−π, π]`.
    pub fn phase(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.response.len());
        let mut offset = 0.0;
        let mut prev: Option<f64> = None;
        for z in &self.response {
            let raw = z.arg();
            if let Some(p) = prev {
                let mut d = raw + offset - p;
                while d > PI {
                    offset -= 2.0 * PI;
                    d -= 2.0 * PI;
                }
                while d < -PI {
                    offset += 2.0 * PI;
                    d += 2.0 * PI;
                }
            }
            let v = raw + offset;
            out.push(v);
            prev = Some(v);
        }
        out
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty frequency grid"));
    }
    if grid.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidInput("frequency grid must be finite and non-negative"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("frequency grid must be strictly increasing"));
    }
    Ok(())
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || n < 2 {
        return Err(Error::InvalidInput("log grid needs 0 < lo < hi and n >= 2"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect();
    g[0] = lo;
    g[n - 1] = hi;
    Ok(g)
}

/// [`DEFAULT_GRID_POINTS`] log-spaced points over `[ν_plt/100, 100 ν_plt]`.
pub fn default_grid(params: &StructuralParams) -> Result<Vec<f64>> {
    let nu = platform_frequency(params)?;
    log_grid(nu / 100.0, nu * 100.0, DEFAULT_GRID_POINTS)
}

fn platform_frequency(params: &StructuralParams) -> Result<f64> {
    if !(params.pitch_stiffness > 0.0 && params.pitch_inertia > 0.0) {
        return Err(Error::param("Kt/Jt", params.pitch_stiffness, "must be > 0"));
    }
    Ok((params.pitch_stiffness / params.pitch_inertia).sqrt())
}

/// Band `[ν_plt/√2, √2 ν_plt]` around the platform pitch frequency in which
/// the imposed damping acts.
pub fn damped_band(params: &StructuralParams) -> Result<(f64, f64)> {
    let nu = platform_frequency(params)?;
    Ok((nu / SQRT_2, nu * SQRT_2))
}

/// Rational transfer function `num(s) / den(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rational {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl Rational {
    pub fn eval(&self, s: Complex) -> Complex {
        self.num.eval_complex(s) / self.den.eval_complex(s)
    }

    pub fn bode(&self, label: &str, grid: &[f64]) -> Result<FrequencyResponse> {
        check_grid(grid)?;
        Ok(FrequencyResponse {
            label: String::from(label),
            nu: grid.to_vec(),
            response: grid.iter().map(|&nu| self.eval(Complex::new(0.0, nu))).collect(),
        })
    }
}

/// Disturbance driving the reduced platform model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlatformInput {
    /// `v → φ`, gain `h_t ∂Fa/∂v / J_t`.
    Wind,
    /// `w → φ`, gain `∂τw/∂w / J_t`.
    Wave,
}

/// Reduced platform filter `G_plt = g / χ_plt(s)`, a second-order low-pass
/// with cutoff `ν_plt` and damping `ζ_plt(k_β)`.
pub fn gplt(params: &StructuralParams, sens: &AeroSensitivities, kbeta: f64, input: PlatformInput) -> Rational {
    let gain = match input {
        PlatformInput::Wind => params.hub_height * sens.dfa_dv,
        PlatformInput::Wave => sens.dtw_dw,
    } / params.pitch_inertia;
    Rational {
        num: Polynomial::constant(gain),
        den: chi_plt(params, sens, kbeta),
    }
}

pub fn bode_gplt(
    params: &StructuralParams,
    sens: &AeroSensitivities,
    kbeta: f64,
    input: PlatformInput,
    grid: &[f64],
) -> Result<FrequencyResponse> {
    let label = match input {
        PlatformInput::Wind => "phi<-v (reduced)",
        PlatformInput::Wave => "phi<-w (reduced)",
    };
    gplt(params, sens, kbeta, input).bode(label, grid)
}

/// Reduced rotor filter `G_rot = (N_g/J_r) ∂τa/∂v s / χ_rot(s)` from wind to
/// generator speed.
pub fn grot(params: &StructuralParams, sens: &AeroSensitivities, kp: f64, ki: f64) -> Rational {
    Rational {
        num: Polynomial::from_slice(&[0.0, params.rotor_factor() * sens.dta_dv]),
        den: chi_rot(params, sens, kp, ki),
    }
}

/// Rotor Bode data. `band_pass` is false when `k_I` does not give a real
/// cutoff; the raw rational response is still returned.
#[derive(Debug, Clone, PartialEq)]
pub struct RotorBode {
    pub response: FrequencyResponse,
    pub band_pass: bool,
    pub summary: ModeSummary,
}

pub fn bode_grot(
    params: &StructuralParams,
    sens: &AeroSensitivities,
    kp: f64,
    ki: f64,
    grid: &[f64],
) -> Result<RotorBode> {
    let summary = rotor_summary(params, sens, kp, ki);
    Ok(RotorBode {
        response: grot(params, sens, kp, ki).bode("omega<-v (reduced)", grid)?,
        band_pass: matches!(summary, ModeSummary::Oscillator { .. }),
        summary,
    })
}
