//! Gain synthesis for the pitch controller.
//!
//! The controller is a set of SISO loops around the operating point:
//! `β = k_P ω + k_I θ + k_β φ̇` and `τ_g = k_τg φ̇`.

use nalgebra::Matrix2x4;
// Float supplies the libm-backed math methods when std is absent.
#[allow(unused_imports)]
use num_traits::Float;

use crate::model::{AeroSensitivities, StructuralParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlGains {
    /// Proportional gain on generator speed (s).
    pub kp: f64,
    /// Integral gain on integrated speed error (-).
    pub ki: f64,
    /// Blade-pitch compensation of platform pitch rate (s).
    pub kbeta: f64,
    /// Generator-torque compensation of platform pitch rate (N·m·s/rad).
    pub ktaug: f64,
}

impl ControlGains {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kP", self.kp),
            ("kI", self.ki),
            ("kBeta", self.kbeta),
            ("kTauG", self.ktaug),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, v, "must be finite"));
            }
        }
        Ok(())
    }

    /// Gain matrix mapping `(θ, ω, φ, φ̇)` onto `(β, τ_g)`.
    pub fn k0(&self) -> Matrix2x4<f64> {
        #[rustfmt::skip]
        let k = Matrix2x4::new(
            self.ki, self.kp, 0.0, self.kbeta,
            0.0,     0.0,     0.0, self.ktaug,
        );
        k
    }
}

impl core::ops::Add for ControlGains {
    type Output = ControlGains;

    fn add(self, rhs: ControlGains) -> ControlGains {
        ControlGains {
            kp: self.kp + rhs.kp,
            ki: self.ki + rhs.ki,
            kbeta: self.kbeta + rhs.kbeta,
            ktaug: self.ktaug + rhs.ktaug,
        }
    }
}

/// Imposed rotor-loop dynamics: damping ratio and cutoff angular frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorTarget {
    pub zeta: f64,
    pub nu: f64,
}

impl RotorTarget {
    pub fn new(zeta: f64, nu: f64) -> Result<Self> {
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(Error::param("zeta_rot", zeta, "must be > 0"));
        }
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::param("nu_rot", nu, "must be > 0"));
        }
        Ok(RotorTarget { zeta, nu })
    }
}

/// Imposed platform-pitch damping ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlatformTarget {
    pub zeta: f64,
}

impl PlatformTarget {
    pub fn new(zeta: f64) -> Result<Self> {
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(Error::param("zeta_plt", zeta, "must be > 0"));
        }
        Ok(PlatformTarget { zeta })
    }
}

/// PI gains `(k_P, k_I)` that give the reduced rotor loop the target cutoff
/// and damping.
///
/// The magnitudes are the usual `|k_I| = |ν²/(N_g/J_r ∂τa/∂β)|`,
/// `|k_P| = |(N_g/J_r ∂τa/∂ω + 2ζν)/(N_g/J_r ∂τa/∂β)|`; the signs are those
/// of the exact inverse of [`crate::stability::rotor_summary`], so the
/// round trip returns a positive `(ν, ζ)`.
pub fn tune_pi(params: &StructuralParams, sens: &AeroSensitivities, target: &RotorTarget) -> Result<(f64, f64)> {
    if sens.dta_dbeta == 0.0 {
        return Err(Error::GainSingularity { divisor: "dTa_dBeta" });
    }
    let rf = params.rotor_factor();
    let b = rf * sens.dta_dbeta;
    let ki = -target.nu * target.nu / b;
    let kp = -(rf * sens.dta_domega + 2.0 * target.zeta * target.nu) / b;
    Ok((kp, ki))
}

/// `k_β` imposing the platform damping ratio `target.zeta` on the reduced
/// platform model:
/// `k_β = (D_t + h_t² ∂Fa/∂v − 2 √(K_t J_t) ζ) / (h_t ∂Fa/∂β)`.
pub fn kbeta_zeta_fixed(params: &StructuralParams, sens: &AeroSensitivities, target: &PlatformTarget) -> Result<f64> {
    if sens.dfa_dbeta == 0.0 {
        return Err(Error::GainSingularity { divisor: "dFa_dBeta" });
    }
    if params.hub_height == 0.0 {
        return Err(Error::GainSingularity { divisor: "ht" });
    }
    let ht = params.hub_height;
    let critical = 2.0 * (params.pitch_stiffness * params.pitch_inertia).sqrt();
    Ok((params.pitch_damping + ht * ht * sens.dfa_dv - critical * target.zeta) / (ht * sens.dfa_dbeta))
}

/// `k_β = h_t ∂τa/∂v / ∂τa/∂β`, which cancels the first-order feed of
/// platform pitch rate into the rotor equation.
pub fn kbeta_reference(params: &StructuralParams, sens: &AeroSensitivities) -> Result<f64> {
    if sens.dta_dbeta == 0.0 {
        return Err(Error::GainSingularity { divisor: "dTa_dBeta" });
    }
    Ok(params.hub_height * sens.dta_dv / sens.dta_dbeta)
}

/// Generator-torque compensation `k_τg = −m (h_t/N_g) ∂τa/∂v`, `m ∈ [0, 1]`.
pub fn ktaug(params: &StructuralParams, sens: &AeroSensitivities, m_taug: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m_taug) {
        return Err(Error::param("m_taug", m_taug, "must lie in [0, 1]"));
    }
    // Subtracting from 0.0 keeps m = 0 at +0.0.
    Ok(0.0 - m_taug * params.hub_height / params.gearbox_ratio * sens.dta_dv)
}

/// How `k_β` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    /// Impose a platform damping ratio.
    ZetaFixed(PlatformTarget),
    /// First-order decoupling value `h_t ∂τa/∂v / ∂τa/∂β`.
    Decoupling,
    /// No platform compensation, `k_β = 0`.
    None,
}

impl Strategy {
    pub fn kbeta(&self, params: &StructuralParams, sens: &AeroSensitivities) -> Result<f64> {
        match self {
            Strategy::ZetaFixed(t) => kbeta_zeta_fixed(params, sens, t),
            Strategy::Decoupling => kbeta_reference(params, sens),
            Strategy::None => Ok(0.0),
        }
    }
}

/// Full gain set for one operating point.
pub fn synthesize(
    params: &StructuralParams,
    sens: &AeroSensitivities,
    rotor: &RotorTarget,
    strategy: &Strategy,
    m_taug: f64,
) -> Result<ControlGains> {
    let (kp, ki) = tune_pi(params, sens, rotor)?;
    Ok(ControlGains {
        kp,
        ki,
        kbeta: strategy.kbeta(params, sens)?,
        ktaug: ktaug(params, sens, m_taug)?,
    })
}

/// First-order low-pass applied to gains recomputed along a changing
/// operating point. The first sample initialises the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainFilter {
    time_constant: f64,
    state: Option<ControlGains>,
}

impl GainFilter {
    pub fn new(time_constant: f64) -> Result<Self> {
        if !(time_constant >= 0.0 && time_constant.is_finite()) {
            return Err(Error::param("gain_filter_tau", time_constant, "must be >= 0"));
        }
        Ok(GainFilter {
            time_constant,
            state: None,
        })
    }

    pub fn current(&self) -> Option<ControlGains> {
        self.state
    }

    /// Advances the filter by `dt` towards `target`; exact discretisation of
    /// `τ ġ = target − g` for a held target.
    pub fn update(&mut self, dt: f64, target: ControlGains) -> ControlGains {
        let next = match self.state {
            None => target,
            Some(prev) => {
                let alpha = if self.time_constant == 0.0 {
                    1.0
                } else {
                    1.0 - (-dt / self.time_constant).exp()
                };
                let blend = |a: f64, b: f64| a + alpha * (b - a);
                ControlGains {
                    kp: blend(prev.kp, target.kp),
                    ki: blend(prev.ki, target.ki),
                    kbeta: blend(prev.kbeta, target.kbeta),
                    ktaug: blend(prev.ktaug, target.ktaug),
                }
            }
        };
        self.state = Some(next);
        next
    }
}
