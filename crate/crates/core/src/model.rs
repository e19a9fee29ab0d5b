//! Open- and closed-loop state-space assembly.
//!
//! State ordering is `x = (θ, ω, φ, φ̇)` where `θ = ∫ω` is the integrated
//! generator-speed error, `ω` the generator-speed perturbation and `φ` the
//! platform pitch perturbation. Control inputs are `u_c = (β, τ_g)` and
//! disturbances `u_d = (v, w)` (wind speed and wave forcing signal).

use nalgebra::{Matrix2x4, Matrix4, Matrix4x2, Vector4};

use crate::gains::ControlGains;
use crate::{Error, Result};

/// Aerodynamic and wave partial derivatives at one operating point.
///
/// Units: `dta_domega` N·m·s/rad, `dta_dv` N·s, `dta_dbeta` N·m/rad,
/// `dfa_domega` N·s/rad, `dfa_dv` N·s/m, `dfa_dbeta` N/rad,
/// `dtw_dw` N·m per unit of the wave signal.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AeroSensitivities {
    pub dta_domega: f64,
    pub dta_dv: f64,
    pub dta_dbeta: f64,
    pub dfa_domega: f64,
    pub dfa_dv: f64,
    pub dfa_dbeta: f64,
    pub dtw_dw: f64,
}

impl AeroSensitivities {
    /// Builds a set from values in kN-based units (kN·s, kN·m·s/rad, kN·m/rad,
    /// kN·s/rad, kN·s/m, kN/rad, kN·m).
    pub fn from_kilonewton(
        dta_dv: f64,
        dfa_dv: f64,
        dta_domega: f64,
        dfa_domega: f64,
        dta_dbeta: f64,
        dfa_dbeta: f64,
        dtw_dw: f64,
    ) -> Self {
        const KN: f64 = 1.0e3;
        AeroSensitivities {
            dta_domega: dta_domega * KN,
            dta_dv: dta_dv * KN,
            dta_dbeta: dta_dbeta * KN,
            dfa_domega: dfa_domega * KN,
            dfa_dv: dfa_dv * KN,
            dfa_dbeta: dfa_dbeta * KN,
            dtw_dw: dtw_dw * KN,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("dTa_dOmega", self.dta_domega),
            ("dTa_dV", self.dta_dv),
            ("dTa_dBeta", self.dta_dbeta),
            ("dFa_dOmega", self.dfa_domega),
            ("dFa_dV", self.dfa_dv),
            ("dFa_dBeta", self.dfa_dbeta),
            ("dTw_dW", self.dtw_dw),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::param(name, value, "must be finite"));
            }
        }
        Ok(())
    }

    /// Sign pattern of a pitch-regulated (above-rated) operating point: pitch
    /// and speed derivatives negative, wind derivatives positive.
    pub fn is_above_rated(&self) -> bool {
        self.dta_dbeta < 0.0
            && self.dfa_dbeta < 0.0
            && self.dta_domega < 0.0
            && self.dfa_domega < 0.0
            && self.dta_dv > 0.0
            && self.dfa_dv > 0.0
    }

    /// Multiplies every coupling derivative (those linking rotor and
    /// platform) by `factor`: `dTa_dV` and `dFa_dOmega`.
    pub fn with_coupling_scaled(mut self, factor: f64) -> Self {
        self.dta_dv *= factor;
        self.dfa_domega *= factor;
        self
    }
}

/// Rigid-body parameters of the rotor and the platform pitch mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuralParams {
    /// Gearbox ratio `N_g` (1 for direct drive).
    pub gearbox_ratio: f64,
    /// Rotor-side drivetrain inertia `J_r` (kg·m²).
    pub rotor_inertia: f64,
    /// Total pitch inertia `J_t` (kg·m²).
    pub pitch_inertia: f64,
    /// Natural pitch damping `D_t` (N·m·s/rad).
    pub pitch_damping: f64,
    /// Restoring stiffness `K_t` (N·m/rad).
    pub pitch_stiffness: f64,
    /// Rotor height above the pitch centre `h_t` (m).
    pub hub_height: f64,
}

impl StructuralParams {
    /// A `h_t = 0` set is accepted here: it is the zero-coupling limit. Gain
    /// formulas that divide by `h_t` reject it separately.
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("Ng", self.gearbox_ratio, self.gearbox_ratio >= 1.0, "must be >= 1"),
            ("Jr", self.rotor_inertia, self.rotor_inertia > 0.0, "must be > 0"),
            ("Jt", self.pitch_inertia, self.pitch_inertia > 0.0, "must be > 0"),
            ("Dt", self.pitch_damping, self.pitch_damping >= 0.0, "must be >= 0"),
            ("Kt", self.pitch_stiffness, self.pitch_stiffness > 0.0, "must be > 0"),
            ("ht", self.hub_height, self.hub_height >= 0.0, "must be >= 0"),
        ];
        for (name, value, ok, reason) in checks {
            if !value.is_finite() {
                return Err(Error::param(name, value, "must be finite"));
            }
            if !ok {
                return Err(Error::param(name, value, reason));
            }
        }
        Ok(())
    }

    /// `N_g / J_r`, the factor in front of every rotor-row term.
    pub fn rotor_factor(&self) -> f64 {
        self.gearbox_ratio / self.rotor_inertia
    }
}

/// Perturbation state `(θ, ω, φ, φ̇)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub theta: f64,
    pub omega: f64,
    pub phi: f64,
    pub phidot: f64,
}

impl State {
    pub fn platform(phi: f64) -> Self {
        State {
            phi,
            ..State::default()
        }
    }

    pub fn to_vector(self) -> Vector4<f64> {
        Vector4::new(self.theta, self.omega, self.phi, self.phidot)
    }

    pub fn from_vector(x: &Vector4<f64>) -> Self {
        State {
            theta: x[0],
            omega: x[1],
            phi: x[2],
            phidot: x[3],
        }
    }
}

/// Linear model `ẋ = A0 x + Bc u_c + Bd u_d`, closed by `u_c = K0 x + u_ol`
/// into `ẋ = A x + Bc u_ol + Bd u_d`.
///
/// A freshly built open-loop model carries zero gains, so `a == a0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSpace {
    pub a0: Matrix4<f64>,
    pub bc: Matrix4x2<f64>,
    pub bd: Matrix4x2<f64>,
    pub a: Matrix4<f64>,
    pub gains: ControlGains,
    pub params: StructuralParams,
    pub sens: AeroSensitivities,
}

pub fn build_open_loop(params: &StructuralParams, sens: &AeroSensitivities) -> Result<StateSpace> {
    params.validate()?;
    sens.validate()?;

    let rf = params.rotor_factor();
    let ht = params.hub_height;
    let jt = params.pitch_inertia;

    #[rustfmt::skip]
    let a0 = Matrix4::new(
        0.0, 1.0,                          0.0,                               0.0,
        0.0, rf * sens.dta_domega,         0.0,                               -ht * rf * sens.dta_dv,
        0.0, 0.0,                          0.0,                               1.0,
        0.0, ht / jt * sens.dfa_domega,    -params.pitch_stiffness / jt,      -(params.pitch_damping + ht * ht * sens.dfa_dv) / jt,
    );
    #[rustfmt::skip]
    let bc = Matrix4x2::new(
        0.0,                        0.0,
        rf * sens.dta_dbeta,        -params.gearbox_ratio * rf,
        0.0,                        0.0,
        ht / jt * sens.dfa_dbeta,   0.0,
    );
    #[rustfmt::skip]
    let bd = Matrix4x2::new(
        0.0,                        0.0,
        rf * sens.dta_dv,           0.0,
        0.0,                        0.0,
        ht / jt * sens.dfa_dv,      sens.dtw_dw / jt,
    );

    Ok(StateSpace {
        a0,
        bc,
        bd,
        a: a0,
        gains: ControlGains::default(),
        params: *params,
        sens: *sens,
    })
}

impl StateSpace {
    /// Closes the loop with `gains`, replacing any previous closure.
    pub fn close_loop(&self, gains: &ControlGains) -> Result<StateSpace> {
        gains.validate()?;
        Ok(StateSpace {
            a: self.a0 + self.bc * gains.k0(),
            gains: *gains,
            ..*self
        })
    }

    /// Input matrix `B = [Bc | Bd]` for `u = (β_ol, τ_g,ol, v, w)`.
    pub fn b(&self) -> Matrix4<f64> {
        let mut b = Matrix4::zeros();
        b.fixed_view_mut::<4, 2>(0, 0).copy_from(&self.bc);
        b.fixed_view_mut::<4, 2>(0, 2).copy_from(&self.bd);
        b
    }

    pub fn k0(&self) -> Matrix2x4<f64> {
        self.gains.k0()
    }
}

/// Closed-loop `A` written out entry by entry, used as a cross-check of
/// `A0 + Bc K0`.
pub fn closed_loop_entries(params: &StructuralParams, sens: &AeroSensitivities, gains: &ControlGains) -> Matrix4<f64> {
    let rf = params.rotor_factor();
    let ht = params.hub_height;
    let jt = params.pitch_inertia;
    let ng = params.gearbox_ratio;
    let s = sens;
    let g = gains;
    #[rustfmt::skip]
    let a = Matrix4::new(
        0.0, 1.0, 0.0, 0.0,
        g.ki * rf * s.dta_dbeta,
        rf * (s.dta_domega + g.kp * s.dta_dbeta),
        0.0,
        rf * (-ht * s.dta_dv + g.kbeta * s.dta_dbeta - g.ktaug * ng),
        0.0, 0.0, 0.0, 1.0,
        g.ki * ht / jt * s.dfa_dbeta,
        ht / jt * (s.dfa_domega + g.kp * s.dfa_dbeta),
        -params.pitch_stiffness / jt,
        (-params.pitch_damping - ht * ht * s.dfa_dv + g.kbeta * ht * s.dfa_dbeta) / jt,
    );
    a
}
