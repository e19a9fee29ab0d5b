//! Non-minimum-phase-zero conditions, numerator and characteristic
//! polynomials, and modal damping of the closed loop.

use alloc::vec::Vec;

use nalgebra::SMatrix;
// Float supplies the libm-backed math methods when std is absent.
#[allow(unused_imports)]
use num_traits::Float;

use crate::gains::ControlGains;
use crate::model::{AeroSensitivities, StructuralParams};
use crate::poly::Polynomial;
use crate::{Complex, Error, Result};

/// Relative distance to a strict-inequality boundary reported as
/// `near_boundary`.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Outcome of a strict inequality `lhs < rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub holds: bool,
    /// Signed slack; positive exactly when `holds`.
    pub margin: f64,
    /// `|margin|` is within [`BOUNDARY_TOL`] of the size of the terms.
    pub near_boundary: bool,
}

impl Condition {
    fn strict(margin: f64, scale: f64) -> Self {
        Condition {
            holds: margin > 0.0,
            margin,
            near_boundary: margin.abs() <= BOUNDARY_TOL * scale,
        }
    }
}

/// NMPZ on the `β → φ` channel: `∂τa/∂ω / ∂τa/∂β < ∂Fa/∂ω / ∂Fa/∂β`.
pub fn nmpz_phi_condition(sens: &AeroSensitivities) -> Result<Condition> {
    if sens.dta_dbeta == 0.0 {
        return Err(Error::GainSingularity { divisor: "dTa_dBeta" });
    }
    if sens.dfa_dbeta == 0.0 {
        return Err(Error::GainSingularity { divisor: "dFa_dBeta" });
    }
    let lhs = sens.dta_domega / sens.dta_dbeta;
    let rhs = sens.dfa_domega / sens.dfa_dbeta;
    Ok(Condition::strict(rhs - lhs, lhs.abs().max(rhs.abs())))
}

/// `(lhs, rhs)` of the `β → φ` inequality.
pub fn phi_ratios(sens: &AeroSensitivities) -> (f64, f64) {
    (sens.dta_domega / sens.dta_dbeta, sens.dfa_domega / sens.dfa_dbeta)
}

/// NMPZ on the `β → ω` channel.
///
/// Decided from the quadratic factor `a s² + b s + c` of [`numerator_omega`]:
/// `c/a = K_t/J_t > 0`, so a right-half-plane root exists iff the root sum
/// `−b/a` is positive. For `∂τa/∂β < 0` this is the same statement as
/// [`nmpz_omega_condition_printed`].
pub fn nmpz_omega_condition(params: &StructuralParams, sens: &AeroSensitivities, ktaug: f64) -> Result<Condition> {
    if sens.dta_dbeta == 0.0 {
        return Err(Error::GainSingularity { divisor: "dTa_dBeta" });
    }
    let (a, b, scale) = omega_quadratic(params, sens, ktaug);
    Ok(Condition::strict(-b / a, scale / a.abs()))
}

/// The same condition in its rearranged form
/// `h_t² (∂Fa/∂v − (∂τa/∂v + k_τg N_g/h_t) ∂Fa/∂β / ∂τa/∂β) < −D_t`.
pub fn nmpz_omega_condition_printed(
    params: &StructuralParams,
    sens: &AeroSensitivities,
    ktaug: f64,
) -> Result<Condition> {
    if sens.dta_dbeta == 0.0 {
        return Err(Error::GainSingularity { divisor: "dTa_dBeta" });
    }
    if params.hub_height == 0.0 {
        return Err(Error::GainSingularity { divisor: "ht" });
    }
    let ht = params.hub_height;
    let ratio = sens.dfa_dbeta / sens.dta_dbeta;
    let torque = sens.dta_dv + ktaug * params.gearbox_ratio / ht;
    let lhs = ht * ht * (sens.dfa_dv - torque * ratio);
    let rhs = -params.pitch_damping;
    let scale = ht * ht * (sens.dfa_dv.abs() + (torque * ratio).abs()) + rhs.abs();
    Ok(Condition::strict(rhs - lhs, scale))
}

/// `(s², s¹ coefficient, magnitude of the s¹ terms)` of `N₂,₁ / s`.
fn omega_quadratic(params: &StructuralParams, sens: &AeroSensitivities, ktaug: f64) -> (f64, f64, f64) {
    let ht = params.hub_height;
    let terms = [
        params.pitch_damping * sens.dta_dbeta / ht,
        ht * sens.dta_dbeta * sens.dfa_dv,
        -ht * sens.dfa_dbeta * sens.dta_dv,
        -ktaug * params.gearbox_ratio * sens.dfa_dbeta,
    ];
    let b: f64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    (params.pitch_inertia / ht * sens.dta_dbeta, b, scale)
}

/// Numerator of the `β → φ` transfer, normalised as
/// `(J_r/N_g) ∂Fa/∂β s² + (∂τa/∂β ∂Fa/∂ω − ∂Fa/∂β ∂τa/∂ω) s`.
///
/// The full transfer is `G_φβ = (N_g h_t / (J_r J_t)) N₃,₁ / χ_A`, for any
/// gains.
pub fn numerator_phi(params: &StructuralParams, sens: &AeroSensitivities) -> Polynomial {
    let s = sens;
    Polynomial::from_slice(&[
        0.0,
        s.dta_dbeta * s.dfa_domega - s.dfa_dbeta * s.dta_domega,
        params.rotor_inertia / params.gearbox_ratio * s.dfa_dbeta,
    ])
}

/// Numerator of the `β → ω` transfer, normalised as
/// `(J_t/h_t) ∂τa/∂β s³ + [...] s² + (K_t/h_t) ∂τa/∂β s`.
///
/// The full transfer is `G_ωβ = (N_g h_t / (J_r J_t)) N₂,₁ / χ_A`. Only
/// `k_τg` among the gains enters, through the `s²` coefficient.
///
/// A zero `h_t` has no rotor/platform coupling and no well-defined
/// normalisation; it yields non-finite coefficients.
pub fn numerator_omega(params: &StructuralParams, sens: &AeroSensitivities, ktaug: f64) -> Polynomial {
    let (a, b, _) = omega_quadratic(params, sens, ktaug);
    Polynomial::from_slice(&[0.0, params.pitch_stiffness / params.hub_height * sens.dta_dbeta, b, a])
}

/// Common factor `N_g h_t / (J_r J_t)` between the normalised numerators and
/// the transfer-matrix entries.
pub fn numerator_gain(params: &StructuralParams) -> f64 {
    params.rotor_factor() * params.hub_height / params.pitch_inertia
}

/// Characteristic polynomial `det(sI − A)` by the Faddeev–LeVerrier
/// recursion. Monic, ascending coefficients.
pub fn char_poly<const N: usize>(a: &SMatrix<f64, N, N>) -> Polynomial {
    let mut coeffs = alloc::vec![0.0; N + 1];
    coeffs[N] = 1.0;
    let mut m = SMatrix::<f64, N, N>::zeros();
    for k in 1..=N {
        m = a * m;
        for i in 0..N {
            m[(i, i)] += coeffs[N + 1 - k];
        }
        coeffs[N - k] = -(a * m).trace() / k as f64;
    }
    Polynomial::new(coeffs)
}

/// Rotor factor `χ_rot = s² − (N_g/J_r)(∂τa/∂ω + k_P ∂τa/∂β) s − (N_g/J_r) ∂τa/∂β k_I`.
pub fn chi_rot(params: &StructuralParams, sens: &AeroSensitivities, kp: f64, ki: f64) -> Polynomial {
    let rf = params.rotor_factor();
    Polynomial::from_slice(&[
        -rf * sens.dta_dbeta * ki,
        -rf * (sens.dta_domega + kp * sens.dta_dbeta),
        1.0,
    ])
}

/// Platform factor `χ_plt = s² + (D_t + h_t² ∂Fa/∂v − k_β h_t ∂Fa/∂β)/J_t s + K_t/J_t`.
pub fn chi_plt(params: &StructuralParams, sens: &AeroSensitivities, kbeta: f64) -> Polynomial {
    let ht = params.hub_height;
    let jt = params.pitch_inertia;
    Polynomial::from_slice(&[
        params.pitch_stiffness / jt,
        (params.pitch_damping + ht * ht * sens.dfa_dv - kbeta * ht * sens.dfa_dbeta) / jt,
        1.0,
    ])
}

/// Closed-loop characteristic polynomial in factored form:
///
/// `χ_A = χ_rot χ_plt + (N_g h_t/(J_r J_t)) s (∂Fa/∂β (k_P s + k_I) + ∂Fa/∂ω s)
///        (h_t ∂τa/∂v − k_β ∂τa/∂β + k_τg N_g)`.
///
/// The coupling term vanishes with either the thrust response to the rotor
/// states or the effective pitch-rate feed into the rotor equation.
pub fn coupled_char_poly(params: &StructuralParams, sens: &AeroSensitivities, gains: &ControlGains) -> Polynomial {
    let g = gains;
    let thrust = Polynomial::from_slice(&[0.0, sens.dfa_dbeta * g.ki, sens.dfa_dbeta * g.kp + sens.dfa_domega]);
    let feed = params.hub_height * sens.dta_dv - g.kbeta * sens.dta_dbeta + g.ktaug * params.gearbox_ratio;
    let coupling = thrust.scale(numerator_gain(params) * feed);
    &(&chi_rot(params, sens, g.kp, g.ki) * &chi_plt(params, sens, g.kbeta)) + &coupling
}

/// Natural frequency and damping of a second-order factor, or the reason it
/// is not an oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeSummary {
    Oscillator {
        nu: f64,
        zeta: f64,
    },
    /// `ν²` would be `radicand ≤ 0`: no band-pass / low-pass interpretation.
    Degenerate {
        radicand: f64,
    },
}

impl ModeSummary {
    pub fn nu(&self) -> Option<f64> {
        match self {
            ModeSummary::Oscillator { nu, .. } => Some(*nu),
            ModeSummary::Degenerate { .. } => None,
        }
    }

    pub fn zeta(&self) -> Option<f64> {
        match self {
            ModeSummary::Oscillator { zeta, .. } => Some(*zeta),
            ModeSummary::Degenerate { .. } => None,
        }
    }
}

/// `ν_rot = √(−(N_g/J_r) ∂τa/∂β k_I)`,
/// `ζ_rot = −(N_g/J_r)(∂τa/∂ω + k_P ∂τa/∂β) / (2 ν_rot)`.
pub fn rotor_summary(params: &StructuralParams, sens: &AeroSensitivities, kp: f64, ki: f64) -> ModeSummary {
    let rf = params.rotor_factor();
    let radicand = -rf * sens.dta_dbeta * ki;
    if !(radicand > 0.0) {
        return ModeSummary::Degenerate { radicand };
    }
    let nu = radicand.sqrt();
    ModeSummary::Oscillator {
        nu,
        zeta: -rf * (sens.dta_domega + kp * sens.dta_dbeta) / (2.0 * nu),
    }
}

/// `ν_plt = √(K_t/J_t)`,
/// `ζ_plt = (D_t + h_t² ∂Fa/∂v − k_β h_t ∂Fa/∂β) / (2 √(K_t J_t))`.
pub fn platform_summary(params: &StructuralParams, sens: &AeroSensitivities, kbeta: f64) -> ModeSummary {
    let radicand = params.pitch_stiffness / params.pitch_inertia;
    if !(radicand > 0.0) {
        return ModeSummary::Degenerate { radicand };
    }
    let ht = params.hub_height;
    ModeSummary::Oscillator {
        nu: radicand.sqrt(),
        zeta: (params.pitch_damping + ht * ht * sens.dfa_dv - kbeta * ht * sens.dfa_dbeta)
            / (2.0 * (params.pitch_stiffness * params.pitch_inertia).sqrt()),
    }
}

/// Damping ratio at which no platform compensation is needed (`k_β = 0`).
pub fn natural_platform_damping(params: &StructuralParams, sens: &AeroSensitivities) -> f64 {
    platform_summary(params, sens, 0.0).zeta().unwrap_or(f64::NAN)
}

/// One eigenvalue with its modal parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub eigenvalue: Complex,
    /// `|λ|`.
    pub nu: f64,
    /// `−Re λ / |λ|`; `None` for `λ = 0`.
    pub zeta: Option<f64>,
}

impl Mode {
    fn new(eigenvalue: Complex) -> Self {
        let nu = eigenvalue.norm();
        Mode {
            eigenvalue,
            nu,
            zeta: (nu > 0.0).then(|| -eigenvalue.re / nu),
        }
    }

    pub fn is_oscillatory(&self) -> bool {
        self.eigenvalue.im != 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalReport {
    /// All roots of `χ_A`, sorted by real then imaginary part.
    pub eigenvalues: Vec<Complex>,
    /// One entry per real root and per conjugate pair (upper half plane).
    pub modes: Vec<Mode>,
    /// Every eigenvalue has a strictly negative real part.
    pub stable: bool,
}

impl ModalReport {
    pub fn max_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Mode whose natural frequency is closest to `nu`, preferring
    /// oscillatory ones.
    pub fn closest_mode(&self, nu: f64) -> Option<Mode> {
        let pick = |oscillatory: bool| {
            self.modes
                .iter()
                .filter(|m| m.is_oscillatory() == oscillatory)
                .min_by(|a, b| (a.nu - nu).abs().total_cmp(&(b.nu - nu).abs()))
                .copied()
        };
        pick(true).or_else(|| pick(false))
    }
}

/// Eigen-summary of a state matrix through the roots of its characteristic
/// polynomial.
pub fn modal_report<const N: usize>(a: &SMatrix<f64, N, N>) -> Result<ModalReport> {
    let eigenvalues = char_poly(a).roots()?;
    let modes = eigenvalues
        .iter()
        .filter(|z| z.im >= 0.0)
        .map(|&z| Mode::new(z))
        .collect();
    let stable = eigenvalues.iter().all(|z| z.re < 0.0);
    Ok(ModalReport {
        eigenvalues,
        modes,
        stable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::gains::{kbeta_zeta_fixed, ktaug, tune_pi, PlatformTarget, RotorTarget};
    use crate::model::build_open_loop;
    use approx::assert_relative_eq;
    use nalgebra::{Matrix3, Matrix4};
    use proptest::prelude::*;

    fn det3(m: &Matrix3<Complex>) -> Complex {
        m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
            - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
            + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
    }

    /// `det(sI − A)` by cofactor expansion along the first row.
    fn det_si_minus_a(a: &Matrix4<f64>, s: Complex) -> Complex {
        let m = Matrix4::from_fn(|i, j| {
            let d = if i == j { s } else { Complex::new(0.0, 0.0) };
            d - a[(i, j)]
        });
        (0..4)
            .map(|j| {
                let minor = Matrix3::from_fn(|r, c| m[(r + 1, if c < j { c } else { c + 1 })]);
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                m[(0, j)] * det3(&minor) * sign
            })
            .sum()
    }

    fn tuned(params: &StructuralParams, sens: &AeroSensitivities, zeta_plt: f64) -> ControlGains {
        let (kp, ki) = tune_pi(params, sens, &RotorTarget::new(0.6, 0.01).unwrap()).unwrap();
        ControlGains {
            kp,
            ki,
            kbeta: kbeta_zeta_fixed(params, sens, &PlatformTarget::new(zeta_plt).unwrap()).unwrap(),
            ktaug: 0.0,
        }
    }

    #[test]
    fn phi_condition_classifies_operating_points() {
        let f = nmpz_phi_condition(&phi_minphase()).unwrap();
        let t = nmpz_phi_condition(&phi_nmpz()).unwrap();
        assert!(!f.holds && !f.near_boundary);
        assert!(t.holds && !t.near_boundary);

        let (l, r) = phi_ratios(&phi_minphase());
        assert_relative_eq!(l, 0.38462714919414653, max_relative = 1e-12);
        assert_relative_eq!(r, 0.35247505014888925, max_relative = 1e-12);
        let (l, r) = phi_ratios(&phi_nmpz());
        assert_relative_eq!(l, 0.34656754537421824, max_relative = 1e-12);
        assert_relative_eq!(r, 0.38141546526867626, max_relative = 1e-12);
    }

    #[test]
    fn phi_condition_boundary_is_false() {
        let mut s = phi_minphase();
        s.dfa_domega = s.dta_domega / s.dta_dbeta * s.dfa_dbeta;
        let c = nmpz_phi_condition(&s).unwrap();
        assert!(!c.holds);
        assert!(c.near_boundary);
    }

    #[test]
    fn phi_condition_singular() {
        let mut s = phi_minphase();
        s.dfa_dbeta = 0.0;
        assert!(matches!(nmpz_phi_condition(&s), Err(Error::GainSingularity { .. })));
    }

    #[test]
    fn omega_condition_classifies_operating_points() {
        let p = umaine();
        assert!(!nmpz_omega_condition(&p, &omega_minphase(), 0.0).unwrap().holds);
        assert!(nmpz_omega_condition(&p, &omega_nmpz(), 0.0).unwrap().holds);
        assert!(!nmpz_omega_condition_printed(&p, &omega_minphase(), 0.0).unwrap().holds);
        assert!(nmpz_omega_condition_printed(&p, &omega_nmpz(), 0.0).unwrap().holds);
    }

    #[test]
    fn both_nmpz_satisfies_both() {
        assert!(nmpz_phi_condition(&both_nmpz()).unwrap().holds);
        assert!(nmpz_omega_condition(&umaine(), &both_nmpz(), 0.0).unwrap().holds);
    }

    #[test]
    fn large_damping_removes_omega_nmpz() {
        let mut p = umaine();
        p.pitch_damping = 1e15;
        assert!(!nmpz_omega_condition(&p, &omega_nmpz(), 0.0).unwrap().holds);
        assert!(!nmpz_omega_condition_printed(&p, &omega_nmpz(), 0.0).unwrap().holds);
    }

    #[test]
    fn torque_compensation_reclassifies_when_arithmetic_says_so() {
        let p = umaine();
        let s = omega_nmpz();
        let k = ktaug(&p, &s, 1.0).unwrap();
        // Substitute k_τg into the printed inequality by hand.
        let ht = p.hub_height;
        let lhs = ht * ht * (s.dfa_dv - (s.dta_dv + k * p.gearbox_ratio / ht) * s.dfa_dbeta / s.dta_dbeta);
        let expected = lhs < -p.pitch_damping;
        assert_eq!(nmpz_omega_condition(&p, &s, k).unwrap().holds, expected);
        // With m = 1 the torque term cancels the wind-torque coupling exactly.
        assert!(!expected);
    }

    #[test]
    fn phi_numerator_roots() {
        let p = umaine();
        let r = numerator_phi(&p, &phi_minphase()).roots().unwrap();
        assert_eq!(r.len(), 2);
        assert_relative_eq!(r[0].re, -0.015373097886687743, max_relative = 1e-10);
        assert_eq!(r[1], Complex::new(0.0, 0.0));

        let r = numerator_phi(&p, &phi_nmpz()).roots().unwrap();
        assert_relative_eq!(r[1].re, 0.01751434556560869, max_relative = 1e-10);
    }

    #[test]
    fn phi_numerator_degenerate() {
        let mut s = phi_minphase();
        s.dfa_domega = s.dfa_dbeta * s.dta_domega / s.dta_dbeta;
        let n = numerator_phi(&umaine(), &s);
        assert!(n.coeff(1).abs() <= 1e-12 * (s.dta_dbeta * s.dfa_domega).abs());
    }

    #[test]
    fn omega_numerator_pure_origin() {
        let mut p = umaine();
        p.pitch_stiffness = 0.0;
        let mut s = phi_minphase();
        // Zero the s² coefficient: D_t = 0, ∂Fa/∂v ∂τa/∂β = ∂Fa/∂β ∂τa/∂v.
        s.dfa_dv = s.dfa_dbeta * s.dta_dv / s.dta_dbeta;
        let n = numerator_omega(&p, &s, 0.0);
        let n = Polynomial::from_slice(&[0.0, 0.0, 0.0, n.coeff(3)]);
        assert!(n.roots().unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn omega_numerator_matches_condition() {
        let p = umaine();
        for (s, expected) in [(omega_minphase(), false), (omega_nmpz(), true)] {
            let n = numerator_omega(&p, &s, 0.0);
            assert_eq!(n.has_rhp_root().unwrap(), expected);
        }
    }

    #[test]
    fn faddeev_leverrier_matches_cofactor_determinant() {
        let p = umaine();
        let s = phi_minphase();
        let g = tuned(&p, &s, 0.1);
        let a = build_open_loop(&p, &s).unwrap().close_loop(&g).unwrap().a;
        let chi = char_poly(&a);
        for z in [
            Complex::new(0.0, 0.0),
            Complex::new(0.3, 0.0),
            Complex::new(-0.1, 0.2),
            Complex::new(1.5, -2.0),
            Complex::new(0.0, 0.22),
        ] {
            let d = det_si_minus_a(&a, z);
            let e = chi.eval_complex(z);
            assert!((d - e).norm() <= 1e-12 * d.norm().max(1e-6), "{d} vs {e}");
        }
    }

    #[test]
    fn closed_loop_char_poly_frozen() {
        let p = umaine();
        let s = phi_minphase();
        let g = tuned(&p, &s, 0.1);
        let a = build_open_loop(&p, &s).unwrap().close_loop(&g).unwrap().a;
        let expected = [
            4.775510204081632e-06,
            0.0005733728267031769,
            0.04851648618835842,
            0.05570588154508103,
            1.0,
        ];
        for (c, e) in char_poly(&a).coeffs().iter().zip(expected) {
            assert_relative_eq!(*c, e, max_relative = 1e-9);
        }
    }

    #[test]
    fn factored_form_matches_determinant() {
        let p = umaine();
        for s in [phi_minphase(), phi_nmpz(), omega_nmpz(), both_nmpz()] {
            let mut g = tuned(&p, &s, 0.25);
            g.ktaug = ktaug(&p, &s, 0.5).unwrap();
            let a = build_open_loop(&p, &s).unwrap().close_loop(&g).unwrap().a;
            let direct = char_poly(&a);
            let factored = coupled_char_poly(&p, &s, &g);
            for k in 0..=4 {
                assert_relative_eq!(direct.coeff(k), factored.coeff(k), max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn zero_coupling_factorises() {
        let p = umaine();
        let s = phi_minphase().with_coupling_scaled(0.0);
        let g = tuned(&p, &s, 0.1);
        // Pitch also moves thrust; without it the bracket term vanishes.
        let s = AeroSensitivities { dfa_dbeta: 0.0, ..s };
        let a = build_open_loop(&p, &s).unwrap().close_loop(&g).unwrap().a;
        let product = &chi_rot(&p, &s, g.kp, g.ki) * &chi_plt(&p, &s, g.kbeta);
        for k in 0..=4 {
            assert_relative_eq!(char_poly(&a).coeff(k), product.coeff(k), max_relative = 1e-12);
        }
    }

    #[test]
    fn open_loop_platform_factor() {
        let p = umaine();
        let s = phi_minphase();
        let plt = chi_plt(&p, &s, 0.0);
        let ht = p.hub_height;
        assert_relative_eq!(plt.coeff(1), (p.pitch_damping + ht * ht * s.dfa_dv) / p.pitch_inertia);
        assert_relative_eq!(plt.coeff(0), p.pitch_stiffness / p.pitch_inertia);
    }

    #[test]
    fn summaries() {
        let p = umaine();
        let s = phi_minphase();
        let plt = platform_summary(&p, &s, 0.0);
        assert_relative_eq!(plt.nu().unwrap(), 0.21852940772540505, max_relative = 1e-12);
        assert_relative_eq!(plt.zeta().unwrap(), 0.0621267899527033, max_relative = 1e-12);
        assert!(matches!(
            rotor_summary(&p, &s, -0.3, 0.0),
            ModeSummary::Degenerate { .. }
        ));
        for kb in [-50.0, -2.9, 0.0, 8.6, 42.7] {
            assert_eq!(platform_summary(&p, &s, kb).nu(), plt.nu());
        }
    }

    #[test]
    fn critically_damped_platform_repeated_root() {
        let p = umaine();
        let s = phi_minphase().with_coupling_scaled(0.0);
        let kb = kbeta_zeta_fixed(&p, &s, &PlatformTarget::new(1.0).unwrap()).unwrap();
        let r = chi_plt(&p, &s, kb).roots().unwrap();
        let nu = (p.pitch_stiffness / p.pitch_inertia).sqrt();
        for z in r {
            assert!((z - Complex::new(-nu, 0.0)).norm() <= 1e-7 * nu);
        }
    }

    #[test]
    fn modal_report_both_nmpz_unstable() {
        let p = nmpz_demo();
        let s = both_nmpz();
        let (kp, ki) = tune_pi(&p, &s, &RotorTarget::new(0.6, 0.01).unwrap()).unwrap();
        let g = ControlGains {
            kp,
            ki,
            ..Default::default()
        };
        let a = build_open_loop(&p, &s).unwrap().close_loop(&g).unwrap().a;
        let r = modal_report(&a).unwrap();
        assert!(!r.stable);
        assert!(r.max_real_part() > 0.0);

        let s = phi_minphase();
        let (kp, ki) = tune_pi(&p, &s, &RotorTarget::new(0.6, 0.01).unwrap()).unwrap();
        let g = ControlGains {
            kp,
            ki,
            ..Default::default()
        };
        let a = build_open_loop(&p, &s).unwrap().close_loop(&g).unwrap().a;
        assert!(modal_report(&a).unwrap().stable);
    }

    #[test]
    fn decoupled_platform_mode_matches_summary() {
        let p = umaine();
        let s = phi_minphase().with_coupling_scaled(0.0);
        let kb = kbeta_zeta_fixed(&p, &s, &PlatformTarget::new(0.1).unwrap()).unwrap();
        let g = ControlGains {
            kbeta: kb,
            ..Default::default()
        };
        let a = build_open_loop(&p, &s).unwrap().close_loop(&g).unwrap().a;
        // Platform rows no longer see the rotor states: A is block triangular.
        let r = modal_report(&a).unwrap();
        let nu = platform_summary(&p, &s, kb).nu().unwrap();
        let m = r.closest_mode(nu).unwrap();
        assert_relative_eq!(m.zeta.unwrap(), 0.1, max_relative = 1e-10);
        assert_relative_eq!(m.nu, nu, max_relative = 1e-10);
    }

    #[test]
    fn companion_and_aberth_agree_on_closed_loops() {
        let p = umaine();
        for s in [phi_minphase(), phi_nmpz(), omega_minphase(), omega_nmpz(), both_nmpz()] {
            for z in [0.05, 0.1, 0.25, 0.5] {
                let g = tuned(&p, &s, z);
                let a = build_open_loop(&p, &s).unwrap().close_loop(&g).unwrap().a;
                let chi = char_poly(&a);
                let x = chi.roots().unwrap();
                let y = chi.roots_aberth().unwrap();
                for u in &x {
                    let d = y.iter().map(|v| (u - v).norm()).fold(f64::INFINITY, f64::min);
                    assert!(d <= 1e-8 * u.norm().max(1e-3), "{u} vs {y:?}");
                }
            }
        }
    }

    fn admissible() -> impl Strategy<Value = AeroSensitivities> {
        (
            1.0e2f64..1.0e4,
            1.0e1f64..1.0e3,
            -1.0e5f64..-1.0e3,
            -1.0e4f64..-1.0e2,
            -3.0e5f64..-1.0e4,
            -3.0e4f64..-1.0e3,
        )
            .prop_map(|(tv, fv, tw, fw, tb, fb)| AeroSensitivities::from_kilonewton(tv, fv, tw, fw, tb, fb, 0.0))
    }

    proptest! {
        #[test]
        fn omega_condition_forms_agree(s in admissible(), m in 0.0f64..1.0, dt in 0.0f64..1.0e10) {
            let p = StructuralParams { pitch_damping: dt, ..umaine() };
            let k = ktaug(&p, &s, m).unwrap();
            let a = nmpz_omega_condition(&p, &s, k).unwrap();
            let b = nmpz_omega_condition_printed(&p, &s, k).unwrap();
            prop_assume!(!a.near_boundary);
            prop_assert_eq!(a.holds, b.holds);
        }

        #[test]
        fn conditions_are_root_signs(s in admissible()) {
            let p = umaine();
            let phi = nmpz_phi_condition(&s).unwrap();
            prop_assume!(!phi.near_boundary);
            prop_assert_eq!(phi.holds, numerator_phi(&p, &s).has_rhp_root().unwrap());
            let om = nmpz_omega_condition(&p, &s, 0.0).unwrap();
            prop_assume!(!om.near_boundary);
            prop_assert_eq!(om.holds, numerator_omega(&p, &s, 0.0).has_rhp_root().unwrap());
        }

        #[test]
        fn factored_char_poly_random(s in admissible(), zr in 0.2f64..1.0, zp in 0.05f64..0.6, m in 0.0f64..1.0) {
            let p = umaine();
            let (kp, ki) = tune_pi(&p, &s, &RotorTarget::new(zr, 0.01).unwrap()).unwrap();
            let g = ControlGains {
                kp,
                ki,
                kbeta: kbeta_zeta_fixed(&p, &s, &PlatformTarget::new(zp).unwrap()).unwrap(),
                ktaug: ktaug(&p, &s, m).unwrap(),
            };
            let a = build_open_loop(&p, &s).unwrap().close_loop(&g).unwrap().a;
            let direct = char_poly(&a);
            let factored = coupled_char_poly(&p, &s, &g);
            for k in 0..=4 {
                let scale = direct.coeff(k).abs().max(factored.coeff(k).abs()).max(1e-300);
                prop_assert!((direct.coeff(k) - factored.coeff(k)).abs() <= 1e-9 * scale);
            }
        }
    }
}
