//! Linearized rotor / platform-pitch model of a floating offshore wind turbine.
//!
//! The crate covers the whole analysis chain around blade-pitch control of a
//! floating turbine:
//!
//! * [`model`]: the four-state linear model `x = (θ, ω, φ, φ̇)` and its closure
//!   with the multi-SISO pitch controller.
//! * [`gains`]: PI inversion for the rotor loop, the platform-damping
//!   (`ζ_plt`-fixed) and decoupling `k_β` strategies, and `k_τg`.
//! * [`stability`]: non-minimum-phase-zero conditions, numerator and
//!   characteristic polynomials, modal damping.
//! * [`freq`]: transfer matrix evaluation and reduced second-order filters.
//! * [`sim`]: time-domain integration (RK4 and exact zero-order hold) and
//!   free-decay damping identification.
//! * [`fatigue`]: rainflow counting, damage-equivalent load, Miner damage.
//!
//! Everything is SI internally (rad, s, N, m, kg). The crate is `no_std` and
//! only needs an allocator.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style checks reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
#[cfg(test)]
mod fixtures;
mod linalg;

pub mod fatigue;
pub mod freq;
pub mod gains;
pub mod model;
pub mod poly;
pub mod sim;
pub mod stability;

pub use error::{Error, Result};
pub use gains::{ControlGains, PlatformTarget, RotorTarget, Strategy};
pub use model::{AeroSensitivities, State, StateSpace, StructuralParams};
pub use poly::Polynomial;

/// Complex scalar used for eigenvalues, roots and frequency responses.
pub type Complex = num_complex::Complex64;
