//! Rainflow counting, damage-equivalent load and Miner damage.

use alloc::vec::Vec;
// Float supplies the libm-backed math methods when std is absent.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Default hysteresis gate as a fraction of the signal's peak-to-peak range.
pub const DEFAULT_HYSTERESIS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cycle {
    pub range: f64,
    pub mean: f64,
    /// `1.0` for a closed cycle, `0.5` for a residual half cycle.
    pub count: f64,
}

/// Local extrema of `x`, endpoints included.
///
/// A reversal is accepted only once the signal has moved more than
/// `hysteresis` away from the running extremum; plateaus collapse to one
/// point.
pub fn turning_points(x: &[f64], hysteresis: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let Some(&first) = x.first() else {
        return out;
    };
    out.push(first);
    // Direction of the current excursion: +1 rising, -1 falling, 0 unknown.
    let mut dir = 0i8;
    let mut extreme = first;
    for &v in &x[1..] {
        match dir {
            0 => {
                if (v - first).abs() > hysteresis {
                    dir = if v > first { 1 } else { -1 };
                    extreme = v;
                }
            }
            1 => {
                if v > extreme {
                    extreme = v;
                } else if extreme - v > hysteresis {
                    out.push(extreme);
                    dir = -1;
                    extreme = v;
                }
            }
            _ => {
                if v < extreme {
                    extreme = v;
                } else if v - extreme > hysteresis {
                    out.push(extreme);
                    dir = 1;
                    extreme = v;
                }
            }
        }
    }
    if dir != 0 {
        out.push(extreme);
    }
    out
}

/// Four-point rainflow on a turning-point sequence.
///
/// Whenever the inner range of the last four points is no larger than both
/// outer ranges it is a closed cycle and its two points are removed. What
/// remains on the stack contributes one half cycle per consecutive pair.
pub fn rainflow_turning_points(points: &[f64]) -> Vec<Cycle> {
    let mut cycles = Vec::new();
    let mut stack: Vec<f64> = Vec::with_capacity(points.len());
    for &p in points {
        stack.push(p);
        while stack.len() >= 4 {
            let n = stack.len();
            let (a, b, c, d) = (stack[n - 4], stack[n - 3], stack[n - 2], stack[n - 1]);
            let inner = (b - c).abs();
            if inner <= (a - b).abs() && inner <= (c - d).abs() {
                cycles.push(Cycle {
                    range: inner,
                    mean: 0.5 * (b + c),
                    count: 1.0,
                });
                stack.truncate(n - 3);
                stack.push(d);
            } else {
                break;
            }
        }
    }
    for w in stack.windows(2) {
        cycles.push(Cycle {
            range: (w[1] - w[0]).abs(),
            mean: 0.5 * (w[0] + w[1]),
            count: 0.5,
        });
    }
    cycles
}

/// Rainflow cycles of a signal with the default hysteresis gate
/// ([`DEFAULT_HYSTERESIS`] of peak-to-peak).
pub fn rainflow(x: &[f64]) -> Vec<Cycle> {
    rainflow_with(x, DEFAULT_HYSTERESIS)
}

/// Rainflow cycles with a hysteresis gate of `fraction` × peak-to-peak.
pub fn rainflow_with(x: &[f64], fraction: f64) -> Vec<Cycle> {
    let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let span = if x.is_empty() { 0.0 } else { hi - lo };
    rainflow_turning_points(&turning_points(x, fraction * span))
}

/// Sum of cycle counts.
pub fn total_count(cycles: &[Cycle]) -> f64 {
    cycles.iter().map(|c| c.count).sum()
}

/// Damage-equivalent load `(Σ n_i S_i^m / n_ref)^(1/m)`; zero for no cycles.
pub fn del(cycles: &[Cycle], m: f64, n_ref: f64) -> Result<f64> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::param("m", m, "must be > 0"));
    }
    if !(n_ref > 0.0 && n_ref.is_finite()) {
        return Err(Error::param("n_ref", n_ref, "must be > 0"));
    }
    let sum: f64 = cycles.iter().map(|c| c.count * c.range.powf(m)).sum();
    Ok((sum / n_ref).powf(1.0 / m))
}

/// Shape of an S-N curve below the knee.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnTail {
    /// The upper slope continues.
    Single,
    /// Slope changes to `m2`.
    Bilinear { m2: f64 },
    /// Ranges below the knee cause no damage.
    CutOff,
}

/// S-N curve `N(Δσ) = N_k (Δσ_k/Δσ)^m` through the knee `(Δσ_k, N_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WohlerCurve {
    pub m1: f64,
    pub tail: SnTail,
    /// Cycle count at the knee.
    pub knee_cycles: f64,
    /// Stress range at the knee (Pa).
    pub knee_stress: f64,
}

impl WohlerCurve {
    pub fn single(m: f64, knee_cycles: f64, knee_stress: f64) -> Result<Self> {
        Self::validated(m, SnTail::Single, knee_cycles, knee_stress)
    }

    pub fn bilinear(m1: f64, m2: f64, knee_cycles: f64, knee_stress: f64) -> Result<Self> {
        Self::validated(m1, SnTail::Bilinear { m2 }, knee_cycles, knee_stress)
    }

    /// Welded steel in seawater with cathodic protection (D detail):
    /// `m = 3` above 10⁶ cycles, `m = 5` below, knee at 83.4 MPa.
    pub fn steel_d_seawater() -> Self {
        WohlerCurve {
            m1: 3.0,
            tail: SnTail::Bilinear { m2: 5.0 },
            knee_cycles: 1e6,
            knee_stress: 83.4e6,
        }
    }

    fn validated(m1: f64, tail: SnTail, knee_cycles: f64, knee_stress: f64) -> Result<Self> {
        if !(m1 > 0.0 && m1.is_finite()) {
            return Err(Error::param("m1", m1, "must be > 0"));
        }
        if let SnTail::Bilinear { m2 } = tail {
            if !(m2 > 0.0 && m2.is_finite()) {
                return Err(Error::param("m2", m2, "must be > 0"));
            }
        }
        if !(knee_cycles > 0.0 && knee_cycles.is_finite()) {
            return Err(Error::param("knee_cycles", knee_cycles, "must be > 0"));
        }
        if !(knee_stress > 0.0 && knee_stress.is_finite()) {
            return Err(Error::param("knee_stress", knee_stress, "must be > 0"));
        }
        Ok(WohlerCurve {
            m1,
            tail,
            knee_cycles,
            knee_stress,
        })
    }

    /// Cycles to failure at stress range `ds`; infinite for `ds ≤ 0`.
    pub fn cycles_to_failure(&self, ds: f64) -> f64 {
        if !(ds > 0.0) {
            return f64::INFINITY;
        }
        let ratio = self.knee_stress / ds;
        let m = if ds >= self.knee_stress {
            self.m1
        } else {
            match self.tail {
                SnTail::Single => self.m1,
                SnTail::Bilinear { m2 } => m2,
                SnTail::CutOff => return f64::INFINITY,
            }
        };
        self.knee_cycles * ratio.powf(m)
    }
}

/// Miner damage `lifetime_scale · Σ n_i / N(S_i / section_modulus)`.
pub fn miner_damage(cycles: &[Cycle], curve: &WohlerCurve, section_modulus: f64, lifetime_scale: f64) -> Result<f64> {
    if !(section_modulus > 0.0 && section_modulus.is_finite()) {
        return Err(Error::param("section_modulus", section_modulus, "must be > 0"));
    }
    if !(lifetime_scale >= 0.0 && lifetime_scale.is_finite()) {
        return Err(Error::param("lifetime_scale", lifetime_scale, "must be >= 0"));
    }
    let sum: f64 = cycles
        .iter()
        .map(|c| c.count / curve.cycles_to_failure(c.range / section_modulus))
        .sum();
    Ok(lifetime_scale * sum)
}
