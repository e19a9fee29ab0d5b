//! Real polynomials in `s` and their roots.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
// Float supplies the libm-backed math methods when std is absent.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Complex, Error, Result};

/// Relative backward residual accepted for a root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;

/// Real polynomial with coefficients in ascending powers of `s`.
///
/// Trailing zero coefficients are trimmed, so the last stored coefficient is
/// the nonzero leading one. The zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_slice(coeffs: &[f64]) -> Self {
        Self::new(coeffs.to_vec())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `s - r`.
    pub fn linear_factor(r: f64) -> Self {
        Self::new(vec![-r, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `s^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn monic(&self) -> Self {
        self.scale(1.0 / self.leading())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    pub fn eval_complex(&self, s: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    /// `|p(z)| / Σ |c_k| |z|^k`, the backward error of `z` as a root.
    pub fn relative_residual(&self, z: Complex) -> f64 {
        let r = z.norm();
        let scale = self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c.abs());
        if scale == 0.0 {
            return 0.0;
        }
        self.eval_complex(z).norm() / scale
    }

    /// Number of leading zero coefficients, i.e. the multiplicity of `s = 0`.
    fn zero_root_multiplicity(&self) -> usize {
        self.coeffs.iter().take_while(|&&c| c == 0.0).count()
    }

    fn deflate_zero_roots(&self) -> (usize, Polynomial) {
        let k = self.zero_root_multiplicity();
        (k, Polynomial::new(self.coeffs[k..].to_vec()))
    }

    /// All complex roots, with multiplicity, sorted by real then imaginary
    /// part.
    ///
    /// Exact zero roots are split off first. The rest are the eigenvalues of
    /// the companion matrix (real Schur form), each refined by one Newton step
    /// when that lowers the residual.
    pub fn roots(&self) -> Result<Vec<Complex>> {
        if self.is_zero() {
            return Err(Error::InvalidInput("roots of the zero polynomial"));
        }
        let (zeros, rest) = self.deflate_zero_roots();
        let mut out = vec![Complex::new(0.0, 0.0); zeros];
        let n = rest.degree().unwrap_or(0);
        if n > 0 {
            let m = rest.monic();
            let companion = DMatrix::from_fn(n, n, |i, j| {
                if j == n - 1 {
                    -m.coeffs[i]
                } else if i == j + 1 {
                    1.0
                } else {
                    0.0
                }
            });
            let d = rest.derivative();
            for z in companion.complex_eigenvalues().iter() {
                let z = Complex::new(z.re, z.im);
                let dz = d.eval_complex(z);
                let mut best = z;
                if dz.norm() > 0.0 {
                    let polished = z - rest.eval_complex(z) / dz;
                    if polished.is_finite() && rest.relative_residual(polished) < rest.relative_residual(z) {
                        best = polished;
                    }
                }
                let residual = rest.relative_residual(best);
                if !(residual <= ROOT_RESIDUAL_TOL) {
                    return Err(Error::RootFinding { residual });
                }
                out.push(best);
            }
        }
        sort_roots(&mut out);
        Ok(out)
    }

    /// Roots by simultaneous Aberth–Ehrlich iteration. Independent of the
    /// companion route and used to cross-check it.
    pub fn roots_aberth(&self) -> Result<Vec<Complex>> {
        if self.is_zero() {
            return Err(Error::InvalidInput("roots of the zero polynomial"));
        }
        let (zeros, rest) = self.deflate_zero_roots();
        let mut out = vec![Complex::new(0.0, 0.0); zeros];
        let n = rest.degree().unwrap_or(0);
        if n > 0 {
            let m = rest.monic();
            let d = m.derivative();
            // Fujiwara-style bound on root moduli sets the starting circle.
            let radius = (0..n)
                .map(|k| m.coeffs[k].abs().powf(1.0 / (n - k) as f64))
                .fold(0.0, f64::max)
                .max(f64::MIN_POSITIVE);
            let mut z: Vec<Complex> = (0..n)
                .map(|k| {
                    let angle = 2.0 * core::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
                    Complex::from_polar(radius, angle)
                })
                .collect();
            for _ in 0..500 {
                let mut max_step = 0.0f64;
                for i in 0..n {
                    let p = m.eval_complex(z[i]);
                    if p.norm() == 0.0 {
                        continue;
                    }
                    let ratio = p / d.eval_complex(z[i]);
                    let repulsion: Complex = (0..n)
                        .filter(|&j| j != i)
                        .map(|j| Complex::new(1.0, 0.0) / (z[i] - z[j]))
                        .sum();
                    let step = ratio / (Complex::new(1.0, 0.0) - ratio * repulsion);
                    if step.is_finite() {
                        z[i] -= step;
                        max_step = max_step.max(step.norm() / z[i].norm().max(radius * 1e-3));
                    }
                }
                if max_step < 1e-15 {
                    break;
                }
            }
            for zi in z {
                let residual = m.relative_residual(zi);
                if !(residual <= ROOT_RESIDUAL_TOL) {
                    return Err(Error::RootFinding { residual });
                }
                // Snap numerically-real roots so conjugate pairing stays exact.
                let zi = if zi.im.abs() <= 1e-14 * zi.norm() {
                    Complex::new(zi.re, 0.0)
                } else {
                    zi
                };
                out.push(zi);
            }
        }
        sort_roots(&mut out);
        Ok(out)
    }

    /// `true` when some root has a strictly positive real part.
    pub fn has_rhp_root(&self) -> Result<bool> {
        Ok(self.roots()?.iter().any(|z| z.re > 0.0))
    }
}

fn sort_roots(roots: &mut [Complex]) {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
