use nalgebra::SMatrix;
// Float supplies the libm-backed math methods when std is absent.
#[allow(unused_imports)]
use num_traits::Float;

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
///
/// The argument is scaled to 1-norm ≤ 1/2, where 18 Taylor terms are below
/// f64 round-off, then squared back.
pub(crate) fn expm<const N: usize>(m: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    let norm = m
        .column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = m / 2f64.powi(squarings as i32);

    let mut result = SMatrix::<f64, N, N>::identity();
    let mut term = SMatrix::<f64, N, N>::identity();
    for k in 1..=18 {
        term = term * scaled / k as f64;
        result += term;
    }
    for _ in 0..squarings {
        result = result * result;
    }
    result
}
