//! Radix-2 complex FFTs on `P^d` tensor grids, plus the mapping between the
//! centered mode storage and FFT bin order.

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::field::SpectralField;
use crate::error::{Error, Result};

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    // The planner caches plans (and twiddles) per length and direction.
    let mut p = planner().lock().unwrap_or_else(|e| e.into_inner());
    p.plan_fft(len, direction)
}

pub(crate) fn require_pow2(points: usize) -> Result<()> {
    if points.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::NotPowerOfTwo(points))
    }
}

fn transpose(data: &[Complex64], side: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for i in 0..side {
        for j in 0..side {
            out[j * side + i] = data[i * side + j];
        }
    }
    out
}

/// Unnormalized in-place transform of a `side^dim` row-major tensor.
pub(crate) fn fft_nd(data: &mut Vec<Complex64>, side: usize, dim: usize, direction: FftDirection) {
    let fft = plan(side, direction);
    fft.process(data);
    if dim == 2 {
        let mut t = transpose(data, side);
        fft.process(&mut t);
        *data = transpose(&t, side);
    }
}

/// Scatters coefficients into FFT bins of a `points^dim` grid. Mode `k` lands
/// in bin `k mod points`; when `points < 2N` several modes fold into one bin,
/// which is exactly point evaluation on the coarser grid.
pub(crate) fn to_bins(field: &SpectralField, points: usize) -> Vec<Complex64> {
    let dim = field.dim();
    let p = points as i64;
    let mut bins = vec![Complex64::new(0.0, 0.0); points.pow(dim as u32)];
    for (idx, c) in field.coeffs().iter().enumerate() {
        let k = field.mode_at(idx);
        let b0 = k.0[0].rem_euclid(p) as usize;
        let b = match dim {
            1 => b0,
            _ => b0 * points + k.0[1].rem_euclid(p) as usize,
        };
        bins[b] += c;
    }
    bins
}

/// Gathers the modes `[-n, n-1]^dim` out of FFT bins, scaling by `scale`.
/// Requires `points >= 2n`.
pub(crate) fn from_bins(
    bins: &[Complex64],
    points: usize,
    dim: usize,
    n: usize,
    scale: f64,
    hermitian: bool,
) -> SpectralField {
    debug_assert!(points >= 2 * n);
    let p = points as i64;
    SpectralField::from_fn(dim, n, hermitian, |k| {
        let b0 = k.0[0].rem_euclid(p) as usize;
        let b = match dim {
            1 => b0,
            _ => b0 * points + k.0[1].rem_euclid(p) as usize,
        };
        bins[b] * scale
    })
}

/// Complex point values of the trigonometric polynomial on the uniform
/// `points^dim` grid.
pub(crate) fn eval_on_grid(field: &SpectralField, points: usize) -> Result<Vec<Complex64>> {
    require_pow2(points)?;
    let mut bins = to_bins(field, points);
    fft_nd(&mut bins, points, field.dim(), FftDirection::Inverse);
    Ok(bins)
}

/// Interpolating coefficients at bandwidth `n` for complex values on the
/// `(2n)^dim` grid.
pub(crate) fn interpolate_grid(
    values: Vec<Complex64>,
    dim: usize,
    n: usize,
    hermitian: bool,
) -> Result<SpectralField> {
    let side = 2 * n;
    require_pow2(side)?;
    let mut data = values;
    fft_nd(&mut data, side, dim, FftDirection::Forward);
    let scale = 1.0 / data.len() as f64;
    Ok(from_bins(&data, side, dim, n, scale, hermitian))
}
