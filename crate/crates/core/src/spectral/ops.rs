use std::f64::consts::PI;

use num_complex::Complex64;

use super::fft::{eval_on_grid, interpolate_grid, require_pow2};
use super::field::{GridSamples, PairField, SpectralField};
use crate::error::{invalid, Error, Result};

const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

/// Trigonometric interpolation `I_N`: the unique field with `2N` modes per
/// dimension whose values on the grid are `samples`.
pub fn forward_transform(samples: &GridSamples) -> Result<SpectralField> {
    let values = samples
        .values()
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    interpolate_grid(values, samples.dim(), samples.bandwidth(), true)
}

/// Complex values of the field on its own `(2N)^d` grid.
pub fn inverse_transform_complex(field: &SpectralField) -> Result<Vec<Complex64>> {
    eval_on_grid(field, 2 * field.bandwidth())
}

/// Real parts of the field's values on its own `(2N)^d` grid.
pub fn inverse_transform(field: &SpectralField) -> Result<GridSamples> {
    let values = inverse_transform_complex(field)?
        .into_iter()
        .map(|c| c.re)
        .collect();
    GridSamples::new(field.dim(), field.bandwidth(), values)
}

/// Real parts of the field's exact point values on a uniform grid with
/// `points` nodes per dimension (zero-padded when `points > 2N`).
pub fn sample_on_grid(field: &SpectralField, points: usize) -> Result<Vec<f64>> {
    Ok(eval_on_grid(field, points)?
        .into_iter()
        .map(|c| c.re)
        .collect())
}

fn copy_block(field: &SpectralField, target: usize) -> SpectralField {
    SpectralField::from_fn(field.dim(), target, field.is_hermitian(), |k| field.get(k))
}

/// L² projection `Π_M`: keeps the block `[-M, M-1]^d`. The result is stored
/// at bandwidth `M` when `M < N`, otherwise the field is returned unchanged.
///
/// Panics if `m == 0`.
pub fn project(field: &SpectralField, m: usize) -> SpectralField {
    assert!(m >= 1, "projection bandwidth must be positive");
    if m >= field.bandwidth() {
        field.clone()
    } else {
        copy_block(field, m)
    }
}

/// Zero-extends a field to the larger bandwidth `m`.
pub fn embed(field: &SpectralField, m: usize) -> Result<SpectralField> {
    if m < field.bandwidth() {
        return Err(invalid(format!(
            "cannot embed bandwidth {} into {m}",
            field.bandwidth()
        )));
    }
    if m == field.bandwidth() {
        return Ok(field.clone());
    }
    Ok(copy_block(field, m))
}

/// Stores the field at bandwidth `m`, truncating or zero-padding.
pub fn resize(field: &SpectralField, m: usize) -> SpectralField {
    copy_block(field, m)
}

/// `Π_{(n1, n2]} = Π_{n2} - Π_{n1}`, stored at the bandwidth of `Π_{n2} f`.
pub fn band(field: &SpectralField, n1: usize, n2: usize) -> Result<SpectralField> {
    if n1 == 0 || n2 <= n1 {
        return Err(invalid(format!(
            "band requires n2 > n1 >= 1, got ({n1}, {n2})"
        )));
    }
    let mut out = project(field, n2);
    for idx in 0..out.len() {
        if out.mode_at(idx).in_block(n1) {
            out.coeffs_mut()[idx] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(out)
}

/// Sobolev weight `(1 + 4π²|k|²)^s`.
pub fn sobolev_weight(k_sq: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        (1.0 + FOUR_PI_SQ * k_sq).powf(s)
    }
}

/// Squared `H^s` norm `Σ (1 + 4π²|k|²)^s |c_k|²`.
pub fn sobolev_norm_sq(field: &SpectralField, s: f64) -> f64 {
    if s == 0.0 {
        return field.coeffs().iter().map(|c| c.norm_sqr()).sum();
    }
    field
        .coeffs()
        .iter()
        .zip(field.mode_sq_norms())
        .map(|(c, k2)| sobolev_weight(k2, s) * c.norm_sqr())
        .sum()
}

pub fn sobolev_norm(field: &SpectralField, s: f64) -> f64 {
    sobolev_norm_sq(field, s).sqrt()
}

/// `‖W‖_a = (‖u‖²_{H^a} + ‖v‖²_{H^{a-1}})^{1/2}`.
pub fn pair_norm(w: &PairField, a: f64) -> f64 {
    (sobolev_norm_sq(&w.u, a) + sobolev_norm_sq(&w.v, a - 1.0)).sqrt()
}

pub fn project_pair(w: &PairField, m: usize) -> PairField {
    PairField {
        u: project(&w.u, m),
        v: project(&w.v, m),
    }
}

pub fn embed_pair(w: &PairField, m: usize) -> Result<PairField> {
    Ok(PairField {
        u: embed(&w.u, m)?,
        v: embed(&w.v, m)?,
    })
}

/// Exact `Π_{m_out}(f g)`. Both factors are zero-padded to a `4N` grid per
/// dimension, which resolves every product mode `[-2N, 2N-2]` without
/// aliasing, multiplied pointwise and transformed back.
pub fn dealiased_product(
    f: &SpectralField,
    g: &SpectralField,
    m_out: usize,
) -> Result<SpectralField> {
    if f.dim() != g.dim() {
        return Err(Error::DimMismatch(f.dim(), g.dim()));
    }
    if m_out == 0 {
        return Err(invalid("output bandwidth must be positive"));
    }
    let n = f.bandwidth().max(g.bandwidth());
    let points = 4 * n;
    require_pow2(points)?;
    let fv = eval_on_grid(f, points)?;
    let gv = eval_on_grid(g, points)?;
    let prod: Vec<Complex64> = fv.iter().zip(&gv).map(|(a, b)| a * b).collect();
    let full = interpolate_grid(prod, f.dim(), 2 * n, f.is_hermitian() && g.is_hermitian())?;
    Ok(resize(&full, m_out))
}
