use crate::error::{invalid, Error, Result};
use crate::spectral::{embed_pair, pair_norm, sample_on_grid, PairField};

/// `‖num - ref‖₀ = ‖·‖_{L² × H⁻¹}` after embedding both into the larger
/// mode block.
pub fn compute_error(num: &PairField, reference: &PairField) -> Result<f64> {
    if num.dim() != reference.dim() {
        return Err(Error::DimMismatch(num.dim(), reference.dim()));
    }
    let n = num.bandwidth().max(reference.bandwidth());
    let diff = embed_pair(num, n)?.sub(&embed_pair(reference, n)?)?;
    Ok(pair_norm(&diff, 0.0))
}

/// Least-squares slope of `log err` against `log τ`.
pub fn fit_slope_xy(taus: &[f64], errs: &[f64]) -> Result<f64> {
    if taus.len() != errs.len() || taus.len() < 2 {
        return Err(invalid("slope fit needs at least two (tau, err) pairs"));
    }
    if taus
        .iter()
        .chain(errs)
        .any(|x| !(*x > 0.0 && x.is_finite()))
    {
        return Err(invalid("slope fit needs positive finite values"));
    }
    let xs: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 1e-24 * n {
        return Err(invalid("slope fit needs distinct step sizes"));
    }
    Ok(sxy / sxx)
}

/// `max(u_num) - max(u_ref)` on a common grid of `max(N) · grid_factor`
/// points per dimension, with exact point evaluation of both fields.
pub fn overshoot(num: &PairField, reference: &PairField, grid_factor: usize) -> Result<f64> {
    if grid_factor < 2 {
        return Err(invalid(format!(
            "grid factor must be >= 2, got {grid_factor}"
        )));
    }
    if num.dim() != reference.dim() {
        return Err(Error::DimMismatch(num.dim(), reference.dim()));
    }
    let points = num.bandwidth().max(reference.bandwidth()) * grid_factor;
    overshoot_on_grid(
        &sample_on_grid(&num.u, points)?,
        &sample_on_grid(&reference.u, points)?,
    )
}

/// `max(a) - max(b)` for two sample sets on the same grid.
pub fn overshoot_on_grid(num: &[f64], reference: &[f64]) -> Result<f64> {
    if num.len() != reference.len() || num.is_empty() {
        return Err(invalid("overshoot needs two samplings of the same grid"));
    }
    let max = |s: &[f64]| s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(max(num) - max(reference))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{ModeIndex, SpectralField};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pair(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> PairField {
        let mut f = || {
            SpectralField::from_fn(dim, n, false, |_| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            })
        };
        let u = f();
        PairField::new(u, f()).unwrap()
    }

    #[test]
    fn error_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_pair(&mut rng, 1, 8);
        assert_eq!(compute_error(&a, &a).unwrap(), 0.0);
        let mut b = a.clone();
        let z = b.v.index_of(ModeIndex::d1(0)).unwrap();
        b.v.coeffs_mut()[z] += Complex64::new(0.25, 0.0);
        assert!((compute_error(&a, &b).unwrap() - 0.25).abs() < 1e-15);
        assert!(compute_error(&a, &PairField::zeros(2, 4)).is_err());
    }

    #[test]
    fn error_matches_direct_sum_over_union() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for dim in [1, 2] {
            let a = random_pair(&mut rng, dim, 4);
            let b = random_pair(&mut rng, dim, 8);
            let mut sum = 0.0;
            for idx in 0..b.u.len() {
                let k = b.u.mode_at(idx);
                let w = 1.0 / (1.0 + 4.0 * std::f64::consts::PI.powi(2) * k.sq_norm() as f64);
                sum +=
                    (a.u.get(k) - b.u.get(k)).norm_sqr() + w * (a.v.get(k) - b.v.get(k)).norm_sqr();
            }
            let e = compute_error(&a, &b).unwrap();
            assert!((e - sum.sqrt()).abs() < 1e-13);
            assert!((e - compute_error(&b, &a).unwrap()).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn error_is_a_metric(seed in any::<u64>(), dim in 1usize..=2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_pair(&mut rng, dim, 4);
            let b = random_pair(&mut rng, dim, 2);
            let c = random_pair(&mut rng, dim, 8);
            let ab = compute_error(&a, &b).unwrap();
            let bc = compute_error(&b, &c).unwrap();
            let ac = compute_error(&a, &c).unwrap();
            prop_assert!((ab - compute_error(&b, &a).unwrap()).abs() < 1e-12);
            prop_assert!(ac <= ab + bc + 1e-12);
            prop_assert!(ab >= 0.0);
        }

        #[test]
        fn slope_is_scale_invariant(p in 0.1f64..3.0, c in 1e-6f64..1e6, scale in 1e-8f64..1e8) {
            let taus: Vec<f64> = (3..8).map(|j| 2f64.powi(-j)).collect();
            let errs: Vec<f64> = taus.iter().map(|t| c * t.powf(p) * (1.0 + 0.1 * t.sin())).collect();
            let scaled: Vec<f64> = errs.iter().map(|e| e * scale).collect();
            let s1 = fit_slope_xy(&taus, &errs).unwrap();
            let s2 = fit_slope_xy(&taus, &scaled).unwrap();
            prop_assert!((s1 - s2).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_power_laws() {
        let taus: Vec<f64> = (4..9).map(|j| 2f64.powi(-j)).collect();
        for p in [1.0, 0.5] {
            let errs: Vec<f64> = taus.iter().map(|t| 3.0 * t.powf(p)).collect();
            assert!((fit_slope_xy(&taus, &errs).unwrap() - p).abs() < 1e-10);
        }
        assert!(fit_slope_xy(&[0.1, 0.1, 0.1], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn noisy_slope_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let taus: Vec<f64> = (5..10).map(|j| 2f64.powi(-j)).collect();
        for _ in 0..200 {
            let errs: Vec<f64> = taus
                .iter()
                .map(|t| 0.7 * t * (1.0 + 0.01 * rng.random_range(-1.0..1.0)))
                .collect();
            assert!((fit_slope_xy(&taus, &errs).unwrap() - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn overshoot_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut a = random_pair(&mut rng, 1, 8);
        for f in [&mut a.u, &mut a.v] {
            let herm = SpectralField::from_fn(1, 8, true, |k| {
                let c = f.get(k) + f.get(k.neg()).conj();
                if k.0[0] == -8 {
                    Complex64::new(c.re, 0.0)
                } else {
                    c
                }
            });
            *f = herm;
        }
        assert_eq!(overshoot(&a, &a, 4).unwrap(), 0.0);
        let mut b = a.clone();
        let z = b.u.index_of(ModeIndex::d1(0)).unwrap();
        b.u.coeffs_mut()[z] += Complex64::new(0.125, 0.0);
        assert!((overshoot(&b, &a, 4).unwrap() - 0.125).abs() < 1e-13);
        assert!(overshoot(&a, &a, 1).is_err());
    }
}
