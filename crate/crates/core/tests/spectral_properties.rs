use std::f64::consts::PI;

use hrwave::spectral::{
    band, dealiased_product, embed, forward_transform, inverse_transform_complex, project,
    sample_on_grid, sobolev_norm_sq, GridSamples, ModeIndex, PairField, SpectralField,
};
use hrwave::waveop::{apply_group, omega};
use hrwave::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(dim: usize, n: usize, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SpectralField::from_fn(dim, n, false, |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Real-valued field: symmetrised, with the unpaired `-n` modes cleared.
fn random_real_field(dim: usize, n: usize, seed: u64) -> SpectralField {
    let raw = random_field(dim, n, seed);
    let inner = |k: &ModeIndex| k.0.iter().all(|c| c.abs() < n as i64);
    let mut f = SpectralField::from_fn(dim, n, true, |k| {
        if !inner(&k) {
            return Complex64::new(0.0, 0.0);
        }
        0.5 * (raw.get(k) + raw.get(k.neg()).conj())
    });
    f.set_hermitian(true);
    f
}

fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    assert_eq!(a.bandwidth(), b.bandwidth());
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn dims_and_n() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![(Just(1usize), 0u32..7), (Just(2usize), 0u32..4)]
        .prop_map(|(d, e)| (d, 1usize << e))
}

/// Direct `O(N²)` convolution restricted to the block of bandwidth `m`.
fn convolution_oracle(f: &SpectralField, g: &SpectralField, m: usize) -> SpectralField {
    let mut out = SpectralField::zeros(f.dim(), m);
    out.set_hermitian(false);
    for i in 0..f.len() {
        let a = f.mode_at(i);
        for j in 0..g.len() {
            let b = g.mode_at(j);
            let k = match f.dim() {
                1 => ModeIndex::d1(a.0[0] + b.0[0]),
                _ => ModeIndex::d2(a.0[0] + b.0[0], a.0[1] + b.0[1]),
            };
            if let Some(idx) = out.index_of(k) {
                out.coeffs_mut()[idx] += f.coeffs()[i] * g.coeffs()[j];
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval((dim, n) in dims_and_n(), seed in any::<u64>()) {
        let f = random_field(dim, n, seed);
        let vals = inverse_transform_complex(&f).unwrap();
        let mean_sq = vals.iter().map(|c| c.norm_sqr()).sum::<f64>() / vals.len() as f64;
        let coef_sq = sobolev_norm_sq(&f, 0.0);
        prop_assert!((mean_sq - coef_sq).abs() <= 1e-12 * coef_sq.max(1.0));
    }

    #[test]
    fn transform_roundtrip((dim, n) in dims_and_n(), seed in any::<u64>()) {
        let f = random_real_field(dim, n, seed);
        let vals: Vec<f64> = inverse_transform_complex(&f).unwrap().iter().map(|c| c.re).collect();
        let back = forward_transform(&GridSamples::new(dim, n, vals).unwrap()).unwrap();
        prop_assert!(max_diff(&f, &back) < 1e-13);
    }

    #[test]
    fn projection_idempotent((dim, n) in dims_and_n(), seed in any::<u64>(), e in 0u32..4) {
        let f = random_field(dim, 2 * n, seed);
        let m = (1usize << e).min(n);
        let once = project(&f, m);
        prop_assert_eq!(project(&once, m), once.clone());
        // Projecting after zero-extension recovers the field.
        prop_assert_eq!(project(&embed(&once, 4 * m).unwrap(), m), once);
    }

    #[test]
    fn bands_add_up((dim, n) in dims_and_n(), seed in any::<u64>()) {
        let top = 4 * n;
        let f = random_field(dim, top, seed);
        let low = embed(&project(&f, n), top).unwrap();
        let mid = embed(&band(&f, n, 2 * n).unwrap(), top).unwrap();
        let high = band(&f, 2 * n, top).unwrap();
        let sum = low.add(&mid).unwrap().add(&high).unwrap();
        prop_assert!(max_diff(&sum, &f) == 0.0);
        let joined = band(&f, n, top).unwrap();
        prop_assert!(max_diff(&mid.add(&high).unwrap(), &joined) == 0.0);
    }

    #[test]
    fn aliasing_folds_modes((dim, n) in dims_and_n(), seed in any::<u64>()) {
        // Sampling a field of bandwidth 2n on the 2n-point grid and
        // interpolating folds every mode k onto k mod 2n.
        let f = random_real_field(dim, 2 * n, seed);
        let vals = sample_on_grid(&f, 2 * n).unwrap();
        let coarse = forward_transform(&GridSamples::new(dim, n, vals).unwrap()).unwrap();
        let side = 2 * n as i64;
        let wrap = |k: i64| (k + n as i64).rem_euclid(side) - n as i64;
        let mut folded = SpectralField::zeros(dim, n);
        for i in 0..f.len() {
            let k = f.mode_at(i);
            let target = match dim {
                1 => ModeIndex::d1(wrap(k.0[0])),
                _ => ModeIndex::d2(wrap(k.0[0]), wrap(k.0[1])),
            };
            let idx = folded.index_of(target).unwrap();
            folded.coeffs_mut()[idx] += f.coeffs()[i];
        }
        prop_assert!(max_diff(&folded, &coarse) < 1e-12);
    }

    #[test]
    fn group_law_and_energy((dim, n) in dims_and_n(), seed in any::<u64>(), s in -2.0f64..2.0, t in -2.0f64..2.0, m in 0.1f64..10.0) {
        let w = PairField::new(random_real_field(dim, n, seed), random_real_field(dim, n, seed ^ 1)).unwrap();
        let two = apply_group(&apply_group(&w, s, m).unwrap(), t, m).unwrap();
        let one = apply_group(&w, s + t, m).unwrap();
        let scale = w.max_abs().max(1.0) * (1.0 + omega(2.0 * (n * n) as f64, m));
        prop_assert!(max_diff(&two.u, &one.u) < 1e-12 * scale);
        prop_assert!(max_diff(&two.v, &one.v) < 1e-12 * scale);

        let energy = |p: &PairField| -> f64 {
            (0..p.u.len())
                .map(|i| {
                    let k_sq = p.u.mode_at(i).sq_norm() as f64;
                    let om = omega(k_sq, m);
                    om * om * p.u.coeffs()[i].norm_sqr() + p.v.coeffs()[i].norm_sqr()
                })
                .sum()
        };
        let e0 = energy(&w);
        prop_assert!((energy(&one) - e0).abs() <= 1e-12 * e0.max(1.0));
    }
}

#[test]
fn dealiased_product_matches_convolution() {
    // Covers both dimensions and all bandwidths up to 16 in 1D.
    let mut cases = 0;
    for (dim, ns) in [(1usize, &[1usize, 2, 4, 8, 16][..]), (2, &[1, 2, 4, 8][..])] {
        for &nf in ns {
            for &ng in ns {
                for seed in 0..4u64 {
                    let f = random_field(dim, nf, 100 * seed + nf as u64);
                    let g = random_field(dim, ng, 7 + 100 * seed + ng as u64);
                    let m = nf.max(ng);
                    let fast = dealiased_product(&f, &g, m).unwrap();
                    let slow = convolution_oracle(&f, &g, m);
                    let tol = 1e-12 * slow.max_abs().max(1.0);
                    assert!(max_diff(&fast, &slow) < tol, "dim={dim} nf={nf} ng={ng}");
                    cases += 1;
                }
            }
        }
    }
    assert!(cases >= 100);
}

#[test]
fn sampling_matches_direct_sum() {
    let f = random_field(1, 4, 3);
    let points = 32;
    let vals = sample_on_grid(&f, points).unwrap();
    for (j, v) in vals.iter().enumerate() {
        let x = j as f64 / points as f64;
        let direct: Complex64 = (0..f.len())
            .map(|i| {
                f.coeffs()[i] * Complex64::from_polar(1.0, 2.0 * PI * f.mode_at(i).0[0] as f64 * x)
            })
            .sum();
        assert!((direct.re - v).abs() < 1e-13);
    }
}
