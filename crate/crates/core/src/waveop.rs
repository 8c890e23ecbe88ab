//! Per-mode linear algebra of the wave group.
//!
//! For a Fourier mode with `ω = √(m + 4π²|k|²)` the generator acts on
//! `(û, v̂)` as `L_ω = [[0, 1], [-ω², 0]]`, so
//!
//! ```text
//! e^{tL_ω} = [[cos ωt, sin ωt / ω], [-ω sin ωt, cos ωt]]
//! ```
//!
//! and the step filter
//!
//! ```text
//! φ_τ(L_ω) = ∫_0^τ (τ - s) e^{(τ-2s)L_ω} ds
//!          = ½ [[τ sin ωτ / ω, (sin ωτ/ω - τ cos ωτ) / ω²],
//!               [τ cos ωτ - sin ωτ / ω, τ sin ωτ / ω]]
//! ```
//!
//! Both are applied mode by mode through cached tables.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::spectral::{PairField, SpectralField};

pub type Mat2 = [[f64; 2]; 2];

/// Oscillation frequency of a single Fourier mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeSymbol {
    omega: f64,
}

impl ModeSymbol {
    pub fn new(k_sq: f64, m: f64) -> Result<Self> {
        check_mass(m)?;
        Ok(ModeSymbol {
            omega: omega(k_sq, m),
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

pub(crate) fn check_mass(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!(
            "mass parameter m must be positive, got {m}"
        )))
    }
}

/// `ω_k = √(m + 4π²|k|²)`.
pub fn omega(k_sq: f64, m: f64) -> f64 {
    (m + 4.0 * PI * PI * k_sq).sqrt()
}

pub fn group_matrix(omega: f64, t: f64) -> Mat2 {
    let (s, c) = (omega * t).sin_cos();
    [[c, s / omega], [-omega * s, c]]
}

/// `(sin x - x cos x) / x³`, with a series near zero where the closed form
/// cancels catastrophically.
fn sinc_defect(x: f64) -> f64 {
    if x.abs() < 0.05 {
        let x2 = x * x;
        // Σ (-1)^{n+1} 2n x^{2n-2} / (2n+1)!
        1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0 - x2 * x2 * x2 / 45360.0
    } else {
        (x.sin() - x * x.cos()) / (x * x * x)
    }
}

/// Closed form of `φ_τ(L_ω)`.
pub fn phi_matrix(omega: f64, tau: f64) -> Mat2 {
    let x = omega * tau;
    let diag = 0.5 * tau * x.sin() / omega;
    // (sin x / ω - τ cos x) / ω² = τ³ (sin x - x cos x) / x³
    let defect = tau * tau * tau * sinc_defect(x);
    [[diag, 0.5 * defect], [-0.5 * omega * omega * defect, diag]]
}

fn apply_tables(w: &PairField, a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> PairField {
    let mut u = w.u.clone();
    let mut v = w.v.clone();
    let (us, vs) = (w.u.coeffs(), w.v.coeffs());
    let (uo, vo) = (u.coeffs_mut(), v.coeffs_mut());
    for i in 0..us.len() {
        uo[i] = us[i] * a[i] + vs[i] * b[i];
    }
    for i in 0..us.len() {
        vo[i] = us[i] * c[i] + vs[i] * d[i];
    }
    PairField { u, v }
}

fn check_shape(w: &PairField, dim: usize, n: usize) -> Result<()> {
    if w.dim() != dim {
        return Err(Error::DimMismatch(w.dim(), dim));
    }
    if w.bandwidth() != n {
        return Err(Error::BandwidthMismatch(w.bandwidth(), n));
    }
    Ok(())
}

/// Per-mode `e^{tL}` tables for one bandwidth and one time `t`.
#[derive(Clone, Debug)]
pub struct GroupCache {
    t: f64,
    dim: usize,
    n: usize,
    cos: Vec<f64>,
    sin_over_omega: Vec<f64>,
    minus_omega_sin: Vec<f64>,
}

impl GroupCache {
    pub fn new(dim: usize, n: usize, m: f64, t: f64) -> Result<Self> {
        check_mass(m)?;
        if !t.is_finite() {
            return Err(invalid("group time must be finite"));
        }
        let k_sq = SpectralField::zeros(dim, n).mode_sq_norms();
        let mut cos = Vec::with_capacity(k_sq.len());
        let mut sin_over_omega = Vec::with_capacity(k_sq.len());
        let mut minus_omega_sin = Vec::with_capacity(k_sq.len());
        for &k2 in &k_sq {
            let w = omega(k2, m);
            let (s, c) = (w * t).sin_cos();
            cos.push(c);
            sin_over_omega.push(s / w);
            minus_omega_sin.push(-w * s);
        }
        Ok(GroupCache {
            t,
            dim,
            n,
            cos,
            sin_over_omega,
            minus_omega_sin,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.cos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cos.is_empty()
    }

    pub fn apply(&self, w: &PairField) -> Result<PairField> {
        check_shape(w, self.dim, self.n)?;
        Ok(apply_tables(
            w,
            &self.cos,
            &self.sin_over_omega,
            &self.minus_omega_sin,
            &self.cos,
        ))
    }
}

/// `e^{tL} W`.
pub fn apply_group(w: &PairField, t: f64, m: f64) -> Result<PairField> {
    GroupCache::new(w.dim(), w.bandwidth(), m, t)?.apply(w)
}

/// Per-mode `φ_τ(L)` tables for one bandwidth and step.
#[derive(Clone, Debug)]
pub struct PhiCache {
    tau: f64,
    dim: usize,
    n: usize,
    diag: Vec<f64>,
    upper: Vec<f64>,
    lower: Vec<f64>,
}

impl PhiCache {
    pub fn new(dim: usize, n: usize, m: f64, tau: f64) -> Result<Self> {
        check_mass(m)?;
        check_tau(tau)?;
        let k_sq = SpectralField::zeros(dim, n).mode_sq_norms();
        let mut diag = Vec::with_capacity(k_sq.len());
        let mut upper = Vec::with_capacity(k_sq.len());
        let mut lower = Vec::with_capacity(k_sq.len());
        for &k2 in &k_sq {
            let p = phi_matrix(omega(k2, m), tau);
            diag.push(p[0][0]);
            upper.push(p[0][1]);
            lower.push(p[1][0]);
        }
        Ok(PhiCache {
            tau,
            dim,
            n,
            diag,
            upper,
            lower,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn apply(&self, w: &PairField) -> Result<PairField> {
        check_shape(w, self.dim, self.n)?;
        Ok(apply_tables(
            w,
            &self.diag,
            &self.upper,
            &self.lower,
            &self.diag,
        ))
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("step size must be positive, got {tau}")))
    }
}

/// `φ_τ(L) W`.
pub fn phi_filter(w: &PairField, tau: f64, m: f64) -> Result<PairField> {
    PhiCache::new(w.dim(), w.bandwidth(), m, tau)?.apply(w)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(nodes: usize) -> (Vec<f64>, Vec<f64>) {
    let n = nodes;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Quadrature approximation of `∫_0^τ (τ - s) e^{(τ-2s)L_ω} ds`, independent
/// of the closed form used by [`phi_matrix`]. Intended as a test oracle.
///
/// The `nodes`-point rule is applied on equal panels, each spanning at most
/// 16 radians of the phase `ω(τ - 2s)`, so large `ωτ` stays resolved.
pub fn quadrature_oracle_phi(omega: f64, tau: f64, nodes: usize) -> Mat2 {
    assert!(nodes >= 16, "oracle needs at least 16 nodes");
    let (x, w) = gauss_legendre(nodes);
    let panels = ((2.0 * omega.abs() * tau.abs() / 16.0).ceil() as usize).max(1);
    let width = tau / panels as f64;
    let half = 0.5 * width;
    let mut acc = [[0.0; 2]; 2];
    for p in 0..panels {
        let a = p as f64 * width;
        for (xi, wi) in x.iter().zip(&w) {
            let s = a + half * (xi + 1.0);
            let g = group_matrix(omega, tau - 2.0 * s);
            let weight = wi * half * (tau - s);
            for r in 0..2 {
                for c in 0..2 {
                    acc[r][c] += weight * g[r][c];
                }
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ModeIndex;
    use num_complex::Complex64;

    fn max_dev(a: &Mat2, b: &Mat2) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                m = m.max((a[r][c] - b[r][c]).abs());
            }
        }
        m
    }

    #[test]
    fn quarter_period_rotation() {
        let mut u = SpectralField::zeros(1, 2);
        u.set(ModeIndex::d1(0), Complex64::new(1.0, 0.0)).unwrap();
        let w = PairField::new(u, SpectralField::zeros(1, 2)).unwrap();
        let out = apply_group(&w, PI / 2.0, 1.0).unwrap();
        assert!(out.u.get(ModeIndex::d1(0)).norm() < 1e-15);
        assert!((out.v.get(ModeIndex::d1(0)) - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn zero_time_is_identity() {
        let u = SpectralField::from_fn(2, 4, false, |k| Complex64::new(k.0[0] as f64, 1.0));
        let v = u.scaled(0.5);
        let w = PairField::new(u, v).unwrap();
        assert_eq!(apply_group(&w, 0.0, 2.0).unwrap(), w);
    }

    #[test]
    fn rejects_bad_parameters() {
        let w = PairField::zeros(1, 2);
        assert!(apply_group(&w, 1.0, 0.0).is_err());
        assert!(apply_group(&w, 1.0, -1.0).is_err());
        assert!(phi_filter(&w, 0.0, 1.0).is_err());
        assert!(phi_filter(&w, -0.1, 1.0).is_err());
        assert!(ModeSymbol::new(1.0, 0.0).is_err());
        assert!(ModeSymbol::new(0.0, 4.0).unwrap().omega() == 2.0);
    }

    #[test]
    fn phi_half_period_example() {
        let p = phi_matrix(1.0, PI);
        let expect = [[0.0, PI / 2.0], [-PI / 2.0, 0.0]];
        assert!(max_dev(&p, &expect) < 1e-14);
        let oracle = quadrature_oracle_phi(1.0, PI, 64);
        assert!(max_dev(&oracle, &expect) < 1e-12);
    }

    #[test]
    fn phi_small_step_limit() {
        let tau = 1e-4;
        let p = phi_matrix(1.0, tau);
        let q = quadrature_oracle_phi(1.0, tau, 64);
        for d in [p[0][0], p[1][1], q[0][0], q[1][1]] {
            assert!((d - tau * tau / 2.0).abs() <= 1e-6 * tau * tau / 2.0);
        }
    }

    #[test]
    fn series_branch_is_continuous() {
        let below = sinc_defect(0.05 - 1e-12);
        let above = sinc_defect(0.05);
        assert!((below - above).abs() < 1e-11);
        assert!((sinc_defect(1e-8) - 1.0 / 3.0).abs() < 1e-15);
        assert!((sinc_defect(-0.01) - sinc_defect(0.01)).abs() == 0.0);
    }

    #[test]
    fn oracle_vanishes_for_tiny_steps() {
        let q = quadrature_oracle_phi(10.0, 1e-12, 32);
        assert!(q.iter().flatten().all(|x| x.abs() <= 1e-24));
    }

    #[test]
    fn oracle_node_doubling_and_symmetry() {
        // smooth regime: ωτ ≤ 1
        for &(omega, tau) in &[
            (1.0, 1e-3),
            (1.0, 0.1),
            (10.0, 1e-3),
            (10.0, 0.1),
            (1e3, 1e-3),
        ] {
            {
                let a = quadrature_oracle_phi(omega, tau, 32);
                let b = quadrature_oracle_phi(omega, tau, 64);
                assert!(max_dev(&a, &b) < 1e-13, "ω={omega} τ={tau}");
                assert!((b[0][0] - b[1][1]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        let sum_w: f64 = w.iter().sum();
        assert!((sum_w - 2.0).abs() < 1e-14);
        // ∫ x^30 = 2/31 is exact for 16 nodes (degree ≤ 31)
        let i: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((i - 2.0 / 31.0).abs() < 1e-14);
    }
}
