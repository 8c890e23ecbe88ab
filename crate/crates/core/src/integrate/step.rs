use crate::error::{invalid, Result};
use crate::model::{eval_f_on_grid, Nonlinearity, Which};
use crate::spectral::{dealiased_product, PairField, SpectralField};
use crate::waveop::{GroupCache, PhiCache};

/// Per-step tables for one `(dim, N, m, τ)`.
#[derive(Clone, Debug)]
pub struct StepKernel {
    dim: usize,
    n: usize,
    tau: f64,
    nl: Nonlinearity,
    group: GroupCache,
    phi: Option<PhiCache>,
}

impl StepKernel {
    /// Negative `τ` is allowed for the splitting baselines (time reversal);
    /// the filtered step needs `τ > 0`.
    pub fn new(dim: usize, n: usize, tau: f64, nl: Nonlinearity) -> Result<Self> {
        if tau == 0.0 || !tau.is_finite() {
            return Err(invalid(format!("step size must be non-zero, got {tau}")));
        }
        let group = GroupCache::new(dim, n, nl.m(), tau)?;
        let phi = if tau > 0.0 {
            Some(PhiCache::new(dim, n, nl.m(), tau)?)
        } else {
            None
        };
        Ok(StepKernel {
            dim,
            n,
            tau,
            nl,
            group,
            phi,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn bandwidth(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nl
    }

    fn f_of(&self, u: &SpectralField) -> Result<SpectralField> {
        if self.nl.is_free() {
            return Ok(SpectralField::zeros(u.dim(), u.bandwidth()));
        }
        eval_f_on_grid(&self.nl, u, Which::F)
    }

    /// `(u, v) ↦ (u, v + h I_N f(u))`, the exact flow of `U' = F(U)`.
    fn kick(&self, w: &PairField, h: f64) -> Result<PairField> {
        let fu = self.f_of(&w.u)?;
        let mut v = w.v.clone();
        v.axpy(h, &fu)?;
        PairField::new(w.u.clone(), v)
    }
}

/// `H(U) = (-I_N f(u), Π_N(I_N f'(u) · v))` at the bandwidth of `U`.
pub fn h_of(w: &PairField, nl: &Nonlinearity) -> Result<PairField> {
    let n = w.bandwidth();
    if nl.is_free() {
        return Ok(PairField::zeros(w.dim(), n));
    }
    let fu = eval_f_on_grid(nl, &w.u, Which::F)?;
    let dfu = eval_f_on_grid(nl, &w.u, Which::DF)?;
    h_from_parts(&fu, &dfu, &w.v)
}

fn h_from_parts(fu: &SpectralField, dfu: &SpectralField, v: &SpectralField) -> Result<PairField> {
    let second = dealiased_product(dfu, v, v.bandwidth())?;
    PairField::new(fu.scaled(-1.0), second)
}

/// One filtered low-regularity step of the low band.
pub fn step_hr_lri(low: &PairField, kernel: &StepKernel) -> Result<PairField> {
    let phi = kernel
        .phi
        .as_ref()
        .ok_or_else(|| invalid("the filtered step needs a positive step size"))?;
    let nl = &kernel.nl;
    if nl.is_free() {
        return kernel.group.apply(low);
    }
    let fu = eval_f_on_grid(nl, &low.u, Which::F)?;
    let dfu = eval_f_on_grid(nl, &low.u, Which::DF)?;
    let h = h_from_parts(&fu, &dfu, &low.v)?;

    // e^{τL}(U + τ F(U)) + φ_τ(L) H(U)
    let mut kicked_v = low.v.clone();
    kicked_v.axpy(kernel.tau, &fu)?;
    let mut out = kernel
        .group
        .apply(&PairField::new(low.u.clone(), kicked_v)?)?;
    out.axpy(1.0, &phi.apply(&h)?)?;
    Ok(out)
}

/// Lie splitting: `U ↦ e^{τL}(U + τ F(U))`.
pub fn step_lie(low: &PairField, kernel: &StepKernel) -> Result<PairField> {
    kernel.group.apply(&kernel.kick(low, kernel.tau)?)
}

/// Strang splitting: half kick, free flow, half kick.
pub fn step_strang(low: &PairField, kernel: &StepKernel) -> Result<PairField> {
    let half = 0.5 * kernel.tau;
    let mid = kernel.group.apply(&kernel.kick(low, half)?)?;
    kernel.kick(&mid, half)
}

/// Deuflhard's trigonometric method, per mode
///
/// ```text
/// u⁺ = cos(ωτ) u + sin(ωτ)/ω v + (τ/2) sin(ωτ)/ω F̂ⁿ
/// v⁺ = -ω sin(ωτ) u + cos(ωτ) v + (τ/2)(cos(ωτ) F̂ⁿ + F̂ⁿ⁺¹)
/// ```
///
/// with `F̂` the coefficients of `I_N f(u)`.
pub fn step_deuflhard(low: &PairField, kernel: &StepKernel) -> Result<PairField> {
    let half = 0.5 * kernel.tau;
    let fu = kernel.f_of(&low.u)?;
    let rhs_v = {
        let mut v = low.v.clone();
        v.axpy(half, &fu)?;
        v
    };
    let rotated = kernel.group.apply(&PairField::new(low.u.clone(), rhs_v)?)?;
    let f_next = kernel.f_of(&rotated.u)?;
    let mut v = rotated.v;
    v.axpy(half, &f_next)?;
    PairField::new(rotated.u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{inverse_transform, ModeIndex};
    use crate::waveop::apply_group;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn smooth_pair(n: usize) -> PairField {
        let u = SpectralField::from_fn(1, n, true, |k| match k.0[0] {
            1 => Complex64::new(0.3, -0.2),
            -1 => Complex64::new(0.3, 0.2),
            2 => Complex64::new(0.05, 0.1),
            -2 => Complex64::new(0.05, -0.1),
            0 => Complex64::new(0.1, 0.0),
            _ => Complex64::new(0.0, 0.0),
        });
        let v = SpectralField::from_fn(1, n, true, |k| match k.0[0] {
            1 => Complex64::new(0.0, 0.4),
            -1 => Complex64::new(0.0, -0.4),
            _ => Complex64::new(0.0, 0.0),
        });
        PairField::new(u, v).unwrap()
    }

    fn max_dev(a: &PairField, b: &PairField) -> f64 {
        a.sub(b).unwrap().max_abs()
    }

    #[test]
    fn h_of_constant_state() {
        let nl = Nonlinearity::sine(40.0, 1.0).unwrap();
        let mut u = SpectralField::zeros(1, 8);
        u.set(ModeIndex::d1(0), Complex64::new(0.3, 0.0)).unwrap();
        let w = PairField::new(u, SpectralField::zeros(1, 8)).unwrap();
        let h = h_of(&w, &nl).unwrap();
        assert!((h.u.get(ModeIndex::d1(0)).re + nl.f(0.3)).abs() < 1e-13);
        assert!(h.v.max_abs() < 1e-14);
    }

    #[test]
    fn h_of_with_constant_derivative() {
        // g = 0 gives f(u) = m u, f' ≡ m, so the second component is m v.
        let nl = Nonlinearity::sine(0.0, 2.5).unwrap();
        let w = smooth_pair(8);
        let h = h_of(&w, &nl).unwrap();
        assert!(
            max_dev(
                &PairField::new(w.u.scaled(-2.5), w.v.scaled(2.5)).unwrap(),
                &h
            ) < 1e-13
        );
    }

    #[test]
    fn free_nonlinearity_reduces_to_group() {
        let nl = Nonlinearity::linear(1.0).unwrap();
        let w = smooth_pair(8);
        let k = StepKernel::new(1, 8, 0.01, nl).unwrap();
        let g = apply_group(&w, 0.01, 1.0).unwrap();
        for step in [step_hr_lri, step_lie, step_strang, step_deuflhard] {
            assert!(max_dev(&step(&w, &k).unwrap(), &g) < 1e-15);
        }
    }

    #[test]
    fn zero_state_is_fixed() {
        let nl = Nonlinearity::sine(40.0, 1.0).unwrap();
        let k = StepKernel::new(2, 4, 0.05, nl).unwrap();
        let mut w = PairField::zeros(2, 4);
        for _ in 0..5 {
            w = step_hr_lri(&w, &k).unwrap();
        }
        assert_eq!(w.max_abs(), 0.0);
    }

    #[test]
    fn strang_is_time_reversible() {
        let nl = Nonlinearity::sine(4.0, 1.0).unwrap();
        let w = smooth_pair(16);
        let fwd = StepKernel::new(1, 16, 0.02, nl).unwrap();
        let bwd = StepKernel::new(1, 16, -0.02, nl).unwrap();
        let back = step_strang(&step_strang(&w, &fwd).unwrap(), &bwd).unwrap();
        assert!(max_dev(&back, &w) < 1e-10);
    }

    #[test]
    fn deuflhard_matches_impulse_form() {
        // With the linear flow taken exactly, the Deuflhard update is the
        // kick-drift-kick map.
        let nl = Nonlinearity::cubic(1.0, 1.0).unwrap();
        let w = smooth_pair(16);
        let k = StepKernel::new(1, 16, 0.01, nl).unwrap();
        assert!(
            max_dev(
                &step_deuflhard(&w, &k).unwrap(),
                &step_strang(&w, &k).unwrap()
            ) < 1e-14
        );
    }

    #[test]
    fn steps_keep_real_fields() {
        let nl = Nonlinearity::sine(40.0, 1.0).unwrap();
        let mut w = smooth_pair(16);
        let k = StepKernel::new(1, 16, 1.0 / 64.0, nl).unwrap();
        for _ in 0..10 {
            w = step_hr_lri(&w, &k).unwrap();
        }
        assert!(w.u.hermitian_defect() < 1e-11);
        assert!(w.v.hermitian_defect() < 1e-11);
        let s = inverse_transform(&w.u).unwrap();
        assert!(s.values().iter().all(|x| x.is_finite()));
    }

    #[test]
    fn negative_step_rejected_for_filter() {
        let nl = Nonlinearity::sine(1.0, 1.0).unwrap();
        let k = StepKernel::new(1, 4, -0.1, nl).unwrap();
        assert!(step_hr_lri(&PairField::zeros(1, 4), &k).is_err());
        assert!(StepKernel::new(1, 4, 0.0, nl).is_err());
        let _ = PI;
    }
}
