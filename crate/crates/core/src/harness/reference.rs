use num_complex::Complex64;

use super::ProblemSpec;
use crate::error::{invalid, Error, Result};
use crate::integrate::{alpha_bandwidth, run, Method, RunOptions, SchemeConfig};
use crate::model::InitialProfile;
use crate::spectral::{sample_on_grid, ModeIndex, PairField, SpectralField};
use crate::waveop::{group_matrix, omega};

const FOUR_PI_SQ: f64 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;

/// Calls `f` for every mode of `block(outer) \ block(inner)` (`inner = 0`
/// means the whole block).
pub(crate) fn for_each_mode_between(
    dim: usize,
    inner: usize,
    outer: usize,
    mut f: impl FnMut(ModeIndex),
) {
    let (lo_o, hi_o) = (-(outer as i64), outer as i64);
    let (lo_i, hi_i) = (-(inner as i64), inner as i64);
    let inside = |k: i64| inner > 0 && (lo_i..hi_i).contains(&k);
    if dim == 1 {
        for k in lo_o..hi_o {
            if !inside(k) {
                f(ModeIndex::d1(k));
            }
        }
        return;
    }
    for k1 in lo_o..hi_o {
        if inside(k1) {
            for k2 in (lo_o..lo_i).chain(hi_i..hi_o) {
                f(ModeIndex::d2(k1, k2));
            }
        } else {
            for k2 in lo_o..hi_o {
                f(ModeIndex::d2(k1, k2));
            }
        }
    }
}

#[derive(Clone, Debug)]
struct TailTable {
    alpha: f64,
    top: usize,
    /// `suffix[j]` = weighted energy of the free solution on
    /// `block(top) \ block(n_ref · 2^j)`.
    suffix: Vec<f64>,
}

/// Reference solution at `T`, never stored above the reference bandwidth.
///
/// The low band comes from one filtered run at `n_ref`. Since that band does
/// not depend on the recovery exponent, every `α_ref` shares it; modes in
/// `(n_ref, n_ref^α]` are the free evolution of the initial data and are
/// generated on the fly.
#[derive(Clone, Debug)]
pub struct Reference {
    problem: ProblemSpec,
    profile: InitialProfile,
    n_ref: usize,
    tau: f64,
    low: PairField,
    tails: Vec<TailTable>,
}

impl Reference {
    /// Runs the low band at `n_ref` with step `tau`. `profile` must have been
    /// prepared at a cap covering every `n_ref^α` in use.
    pub fn compute(
        problem: &ProblemSpec,
        profile: InitialProfile,
        n_ref: usize,
        tau: f64,
    ) -> Result<Self> {
        problem.validate()?;
        let cfg = SchemeConfig {
            method: Method::HrLri { alpha: 1.0 },
            n: n_ref,
            tau,
            t_final: problem.t_final,
            nonlinearity: problem.nonlinearity,
        };
        let traj = run(
            &cfg,
            &profile,
            &RunOptions {
                snapshot_times: Vec::new(),
                low_only: true,
            },
        )?;
        if let Some((step, time)) = traj.blowup {
            return Err(Error::BlowUp { step, time });
        }
        Ok(Reference {
            problem: problem.clone(),
            profile,
            n_ref,
            tau,
            low: traj.state.low,
            tails: Vec::new(),
        })
    }

    pub fn bandwidth(&self) -> usize {
        self.n_ref
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn low(&self) -> &PairField {
        &self.low
    }

    /// `n_ref^α` rounded up to a power of two.
    pub fn top(&self, alpha: f64) -> usize {
        alpha_bandwidth(self.n_ref, alpha)
    }

    /// `e^{TL} U(0)` at mode `k`.
    pub fn free_mode(&self, k: ModeIndex) -> (Complex64, Complex64) {
        let (u, v) = self.profile.coeff(k);
        let g = group_matrix(
            omega(k.sq_norm() as f64, self.problem.nonlinearity.m()),
            self.problem.t_final,
        );
        (g[0][0] * u + g[0][1] * v, g[1][0] * u + g[1][1] * v)
    }

    fn weighted(&self, k: ModeIndex, du: Complex64, dv: Complex64) -> f64 {
        du.norm_sqr() + dv.norm_sqr() / (1.0 + FOUR_PI_SQ * k.sq_norm() as f64)
    }

    /// Precomputes the tail energies for `α`; required before
    /// [`Reference::error`] with that exponent.
    pub fn prepare_alpha(&mut self, alpha: f64) -> Result<()> {
        if !(alpha >= 1.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha must be >= 1, got {alpha}")));
        }
        if self.tails.iter().any(|t| t.alpha == alpha) {
            return Ok(());
        }
        let top = self.top(alpha);
        let dim = self.problem.dim;
        let mut shells = Vec::new();
        let mut k = self.n_ref;
        while k < top {
            let mut s = 0.0;
            for_each_mode_between(dim, k, 2 * k, |mode| {
                let (u, v) = self.free_mode(mode);
                s += self.weighted(mode, u, v);
            });
            shells.push(s);
            k *= 2;
        }
        let mut suffix = vec![0.0; shells.len() + 1];
        for j in (0..shells.len()).rev() {
            suffix[j] = suffix[j + 1] + shells[j];
        }
        self.tails.push(TailTable { alpha, top, suffix });
        Ok(())
    }

    fn table(&self, alpha: f64) -> Result<&TailTable> {
        self.tails
            .iter()
            .find(|t| t.alpha == alpha)
            .ok_or_else(|| invalid(format!("reference tail for alpha={alpha} not prepared")))
    }

    /// `‖num - ref‖₀` where `ref` carries modes up to `n_ref^α`. Same value
    /// as [`super::compute_error`] against the materialized reference.
    pub fn error(&self, num: &PairField, alpha: f64) -> Result<f64> {
        if num.dim() != self.problem.dim {
            return Err(Error::DimMismatch(num.dim(), self.problem.dim));
        }
        let table = self.table(alpha)?;
        let mut sum = 0.0;
        // modes of the reference low band
        for idx in 0..self.low.u.len() {
            let k = self.low.u.mode_at(idx);
            let du = num.u.get(k) - self.low.u.coeffs()[idx];
            let dv = num.v.get(k) - self.low.v.coeffs()[idx];
            sum += self.weighted(k, du, dv);
        }
        // modes of num outside it
        let kn = num.bandwidth();
        if kn > self.n_ref {
            for idx in 0..num.u.len() {
                let k = num.u.mode_at(idx);
                if k.in_block(self.n_ref) {
                    continue;
                }
                let (ru, rv) = if k.in_block(table.top) {
                    self.free_mode(k)
                } else {
                    (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
                };
                sum += self.weighted(k, num.u.coeffs()[idx] - ru, num.v.coeffs()[idx] - rv);
            }
        }
        // reference modes num does not carry
        let covered = kn.max(self.n_ref);
        if covered < table.top {
            sum += table.suffix[(covered / self.n_ref).trailing_zeros() as usize];
        }
        Ok(sum.sqrt())
    }

    /// The reference at bandwidth `n` (`n_ref ≤ n ≤ n_ref^α`).
    pub fn field(&self, alpha: f64, n: usize) -> Result<PairField> {
        let top = self.top(alpha);
        if n < self.n_ref || n > top || !n.is_power_of_two() {
            return Err(invalid(format!(
                "reference bandwidth must be a power of two in [{}, {top}], got {n}",
                self.n_ref
            )));
        }
        let dim = self.problem.dim;
        let mut u = SpectralField::zeros(dim, n);
        let mut v = SpectralField::zeros(dim, n);
        for idx in 0..u.len() {
            let k = u.mode_at(idx);
            let (a, b) = if k.in_block(self.n_ref) {
                (self.low.u.get(k), self.low.v.get(k))
            } else {
                self.free_mode(k)
            };
            u.coeffs_mut()[idx] = a;
            v.coeffs_mut()[idx] = b;
        }
        u.set_hermitian(self.low.u.is_hermitian());
        v.set_hermitian(self.low.v.is_hermitian());
        PairField::new(u, v)
    }

    /// Exact point values of the reference `u` (all modes up to
    /// `n_ref^α`) on the uniform grid with `points` nodes per dimension.
    pub fn sample_u(&self, alpha: f64, points: usize) -> Result<Vec<f64>> {
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(points));
        }
        let dim = self.problem.dim;
        let half = points / 2;
        let mut folded = SpectralField::zeros(dim, half);
        let p = points as i64;
        let fold = |k: i64| (k + half as i64).rem_euclid(p) - half as i64;
        let mut add = |k: ModeIndex, c: Complex64| {
            let target = if dim == 1 {
                ModeIndex::d1(fold(k.0[0]))
            } else {
                ModeIndex::d2(fold(k.0[0]), fold(k.0[1]))
            };
            let idx = folded.index_of(target).expect("folded mode in block");
            folded.coeffs_mut()[idx] += c;
        };
        for idx in 0..self.low.u.len() {
            add(self.low.u.mode_at(idx), self.low.u.coeffs()[idx]);
        }
        for_each_mode_between(dim, self.n_ref, self.top(alpha), |k| {
            add(k, self.free_mode(k).0)
        });
        sample_on_grid(&folded, points)
    }
}
