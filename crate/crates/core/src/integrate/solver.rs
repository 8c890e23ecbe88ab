use std::time::Instant;

use super::step::{step_deuflhard, step_hr_lri, step_lie, step_strang, StepKernel};
use super::{Method, SchemeConfig};
use crate::error::{invalid, Error, Result};
use crate::model::InitialProfile;
use crate::spectral::{band, embed_pair, PairField};
use crate::waveop::apply_group;

/// Any coefficient beyond this magnitude counts as a blow-up.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

/// Integrator state after `step` steps.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub step: usize,
    pub t: f64,
    pub low: PairField,
    /// `Π_{(N, N^α]} U(0)` stored at bandwidth `N^α`; `None` when `N^α = N`.
    pub high0: Option<PairField>,
}

/// `e^{tL} Π_{(N, N^α]} U(0)` at the state time.
pub fn recover_high(state: &SolverState, m: f64) -> Result<Option<PairField>> {
    state
        .high0
        .as_ref()
        .map(|h| apply_group(h, state.t, m))
        .transpose()
}

/// Low band plus recovered high band, at bandwidth `N^α`.
pub fn assemble_solution(state: &SolverState, m: f64) -> Result<PairField> {
    match recover_high(state, m)? {
        None => Ok(state.low.clone()),
        Some(high) => {
            let mut out = embed_pair(&state.low, high.bandwidth())?;
            out.axpy(1.0, &high)?;
            Ok(out)
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solver {
    cfg: SchemeConfig,
    kernel: StepKernel,
    state: SolverState,
    total_steps: usize,
}

impl Solver {
    /// Builds the initial state. With `low_only` the high band is not
    /// materialized, which is what a reference run of the low band needs.
    pub fn new(cfg: SchemeConfig, profile: &InitialProfile, low_only: bool) -> Result<Self> {
        cfg.validate()?;
        let dim = profile.dim();
        let n = cfg.n;
        let n_alpha = cfg.high_bandwidth();
        let low = profile.materialize(n)?;
        let high0 = if n_alpha > n && !low_only {
            let full = profile.materialize(n_alpha)?;
            Some(PairField::new(
                band(&full.u, n, n_alpha)?,
                band(&full.v, n, n_alpha)?,
            )?)
        } else {
            None
        };
        let kernel = StepKernel::new(dim, n, cfg.tau, cfg.nonlinearity)?;
        Ok(Solver {
            cfg,
            kernel,
            state: SolverState {
                step: 0,
                t: 0.0,
                low,
                high0,
            },
            total_steps: cfg.steps()?,
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn into_state(self) -> SolverState {
        self.state
    }

    pub fn total_steps(&self) -> usize {
        self.total_steps
    }

    pub fn is_done(&self) -> bool {
        self.state.step >= self.total_steps
    }

    /// One step. On blow-up the state is left at the last good step and
    /// [`Error::BlowUp`] is returned.
    pub fn step(&mut self) -> Result<()> {
        let next_step = self.state.step + 1;
        let next_t = next_step as f64 * self.cfg.tau;
        let blowup = || Error::BlowUp {
            step: next_step,
            time: next_t,
        };
        let low = &self.state.low;
        let next = match self.cfg.method {
            Method::HrLri { .. } => step_hr_lri(low, &self.kernel),
            Method::Lie => step_lie(low, &self.kernel),
            Method::Strang => step_strang(low, &self.kernel),
            Method::Deuflhard => step_deuflhard(low, &self.kernel),
        };
        let next = match next {
            Ok(w) => w,
            Err(Error::NonFinite) => return Err(blowup()),
            Err(e) => return Err(e),
        };
        if !next.all_finite() || next.max_abs() > BLOWUP_THRESHOLD {
            return Err(blowup());
        }
        self.state.low = next;
        self.state.step = next_step;
        self.state.t = next_t;
        Ok(())
    }

    pub fn solution(&self) -> Result<PairField> {
        assemble_solution(&self.state, self.cfg.nonlinearity.m())
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Output times; each must be a multiple of `τ` in `[0, T]`.
    pub snapshot_times: Vec<f64>,
    /// Skip the high band entirely (see [`Solver::new`]).
    pub low_only: bool,
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub time: f64,
    pub field: PairField,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub config: SchemeConfig,
    pub snapshots: Vec<Snapshot>,
    /// Last good state (the final one unless the run blew up).
    pub state: SolverState,
    pub steps_taken: usize,
    /// Time spent in the stepping loop only.
    pub wall_seconds: f64,
    /// `(step, time)` of the first step that blew up.
    pub blowup: Option<(usize, f64)>,
}

impl Trajectory {
    pub fn solution(&self) -> Result<PairField> {
        assemble_solution(&self.state, self.config.nonlinearity.m())
    }

    pub fn blew_up(&self) -> bool {
        self.blowup.is_some()
    }
}

fn snapshot_steps(cfg: &SchemeConfig, total: usize, times: &[f64]) -> Result<Vec<usize>> {
    let tol = 1e-9 * cfg.t_final.max(1.0);
    times
        .iter()
        .map(|&t| {
            let n = (t / cfg.tau).round();
            if !t.is_finite() || n < 0.0 || n as usize > total || (t - n * cfg.tau).abs() > tol {
                Err(invalid(format!(
                    "snapshot time {t} is not a step multiple in [0, {}]",
                    cfg.t_final
                )))
            } else {
                Ok(n as usize)
            }
        })
        .collect()
}

/// Integrates `cfg` from `profile` to `T`. A blow-up is not an error: the
/// trajectory is returned with [`Trajectory::blowup`] set.
pub fn run(cfg: &SchemeConfig, profile: &InitialProfile, opts: &RunOptions) -> Result<Trajectory> {
    let mut solver = Solver::new(*cfg, profile, opts.low_only)?;
    let total = solver.total_steps();
    let wanted = snapshot_steps(cfg, total, &opts.snapshot_times)?;
    let mut snapshots = Vec::new();
    let take = |solver: &Solver, snapshots: &mut Vec<Snapshot>| -> Result<()> {
        for (i, &s) in wanted.iter().enumerate() {
            if s == solver.state().step {
                snapshots.push(Snapshot {
                    time: opts.snapshot_times[i],
                    field: solver.solution()?,
                });
            }
        }
        Ok(())
    };
    take(&solver, &mut snapshots)?;

    let mut elapsed = 0.0;
    let mut blowup = None;
    while !solver.is_done() {
        let start = Instant::now();
        let res = solver.step();
        elapsed += start.elapsed().as_secs_f64();
        match res {
            Ok(()) => take(&solver, &mut snapshots)?,
            Err(Error::BlowUp { step, time }) => {
                blowup = Some((step, time));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let steps_taken = solver.state().step;
    Ok(Trajectory {
        config: *cfg,
        snapshots,
        state: solver.into_state(),
        steps_taken,
        wall_seconds: elapsed,
        blowup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{InitialData, Nonlinearity};
    use crate::spectral::{project_pair, ModeIndex, SpectralField};
    use num_complex::Complex64;

    fn cfg(method: Method, n: usize, tau: f64, t: f64, nl: Nonlinearity) -> SchemeConfig {
        SchemeConfig {
            method,
            n,
            tau,
            t_final: t,
            nonlinearity: nl,
        }
    }

    fn dev(a: &PairField, b: &PairField) -> f64 {
        a.sub(b).unwrap().max_abs()
    }

    #[test]
    fn linear_problem_is_exact_up_to_n_alpha() {
        let nl = Nonlinearity::linear(1.0).unwrap();
        let data = InitialData::sine_gordon_1d();
        let profile = InitialProfile::prepare(&data, 1024).unwrap();
        let c = cfg(Method::HrLri { alpha: 2.0 }, 16, 0.05, 1.0, nl);
        let traj = run(&c, &profile, &RunOptions::default()).unwrap();
        let num = traj.solution().unwrap();
        assert_eq!(num.bandwidth(), 256);
        let exact = apply_group(&profile.materialize(256).unwrap(), 1.0, 1.0).unwrap();
        assert!(dev(&num, &exact) < 1e-12);
    }

    #[test]
    fn low_band_does_not_depend_on_alpha() {
        let nl = Nonlinearity::sine(40.0, 1.0).unwrap();
        let profile = InitialProfile::prepare(&InitialData::sine_gordon_1d(), 256).unwrap();
        let a = run(
            &cfg(Method::HrLri { alpha: 1.0 }, 16, 1.0 / 32.0, 0.25, nl),
            &profile,
            &RunOptions::default(),
        )
        .unwrap();
        let b = run(
            &cfg(Method::HrLri { alpha: 2.0 }, 16, 1.0 / 32.0, 0.25, nl),
            &profile,
            &RunOptions::default(),
        )
        .unwrap();
        assert!(a.state.high0.is_none());
        assert_eq!(dev(&a.state.low, &b.state.low), 0.0);
        let full = b.solution().unwrap();
        assert_eq!(dev(&project_pair(&full, 16), &a.state.low), 0.0);
    }

    #[test]
    fn high_band_is_orthogonal_to_low_block() {
        let nl = Nonlinearity::sine(1.0, 1.0).unwrap();
        let profile = InitialProfile::prepare(&InitialData::sine_gordon_2d_one(), 64).unwrap();
        let s = Solver::new(
            cfg(Method::HrLri { alpha: 1.5 }, 8, 0.1, 0.1, nl),
            &profile,
            false,
        )
        .unwrap();
        let high = s.state().high0.as_ref().unwrap();
        assert_eq!(high.bandwidth(), 32);
        for idx in 0..high.u.len() {
            if high.u.mode_at(idx).in_block(8) {
                assert_eq!(high.u.coeffs()[idx], Complex64::new(0.0, 0.0));
                assert_eq!(high.v.coeffs()[idx], Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn recovered_high_band_composes() {
        let profile = InitialProfile::prepare(&InitialData::klein_gordon_1d(), 256).unwrap();
        let nl = Nonlinearity::cubic(1.0, 1.0).unwrap();
        let s = Solver::new(
            cfg(Method::HrLri { alpha: 2.0 }, 16, 0.1, 0.1, nl),
            &profile,
            false,
        )
        .unwrap();
        let mut state = s.state().clone();
        state.t = 0.7;
        let direct = recover_high(&state, 1.0).unwrap().unwrap();
        state.t = 0.3;
        let partial = recover_high(&state, 1.0).unwrap().unwrap();
        let composed = apply_group(&partial, 0.4, 1.0).unwrap();
        assert!(
            dev(&direct, &composed) < 1e-11 * direct.max_abs().max(1.0),
            "{}",
            dev(&direct, &composed)
        );
    }

    #[test]
    fn snapshots_land_on_requested_steps() {
        let nl = Nonlinearity::sine(1.0, 1.0).unwrap();
        let profile = InitialProfile::prepare(&InitialData::smooth_sin(1), 8).unwrap();
        let c = cfg(Method::Strang, 8, 0.125, 1.0, nl);
        let opts = RunOptions {
            snapshot_times: vec![0.0, 0.5, 1.0],
            low_only: false,
        };
        let traj = run(&c, &profile, &opts).unwrap();
        let times: Vec<f64> = traj.snapshots.iter().map(|s| s.time).collect();
        assert_eq!(times, vec![0.0, 0.5, 1.0]);
        assert_eq!(
            dev(&traj.snapshots[2].field, &traj.solution().unwrap()),
            0.0
        );
        let bad = RunOptions {
            snapshot_times: vec![0.3],
            low_only: false,
        };
        assert!(run(&c, &profile, &bad).is_err());
    }

    #[test]
    fn blowup_is_flagged() {
        let nl = Nonlinearity::cubic(1.0, 1.0).unwrap();
        let mut u = SpectralField::zeros(1, 4);
        u.set(ModeIndex::d1(0), Complex64::new(50.0, 0.0)).unwrap();
        let data = InitialData::smooth_sin(1);
        let profile = InitialProfile::prepare(&data, 4).unwrap();
        let mut s = Solver::new(cfg(Method::Lie, 4, 0.5, 50.0, nl), &profile, false).unwrap();
        s.state.low = PairField::new(u, SpectralField::zeros(1, 4)).unwrap();
        let mut flagged = None;
        while !s.is_done() {
            if let Err(e) = s.step() {
                flagged = Some(e);
                break;
            }
        }
        assert!(matches!(flagged, Some(Error::BlowUp { .. })));
        assert!(s.state().low.all_finite());
    }

    /// `U' = LU + (0, I_N f(u))` by classical RK4 with many substeps.
    fn rk4_reference(w: &PairField, t: f64, nl: &Nonlinearity, substeps: usize) -> PairField {
        use crate::model::{eval_f_on_grid, Which};
        let m = nl.m();
        let rhs = |w: &PairField| -> PairField {
            let k2 = w.u.mode_sq_norms();
            let mut du = w.v.clone();
            let mut dv = eval_f_on_grid(nl, &w.u, Which::F).unwrap();
            for (i, c) in dv.coeffs_mut().iter_mut().enumerate() {
                let om2 = m + 4.0 * std::f64::consts::PI.powi(2) * k2[i];
                *c -= om2 * w.u.coeffs()[i];
            }
            du.set_hermitian(w.u.is_hermitian());
            dv.set_hermitian(w.u.is_hermitian());
            PairField::new(du, dv).unwrap()
        };
        let h = t / substeps as f64;
        let mut w = w.clone();
        for _ in 0..substeps {
            let k1 = rhs(&w);
            let k2 = rhs(&w.add(&k1.scaled(h / 2.0)).unwrap());
            let k3 = rhs(&w.add(&k2.scaled(h / 2.0)).unwrap());
            let k4 = rhs(&w.add(&k3.scaled(h)).unwrap());
            let mut inc = k1.add(&k4).unwrap();
            inc.axpy(2.0, &k2).unwrap();
            inc.axpy(2.0, &k3).unwrap();
            w.axpy(h / 6.0, &inc).unwrap();
        }
        w
    }

    #[test]
    fn local_error_is_third_order() {
        // Modes ±1 only, with a cubic nonlinearity and N = 4: interpolation
        // is exact at the start of the step.
        let nl = Nonlinearity::cubic(-1.0, 1.0).unwrap();
        let n = 4;
        let mode = |a: f64, b: f64| {
            SpectralField::from_fn(1, n, true, |k| match k.0[0] {
                1 => Complex64::new(a, b),
                -1 => Complex64::new(a, -b),
                _ => Complex64::new(0.0, 0.0),
            })
        };
        let w0 = PairField::new(mode(0.4, 0.1), mode(-0.2, 0.3)).unwrap();
        let local = |tau: f64| {
            let k = StepKernel::new(1, n, tau, nl).unwrap();
            let one = step_hr_lri(&w0, &k).unwrap();
            dev(&one, &rk4_reference(&w0, tau, &nl, 400))
        };
        let (e1, e2) = (local(0.02), local(0.01));
        let ratio = e1 / e2;
        assert!(
            (6.5..=9.5).contains(&ratio),
            "ratio {ratio} ({e1:e}, {e2:e})"
        );
    }
}
