//! Convergence studies: reference solutions, `L² × H⁻¹` errors, sweeps
//! under `τ = ratio / N`, slope fits, Gibbs overshoot and CSV output.

mod csv;
mod metrics;
mod reference;

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub use csv::{parse_csv, read_csv, to_csv_string, write_csv, CSV_HEADER};
pub use metrics::{compute_error, fit_slope_xy, overshoot, overshoot_on_grid};
pub use reference::Reference;

use crate::error::{invalid, Error, Result};
use crate::integrate::{alpha_bandwidth, run, Method, RunOptions, SchemeConfig, Trajectory};
use crate::model::{InitialData, InitialProfile, Nonlinearity};

/// The continuous problem.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub dim: usize,
    pub nonlinearity: Nonlinearity,
    pub initial: InitialData,
    pub t_final: f64,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        crate::spectral::field::check_dim(self.dim)?;
        if self.initial.dim() != self.dim {
            return Err(Error::DimMismatch(self.initial.dim(), self.dim));
        }
        self.initial.validate()?;
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(invalid(format!("T must be positive, got {}", self.t_final)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceSpec {
    pub n_ref: usize,
    /// Recovery exponent of the reference. `None` uses the exponent of the
    /// method under test, or `1 + 1/d` for the baselines.
    pub alpha_ref: Option<f64>,
    /// Required `n_ref / max(N)`; 4 unless a study deliberately uses a
    /// closer reference.
    pub min_ratio: usize,
}

impl ReferenceSpec {
    pub fn new(n_ref: usize) -> Self {
        ReferenceSpec {
            n_ref,
            alpha_ref: None,
            min_ratio: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub problem: ProblemSpec,
    pub sweep: Vec<usize>,
    /// `τ = tau_ratio / N`.
    pub tau_ratio: f64,
    pub methods: Vec<Method>,
    pub reference: ReferenceSpec,
    /// Overrides the seed of random initial data.
    pub seed: Option<u64>,
    /// Worker threads; `0` means one per available core.
    pub threads: usize,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.problem.validate()?;
        if self.sweep.is_empty() || self.methods.is_empty() {
            return Err(invalid("a sweep needs at least one N and one method"));
        }
        for &n in self.sweep.iter().chain([&self.reference.n_ref]) {
            if n == 0 || !n.is_power_of_two() {
                return Err(Error::NotPowerOfTwo(n));
            }
        }
        let max_n = *self.sweep.iter().max().unwrap();
        let ratio = self.reference.min_ratio.max(1);
        if self.reference.n_ref < ratio * max_n {
            return Err(invalid(format!(
                "reference bandwidth {} must be at least {ratio} x {max_n}",
                self.reference.n_ref
            )));
        }
        if let Some(a) = self.reference.alpha_ref {
            if !(a >= 1.0 && a.is_finite()) {
                return Err(invalid(format!("reference alpha must be >= 1, got {a}")));
            }
        }
        if !(self.tau_ratio > 0.0 && self.tau_ratio.is_finite()) {
            return Err(invalid(format!(
                "tau ratio must be positive, got {}",
                self.tau_ratio
            )));
        }
        for m in &self.methods {
            m.validate()?;
        }
        for &n in self.sweep.iter().chain([&self.reference.n_ref]) {
            self.config(Method::Strang, n).validate()?;
        }
        Ok(())
    }

    pub fn tau(&self, n: usize) -> f64 {
        self.tau_ratio / n as f64
    }

    pub fn config(&self, method: Method, n: usize) -> SchemeConfig {
        SchemeConfig {
            method,
            n,
            tau: self.tau(n),
            t_final: self.problem.t_final,
            nonlinearity: self.problem.nonlinearity,
        }
    }

    pub fn alpha_ref(&self, method: Method) -> f64 {
        self.reference.alpha_ref.unwrap_or(match method {
            Method::HrLri { alpha } => alpha,
            _ => 1.0 + 1.0 / self.problem.dim as f64,
        })
    }

    fn initial(&self) -> InitialData {
        match self.seed {
            Some(s) => self.problem.initial.clone().with_seed(s),
            None => self.problem.initial.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunFlag {
    Ok,
    Blowup,
}

impl fmt::Display for RunFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunFlag::Ok => "ok",
            RunFlag::Blowup => "blowup",
        })
    }
}

/// One row of a convergence table. Blown-up runs carry `err0 = NaN`.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorRecord {
    pub method: String,
    pub dim: usize,
    pub n: usize,
    pub alpha: f64,
    pub tau: f64,
    pub err0: f64,
    pub wall_seconds: f64,
    pub flag: RunFlag,
}

impl ErrorRecord {
    pub fn is_ok(&self) -> bool {
        self.flag == RunFlag::Ok
    }

    /// `(method, alpha)` identifies one curve.
    pub fn series_key(&self) -> (String, f64) {
        (self.method.clone(), self.alpha)
    }

    pub fn label(&self) -> String {
        if self.method == "hrlri" {
            format!("hrlri(alpha={})", self.alpha)
        } else {
            self.method.clone()
        }
    }
}

/// Records grouped by `(method, alpha)`, in order of first appearance.
pub fn group_series(records: &[ErrorRecord]) -> Vec<Vec<ErrorRecord>> {
    let mut groups: Vec<Vec<ErrorRecord>> = Vec::new();
    for r in records {
        match groups
            .iter_mut()
            .find(|g| g[0].series_key() == r.series_key())
        {
            Some(g) => g.push(r.clone()),
            None => groups.push(vec![r.clone()]),
        }
    }
    groups
}

/// Least-squares slope of `log err0` against `log τ` over the non-flagged
/// records of one series (at least three).
pub fn fit_slope(records: &[ErrorRecord]) -> Result<f64> {
    let ok: Vec<&ErrorRecord> = records.iter().filter(|r| r.is_ok()).collect();
    if ok.len() < 3 {
        return Err(invalid(format!(
            "slope fit needs 3 records, got {}",
            ok.len()
        )));
    }
    let taus: Vec<f64> = ok.iter().map(|r| r.tau).collect();
    let errs: Vec<f64> = ok.iter().map(|r| r.err0).collect();
    fit_slope_xy(&taus, &errs)
}

/// Shared state of one convergence experiment: the initial-data profile and
/// the reference solution.
#[derive(Debug)]
pub struct Study {
    spec: ExperimentSpec,
    profile: InitialProfile,
    reference: Reference,
}

impl Study {
    pub fn prepare(spec: &ExperimentSpec) -> Result<Self> {
        spec.validate()?;
        let n_ref = spec.reference.n_ref;
        let cap = spec
            .methods
            .iter()
            .map(|m| alpha_bandwidth(n_ref, spec.alpha_ref(*m)))
            .max()
            .unwrap_or(n_ref);
        let profile = InitialProfile::prepare(&spec.initial(), cap)?;
        let mut reference =
            Reference::compute(&spec.problem, profile.clone(), n_ref, spec.tau(n_ref))?;
        for m in &spec.methods {
            reference.prepare_alpha(spec.alpha_ref(*m))?;
        }
        Ok(Study {
            spec: spec.clone(),
            profile,
            reference,
        })
    }

    pub fn spec(&self) -> &ExperimentSpec {
        &self.spec
    }

    pub fn profile(&self) -> &InitialProfile {
        &self.profile
    }

    pub fn reference(&self) -> &Reference {
        &self.reference
    }

    /// Runs one `(method, N)` point and measures it against the reference.
    pub fn run_case(&self, method: Method, n: usize) -> Result<(ErrorRecord, Trajectory)> {
        let cfg = self.spec.config(method, n);
        let traj = run(&cfg, &self.profile, &RunOptions::default())?;
        let (err0, flag) = if traj.blew_up() {
            (f64::NAN, RunFlag::Blowup)
        } else {
            (
                self.reference
                    .error(&traj.solution()?, self.spec.alpha_ref(method))?,
                RunFlag::Ok,
            )
        };
        let rec = ErrorRecord {
            method: method.name().to_string(),
            dim: self.spec.problem.dim,
            n,
            alpha: method.alpha(),
            tau: cfg.tau,
            err0,
            wall_seconds: traj.wall_seconds,
            flag,
        };
        Ok((rec, traj))
    }

    /// Every `(method, N)` pair, ordered by method list then ascending `N`.
    pub fn run_all(&self) -> Result<Vec<ErrorRecord>> {
        let mut sweep = self.spec.sweep.clone();
        sweep.sort_unstable();
        sweep.dedup();
        let cases: Vec<(Method, usize)> = self
            .spec
            .methods
            .iter()
            .flat_map(|m| sweep.iter().map(move |n| (*m, *n)))
            .collect();
        let threads = match self.spec.threads {
            0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
            t => t,
        }
        .min(cases.len());
        let slots: Mutex<Vec<Option<Result<ErrorRecord>>>> =
            Mutex::new((0..cases.len()).map(|_| None).collect());
        let next = AtomicUsize::new(0);
        let work = || loop {
            let i = next.fetch_add(1, Ordering::Relaxed);
            let Some(&(m, n)) = cases.get(i) else { break };
            let res = self.run_case(m, n).map(|(r, _)| r);
            slots.lock().unwrap()[i] = Some(res);
        };
        if threads <= 1 {
            work();
        } else {
            std::thread::scope(|s| {
                for _ in 0..threads {
                    s.spawn(work);
                }
            });
        }
        slots
            .into_inner()
            .unwrap()
            .into_iter()
            .map(|r| r.expect("every case ran"))
            .collect()
    }
}

/// Reference first, then every `(method, N)` run.
pub fn run_convergence(spec: &ExperimentSpec) -> Result<Vec<ErrorRecord>> {
    Study::prepare(spec)?.run_all()
}

/// Temporal study at fixed `N`: every `τ` in `taus` against the same method
/// run with `tau_ref`.
pub fn temporal_convergence(
    problem: &ProblemSpec,
    method: Method,
    n: usize,
    taus: &[f64],
    tau_ref: f64,
) -> Result<Vec<ErrorRecord>> {
    problem.validate()?;
    let cfg = |tau: f64| SchemeConfig {
        method,
        n,
        tau,
        t_final: problem.t_final,
        nonlinearity: problem.nonlinearity,
    };
    let profile = InitialProfile::prepare(&problem.initial, cfg(tau_ref).high_bandwidth())?;
    let reference = run(&cfg(tau_ref), &profile, &RunOptions::default())?;
    if let Some((step, time)) = reference.blowup {
        return Err(Error::BlowUp { step, time });
    }
    let reference = reference.solution()?;
    taus.iter()
        .map(|&tau| {
            let traj = run(&cfg(tau), &profile, &RunOptions::default())?;
            let (err0, flag) = if traj.blew_up() {
                (f64::NAN, RunFlag::Blowup)
            } else {
                (compute_error(&traj.solution()?, &reference)?, RunFlag::Ok)
            };
            Ok(ErrorRecord {
                method: method.name().to_string(),
                dim: problem.dim,
                n,
                alpha: method.alpha(),
                tau,
                err0,
                wall_seconds: traj.wall_seconds,
                flag,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(methods: Vec<Method>, sweep: Vec<usize>) -> ExperimentSpec {
        ExperimentSpec {
            problem: ProblemSpec {
                dim: 1,
                nonlinearity: Nonlinearity::sine(40.0, 1.0).unwrap(),
                initial: InitialData::sine_gordon_1d(),
                t_final: 0.25,
            },
            sweep,
            tau_ratio: 0.25,
            methods,
            reference: ReferenceSpec::new(64),
            seed: None,
            threads: 1,
        }
    }

    #[test]
    fn single_case_single_record() {
        let recs = run_convergence(&spec(vec![Method::HrLri { alpha: 2.0 }], vec![16])).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recs[0].is_ok() && recs[0].err0 > 0.0);
        assert_eq!(recs[0].tau, 0.25 / 16.0);
    }

    #[test]
    fn reference_against_itself() {
        let study = Study::prepare(&spec(vec![Method::HrLri { alpha: 2.0 }], vec![16])).unwrap();
        let (rec, _) = study.run_case(Method::HrLri { alpha: 2.0 }, 64).unwrap();
        assert!(rec.err0 < 1e-12, "{}", rec.err0);
    }

    #[test]
    fn validation() {
        let mut s = spec(vec![Method::Strang], vec![32]);
        assert!(s.validate().is_err()); // 64 < 4 x 32
        s.reference.min_ratio = 2;
        s.validate().unwrap();
        s.reference.min_ratio = 4;
        s.sweep = vec![12];
        assert!(s.validate().is_err());
        s.sweep = vec![16];
        s.validate().unwrap();
        s.tau_ratio = 0.3;
        assert!(s.validate().is_err());
        assert_eq!(spec(vec![Method::Lie], vec![8]).alpha_ref(Method::Lie), 2.0);
    }

    #[test]
    fn ordering_and_threads_do_not_change_results() {
        let methods = vec![Method::Strang, Method::HrLri { alpha: 2.0 }];
        let mut s = spec(methods, vec![16, 8]);
        let a = run_convergence(&s).unwrap();
        s.threads = 3;
        let b = run_convergence(&s).unwrap();
        let key = |r: &ErrorRecord| (r.method.clone(), r.n, r.err0.to_bits());
        assert_eq!(
            a.iter().map(key).collect::<Vec<_>>(),
            b.iter().map(key).collect::<Vec<_>>()
        );
        assert_eq!(
            a.iter()
                .map(|r| (r.method.as_str(), r.n))
                .collect::<Vec<_>>(),
            vec![("strang", 8), ("strang", 16), ("hrlri", 8), ("hrlri", 16)]
        );
        assert_eq!(group_series(&a).len(), 2);
    }

    #[test]
    fn slope_needs_three_ok_records() {
        let mk = |tau: f64, flag| ErrorRecord {
            method: "lie".into(),
            dim: 1,
            n: 8,
            alpha: 1.0,
            tau,
            err0: if flag == RunFlag::Ok { tau } else { f64::NAN },
            wall_seconds: 0.0,
            flag,
        };
        let recs = vec![
            mk(0.1, RunFlag::Ok),
            mk(0.05, RunFlag::Ok),
            mk(0.2, RunFlag::Blowup),
        ];
        assert!(fit_slope(&recs).is_err());
        let recs = vec![
            mk(0.1, RunFlag::Ok),
            mk(0.05, RunFlag::Ok),
            mk(0.025, RunFlag::Ok),
            mk(0.2, RunFlag::Blowup),
        ];
        assert!((fit_slope(&recs).unwrap() - 1.0).abs() < 1e-12);
    }
}
