//! Time integrators for `U' = LU + F(U)`.
//!
//! [`Method::HrLri`] advances the low band `Π_N U` with the filtered
//! low-regularity step
//!
//! ```text
//! Π_N U^{n+1} = e^{τL} Π_N U^n + τ e^{τL} I_N F(Π_N U^n) + φ_τ(L) H(Π_N U^n)
//! H(U)        = (-I_N f(u), Π_N(I_N f'(u) · v))
//! ```
//!
//! while the band `(N, N^α]` of the initial data is only ever propagated by
//! the free group, at output times. `α = 1` disables the recovery. Lie,
//! Strang and Deuflhard baselines share the same linear part and work on the
//! low band alone.

mod solver;
mod step;

use std::fmt;
use std::str::FromStr;

pub use solver::{
    assemble_solution, recover_high, run, RunOptions, Snapshot, Solver, SolverState, Trajectory,
    BLOWUP_THRESHOLD,
};
pub use step::{h_of, step_deuflhard, step_hr_lri, step_lie, step_strang, StepKernel};

use crate::error::{invalid, Error, Result};
use crate::model::Nonlinearity;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    HrLri { alpha: f64 },
    Lie,
    Strang,
    Deuflhard,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::HrLri { .. } => "hrlri",
            Method::Lie => "lie",
            Method::Strang => "strang",
            Method::Deuflhard => "deuflhard",
        }
    }

    /// Recovery exponent; baselines carry no high band and report 1.
    pub fn alpha(&self) -> f64 {
        match self {
            Method::HrLri { alpha } => *alpha,
            _ => 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Method::HrLri { alpha } if !(*alpha >= 1.0 && alpha.is_finite()) => {
                Err(invalid(format!("alpha must be >= 1, got {alpha}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::HrLri { alpha } => write!(f, "hrlri:alpha={alpha}"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    /// Accepts `hrlri`, `hrlri:alpha=<a>`, `hrlri:<a>`, `lie`, `strang`,
    /// `deuflhard`. A bare `hrlri` uses `α = 2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s.as_str(), None),
        };
        let method = match (name, arg) {
            ("hrlri" | "hr-lri", None) => Method::HrLri { alpha: 2.0 },
            ("hrlri" | "hr-lri", Some(a)) => {
                let a = a.strip_prefix("alpha=").unwrap_or(a);
                let alpha = a
                    .parse::<f64>()
                    .map_err(|_| invalid(format!("bad alpha '{a}'")))?;
                Method::HrLri { alpha }
            }
            ("lie", None) => Method::Lie,
            ("strang", None) => Method::Strang,
            ("deuflhard" | "d79", None) => Method::Deuflhard,
            _ => return Err(invalid(format!("unknown method '{s}'"))),
        };
        method.validate()?;
        Ok(method)
    }
}

/// Smallest power of two `≥ n^α` (with a relative slack of 1e-9 so exact
/// powers are not bumped up by rounding).
pub fn alpha_bandwidth(n: usize, alpha: f64) -> usize {
    let target = (n as f64).powf(alpha) * (1.0 - 1e-9);
    let mut m = n.next_power_of_two().max(1);
    while (m as f64) < target {
        m *= 2;
    }
    m.max(n)
}

/// One fully specified run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig {
    pub method: Method,
    pub n: usize,
    pub tau: f64,
    pub t_final: f64,
    pub nonlinearity: Nonlinearity,
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        self.method.validate()?;
        if self.n == 0 || !self.n.is_power_of_two() {
            return Err(invalid(format!("N must be a power of two, got {}", self.n)));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(invalid(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(invalid(format!("T must be positive, got {}", self.t_final)));
        }
        self.steps().map(|_| ())
    }

    /// `M = T / τ`, which must be an integer to within 1e-9.
    pub fn steps(&self) -> Result<usize> {
        let ratio = self.t_final / self.tau;
        let m = ratio.round();
        if m < 1.0 || (ratio - m).abs() > 1e-9 * m.max(1.0) {
            return Err(invalid(format!(
                "T/tau = {ratio} is not an integer step count"
            )));
        }
        Ok(m as usize)
    }

    /// `N^α` rounded up to a power of two (equal to `N` for baselines).
    pub fn high_bandwidth(&self) -> usize {
        alpha_bandwidth(self.n, self.method.alpha())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_bandwidth_rounding() {
        assert_eq!(alpha_bandwidth(32, 1.0), 32);
        assert_eq!(alpha_bandwidth(32, 2.0), 1024);
        assert_eq!(alpha_bandwidth(16, 1.5), 64);
        assert_eq!(alpha_bandwidth(32, 1.5), 256);
        assert_eq!(alpha_bandwidth(64, 1.5), 512);
        assert_eq!(alpha_bandwidth(128, 1.5), 2048);
    }

    #[test]
    fn method_parsing() {
        assert_eq!(
            "hrlri:alpha=1.5".parse::<Method>().unwrap(),
            Method::HrLri { alpha: 1.5 }
        );
        assert_eq!(
            "HRLRI:2".parse::<Method>().unwrap(),
            Method::HrLri { alpha: 2.0 }
        );
        assert_eq!("strang".parse::<Method>().unwrap(), Method::Strang);
        assert!("hrlri:alpha=0.5".parse::<Method>().is_err());
        assert!("rk4".parse::<Method>().is_err());
        let m = Method::HrLri { alpha: 2.0 };
        assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
    }

    #[test]
    fn step_count_must_be_integral() {
        let nl = Nonlinearity::sine(1.0, 1.0).unwrap();
        let mut cfg = SchemeConfig {
            method: Method::Strang,
            n: 8,
            tau: 0.1,
            t_final: 1.0,
            nonlinearity: nl,
        };
        assert_eq!(cfg.steps().unwrap(), 10);
        cfg.t_final = 1.05;
        assert!(cfg.steps().is_err());
        cfg.t_final = 0.1;
        assert_eq!(cfg.steps().unwrap(), 1);
        cfg.n = 12;
        assert!(cfg.validate().is_err());
    }
}
