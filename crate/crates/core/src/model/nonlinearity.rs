use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::spectral::{forward_transform, inverse_transform, GridSamples, SpectralField};
use crate::waveop::check_mass;

/// Compiled-in families for `g` in `u_tt - Δu = g(u)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NonlinearityKind {
    /// `g(u) = A sin(u)`
    Sine { amplitude: f64 },
    /// `g(u) = λ u³`
    Cubic { lambda: f64 },
    /// `g(u) = -m u`, so the shifted nonlinearity `f` vanishes identically.
    Linear,
}

/// `g` together with the shift `m > 0`; the integrators work with
/// `f(u) = g(u) + m u` against the linear part `Δ - m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Nonlinearity {
    kind: NonlinearityKind,
    m: f64,
}

/// Which function to interpolate in [`eval_f_on_grid`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    F,
    DF,
}

impl Nonlinearity {
    pub fn new(kind: NonlinearityKind, m: f64) -> Result<Self> {
        check_mass(m)?;
        match kind {
            NonlinearityKind::Sine { amplitude } if !amplitude.is_finite() => {
                Err(invalid("sine amplitude must be finite"))
            }
            NonlinearityKind::Cubic { lambda } if !lambda.is_finite() => {
                Err(invalid("cubic coefficient must be finite"))
            }
            _ => Ok(Nonlinearity { kind, m }),
        }
    }

    pub fn sine(amplitude: f64, m: f64) -> Result<Self> {
        Self::new(NonlinearityKind::Sine { amplitude }, m)
    }

    pub fn cubic(lambda: f64, m: f64) -> Result<Self> {
        Self::new(NonlinearityKind::Cubic { lambda }, m)
    }

    pub fn linear(m: f64) -> Result<Self> {
        Self::new(NonlinearityKind::Linear, m)
    }

    pub fn kind(&self) -> NonlinearityKind {
        self.kind
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// True when `f ≡ 0`.
    pub fn is_free(&self) -> bool {
        matches!(self.kind, NonlinearityKind::Linear)
    }

    pub fn g(&self, u: f64) -> f64 {
        match self.kind {
            NonlinearityKind::Sine { amplitude } => amplitude * u.sin(),
            NonlinearityKind::Cubic { lambda } => lambda * u * u * u,
            NonlinearityKind::Linear => -self.m * u,
        }
    }

    pub fn dg(&self, u: f64) -> f64 {
        match self.kind {
            NonlinearityKind::Sine { amplitude } => amplitude * u.cos(),
            NonlinearityKind::Cubic { lambda } => 3.0 * lambda * u * u,
            NonlinearityKind::Linear => -self.m,
        }
    }

    pub fn d2g(&self, u: f64) -> f64 {
        match self.kind {
            NonlinearityKind::Sine { amplitude } => -amplitude * u.sin(),
            NonlinearityKind::Cubic { lambda } => 6.0 * lambda * u,
            NonlinearityKind::Linear => 0.0,
        }
    }

    pub fn f(&self, u: f64) -> f64 {
        match self.kind {
            NonlinearityKind::Linear => 0.0,
            _ => self.g(u) + self.m * u,
        }
    }

    pub fn df(&self, u: f64) -> f64 {
        match self.kind {
            NonlinearityKind::Linear => 0.0,
            _ => self.dg(u) + self.m,
        }
    }

    pub fn d2f(&self, u: f64) -> f64 {
        self.d2g(u)
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NonlinearityKind::Sine { amplitude } => write!(f, "sine:{amplitude}"),
            NonlinearityKind::Cubic { lambda } => write!(f, "cubic:{lambda}"),
            NonlinearityKind::Linear => write!(f, "linear"),
        }
    }
}

/// `I_N f(u)` (or `I_N f'(u)`): pointwise evaluation on the `2N` grid followed
/// by interpolation at the same bandwidth.
pub fn eval_f_on_grid(nl: &Nonlinearity, u: &SpectralField, which: Which) -> Result<SpectralField> {
    let samples = inverse_transform(u)?;
    let (dim, n) = (samples.dim(), samples.bandwidth());
    let mut values = samples.into_values();
    for x in &mut values {
        *x = match which {
            Which::F => nl.f(*x),
            Which::DF => nl.df(*x),
        };
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
    }
    forward_transform(&GridSamples::new(dim, n, values)?)
}
