use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{invalid, Result};
use crate::spectral::field::check_dim;
use crate::spectral::{
    forward_transform, resize, GridSamples, ModeIndex, PairField, SpectralField,
};

/// Identifier of the generator used for rough data, recorded in run metadata.
pub const RNG_ALGORITHM: &str = "chacha12 (rand_chacha 0.9, one stream per factor)";

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Axis-aligned box `Π_i [lo_i, hi_i]` carrying a constant height.
/// One-dimensional data only reads the first component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxSpec {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub height: f64,
}

impl BoxSpec {
    pub fn interval(lo: f64, hi: f64, height: f64) -> Self {
        BoxSpec {
            lo: [lo, 0.0],
            hi: [hi, 1.0],
            height,
        }
    }

    pub fn square(lo: f64, hi: f64, height: f64) -> Self {
        BoxSpec {
            lo: [lo, lo],
            hi: [hi, hi],
            height,
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        for i in 0..dim {
            let (a, b) = (self.lo[i], self.hi[i]);
            if !(0.0 <= a && a < b && b <= 1.0) {
                return Err(invalid(format!(
                    "box side [{a}, {b}] must satisfy 0 <= a < b <= 1"
                )));
            }
        }
        if !self.height.is_finite() {
            return Err(invalid("box height must be finite"));
        }
        Ok(())
    }

    fn coeff(&self, dim: usize, k: ModeIndex) -> Complex64 {
        let mut c = Complex64::new(self.height, 0.0);
        for i in 0..dim {
            c *= box_factor(self.lo[i], self.hi[i], k.0[i]);
        }
        c
    }
}

/// Fourier coefficient of `1_{[a,b]}` on the unit circle:
/// `b - a` at `k = 0`, else `(e^{-2πika} - e^{-2πikb}) / (2πik)`.
pub fn box_factor(a: f64, b: f64, k: i64) -> Complex64 {
    if k == 0 {
        return Complex64::new(b - a, 0.0);
    }
    let kk = 2.0 * PI * k as f64;
    let ea = Complex64::from_polar(1.0, -kk * a);
    let eb = Complex64::from_polar(1.0, -kk * b);
    (ea - eb) / Complex64::new(0.0, kk)
}

/// Exact coefficients of `height · 1_{[a,b]}` at bandwidth `n`.
pub fn exact_box_coefficients(a: f64, b: f64, height: f64, n: usize) -> Result<SpectralField> {
    BoxSpec::interval(a, b, height).validate(1)?;
    if n == 0 {
        return Err(invalid("bandwidth must be positive"));
    }
    Ok(SpectralField::from_fn(1, n, true, |k| {
        height * box_factor(a, b, k.0[0])
    }))
}

/// Random data with coefficient magnitudes `~ |k|^{-exponent}` per separable
/// factor, normalized so `‖u‖_{H^{s_u}} = target_u`, `‖v‖_{H^{s_v}} = target_v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoughSpec {
    pub exponent_u: f64,
    pub exponent_v: f64,
    pub sobolev_u: f64,
    pub sobolev_v: f64,
    pub target_u: f64,
    pub target_v: f64,
    pub seed: u64,
}

impl RoughSpec {
    /// `H^{1/2} × H^{-1/2}` data with unit norms.
    pub fn half_order(seed: u64) -> Self {
        RoughSpec {
            exponent_u: 1.01,
            exponent_v: 0.01,
            sobolev_u: 0.5,
            sobolev_v: -0.5,
            target_u: 1.0,
            target_v: 1.0,
            seed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmoothProfile {
    /// `u = Π_i sin(2π x_i)`, `v = 0`
    Sin,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialData {
    Boxes {
        dim: usize,
        u: Vec<BoxSpec>,
        v: Vec<BoxSpec>,
    },
    Rough {
        dim: usize,
        spec: RoughSpec,
    },
    Smooth {
        dim: usize,
        profile: SmoothProfile,
    },
    /// Explicit coefficients, e.g. read from a snapshot; modes beyond the
    /// stored block are zero.
    Coefficients(PairField),
}

impl InitialData {
    /// Two boxes with `(u, v) = (5, -5)` on `[0.3, 0.425]` and
    /// `(2.5, -2.5)` on `[0.575, 0.7]`.
    pub fn sine_gordon_1d() -> Self {
        InitialData::Boxes {
            dim: 1,
            u: vec![
                BoxSpec::interval(0.3, 0.425, 5.0),
                BoxSpec::interval(0.575, 0.7, 2.5),
            ],
            v: vec![
                BoxSpec::interval(0.3, 0.425, -5.0),
                BoxSpec::interval(0.575, 0.7, -2.5),
            ],
        }
    }

    /// One square `[0.375, 0.625]²` with `u = 0.5`, `v = 0`.
    pub fn sine_gordon_2d_one() -> Self {
        InitialData::Boxes {
            dim: 2,
            u: vec![BoxSpec::square(0.375, 0.625, 0.5)],
            v: vec![],
        }
    }

    /// Squares `[0.3, 0.425]²` (`u = 0.5`) and `[0.575, 0.7]²` (`u = 0.25`), `v = 0`.
    pub fn sine_gordon_2d_two() -> Self {
        InitialData::Boxes {
            dim: 2,
            u: vec![
                BoxSpec::square(0.3, 0.425, 0.5),
                BoxSpec::square(0.575, 0.7, 0.25),
            ],
            v: vec![],
        }
    }

    /// `u = 4` on `[0.3, 0.425]`, `u = 2` on `[0.575, 0.7]`, `v = 0`.
    pub fn klein_gordon_1d() -> Self {
        InitialData::Boxes {
            dim: 1,
            u: vec![
                BoxSpec::interval(0.3, 0.425, 4.0),
                BoxSpec::interval(0.575, 0.7, 2.0),
            ],
            v: vec![],
        }
    }

    pub fn rough_2d(seed: u64) -> Self {
        InitialData::Rough {
            dim: 2,
            spec: RoughSpec::half_order(seed),
        }
    }

    pub fn smooth_sin(dim: usize) -> Self {
        InitialData::Smooth {
            dim,
            profile: SmoothProfile::Sin,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            InitialData::Boxes { dim, .. }
            | InitialData::Rough { dim, .. }
            | InitialData::Smooth { dim, .. } => *dim,
            InitialData::Coefficients(w) => w.dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim())?;
        match self {
            InitialData::Boxes { dim, u, v } => {
                u.iter().chain(v).try_for_each(|b| b.validate(*dim))
            }
            InitialData::Rough { spec, .. } => {
                if spec.target_u > 0.0 && spec.target_v > 0.0 {
                    Ok(())
                } else {
                    Err(invalid("rough target norms must be positive"))
                }
            }
            InitialData::Smooth { .. } => Ok(()),
            InitialData::Coefficients(w) => {
                if w.all_finite() {
                    Ok(())
                } else {
                    Err(crate::error::Error::NonFinite)
                }
            }
        }
    }

    /// Replaces the seed of rough data; other variants are unchanged.
    pub fn with_seed(mut self, seed: u64) -> Self {
        if let InitialData::Rough { spec, .. } = &mut self {
            spec.seed = seed;
        }
        self
    }
}

/// One separable factor `a(k)`, `k ≥ 0`, of a rough field; `a(-k) = a(k)`.
fn rough_factor(seed: u64, stream: u64, exponent: f64, cap: usize) -> Vec<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..=cap)
        .map(|k| {
            let r: f64 = rng.random();
            if k == 0 {
                r
            } else {
                r * (k as f64).powf(-exponent)
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
struct RoughFactors {
    dim: usize,
    cap: usize,
    u: [Vec<f64>; 2],
    v: [Vec<f64>; 2],
    scale_u: f64,
    scale_v: f64,
}

impl RoughFactors {
    fn new(dim: usize, spec: &RoughSpec, cap: usize) -> Self {
        let axis = |stream: u64, exponent: f64, used: bool| {
            if used {
                rough_factor(spec.seed, stream, exponent, cap)
            } else {
                vec![1.0]
            }
        };
        let u = [
            axis(0, spec.exponent_u, true),
            axis(1, spec.exponent_u, dim == 2),
        ];
        let v = [
            axis(2, spec.exponent_v, true),
            axis(3, spec.exponent_v, dim == 2),
        ];
        let mut out = RoughFactors {
            dim,
            cap,
            u,
            v,
            scale_u: 1.0,
            scale_v: 1.0,
        };
        let (raw_u, raw_v) = out.field(cap, false);
        out.scale_u = spec.target_u / crate::spectral::sobolev_norm(&raw_u, spec.sobolev_u);
        out.scale_v = spec.target_v / crate::spectral::sobolev_norm(&raw_v, spec.sobolev_v);
        out
    }

    fn raw(f: &[Vec<f64>; 2], dim: usize, k: ModeIndex) -> f64 {
        let a = f[0][k.0[0].unsigned_abs() as usize];
        if dim == 1 {
            a
        } else {
            a * f[1][k.0[1].unsigned_abs() as usize]
        }
    }

    fn coeff(&self, k: ModeIndex) -> (Complex64, Complex64) {
        if !k.in_block(self.cap) {
            return (ZERO, ZERO);
        }
        (
            Complex64::new(self.scale_u * Self::raw(&self.u, self.dim, k), 0.0),
            Complex64::new(self.scale_v * Self::raw(&self.v, self.dim, k), 0.0),
        )
    }

    fn field(&self, n: usize, scaled: bool) -> (SpectralField, SpectralField) {
        let (su, sv) = if scaled {
            (self.scale_u, self.scale_v)
        } else {
            (1.0, 1.0)
        };
        let n = n.min(self.cap);
        let u = SpectralField::from_fn(self.dim, n, true, |k| {
            Complex64::new(su * Self::raw(&self.u, self.dim, k), 0.0)
        });
        let v = SpectralField::from_fn(self.dim, n, true, |k| {
            Complex64::new(sv * Self::raw(&self.v, self.dim, k), 0.0)
        });
        (u, v)
    }
}

/// Exact coefficients of `U(0)` as a function of the mode, prepared once for
/// every bandwidth up to `cap`. Box and smooth data are analytic and do not
/// depend on `cap`; rough data is drawn and normalized at bandwidth `cap`.
#[derive(Clone, Debug)]
pub struct InitialProfile {
    dim: usize,
    kind: ProfileKind,
}

#[derive(Clone, Debug)]
enum ProfileKind {
    Boxes { u: Vec<BoxSpec>, v: Vec<BoxSpec> },
    Rough(RoughFactors),
    Smooth(SmoothProfile),
    Coefficients(PairField),
}

impl InitialProfile {
    pub fn prepare(data: &InitialData, cap: usize) -> Result<Self> {
        data.validate()?;
        if cap == 0 {
            return Err(invalid("bandwidth must be positive"));
        }
        let kind = match data {
            InitialData::Boxes { u, v, .. } => ProfileKind::Boxes {
                u: u.clone(),
                v: v.clone(),
            },
            InitialData::Rough { dim, spec } => {
                ProfileKind::Rough(RoughFactors::new(*dim, spec, cap))
            }
            InitialData::Smooth { profile, .. } => ProfileKind::Smooth(*profile),
            InitialData::Coefficients(w) => ProfileKind::Coefficients(w.clone()),
        };
        Ok(InitialProfile {
            dim: data.dim(),
            kind,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(û⁰(k), v̂⁰(k))`.
    pub fn coeff(&self, k: ModeIndex) -> (Complex64, Complex64) {
        match &self.kind {
            ProfileKind::Boxes { u, v } => (
                u.iter().map(|b| b.coeff(self.dim, k)).sum(),
                v.iter().map(|b| b.coeff(self.dim, k)).sum(),
            ),
            ProfileKind::Rough(r) => r.coeff(k),
            ProfileKind::Coefficients(w) => (w.u.get(k), w.v.get(k)),
            ProfileKind::Smooth(SmoothProfile::Sin) => {
                // sin(2πx) = (e^{2πix} - e^{-2πix}) / 2i
                let mut c = Complex64::new(1.0, 0.0);
                for i in 0..self.dim {
                    c *= match k.0[i] {
                        1 => Complex64::new(0.0, -0.5),
                        -1 => Complex64::new(0.0, 0.5),
                        _ => ZERO,
                    };
                }
                if self.dim == 1 && k.0[1] != 0 {
                    c = ZERO;
                }
                (c, ZERO)
            }
        }
    }

    /// `Π_n U(0)` at bandwidth `n`.
    pub fn materialize(&self, n: usize) -> Result<PairField> {
        match &self.kind {
            ProfileKind::Smooth(SmoothProfile::Sin) => {
                let samples = GridSamples::from_fn(self.dim, n, |x| {
                    x.iter().map(|xi| (2.0 * PI * xi).sin()).product()
                })?;
                let u = forward_transform(&samples)?;
                PairField::new(u, SpectralField::zeros(self.dim, n))
            }
            ProfileKind::Coefficients(w) => Ok(PairField {
                u: resize(&w.u, n),
                v: resize(&w.v, n),
            }),
            ProfileKind::Rough(r) if n <= r.cap => {
                let (u, v) = r.field(n, true);
                PairField::new(u, v)
            }
            ProfileKind::Boxes { u, v } => {
                let build = |boxes: &[BoxSpec]| {
                    // per-axis factor tables, then tensor products
                    let tables: Vec<[Vec<Complex64>; 2]> = boxes
                        .iter()
                        .map(|b| {
                            let axis = |i: usize| -> Vec<Complex64> {
                                if i < self.dim {
                                    (-(n as i64)..n as i64)
                                        .map(|k| box_factor(b.lo[i], b.hi[i], k))
                                        .collect()
                                } else {
                                    Vec::new()
                                }
                            };
                            [axis(0), axis(1)]
                        })
                        .collect();
                    let ni = n as i64;
                    SpectralField::from_fn(self.dim, n, true, |k| {
                        boxes
                            .iter()
                            .zip(&tables)
                            .map(|(b, t)| {
                                let mut c = b.height * t[0][(k.0[0] + ni) as usize];
                                if self.dim == 2 {
                                    c *= t[1][(k.0[1] + ni) as usize];
                                }
                                c
                            })
                            .sum()
                    })
                };
                PairField::new(build(u), build(v))
            }
            ProfileKind::Rough(_) => {
                let (u, v) = (
                    SpectralField::from_fn(self.dim, n, true, |k| self.coeff(k).0),
                    SpectralField::from_fn(self.dim, n, true, |k| self.coeff(k).1),
                );
                PairField::new(u, v)
            }
        }
    }
}

/// Rough data at bandwidth `n_alpha`, normalized at that bandwidth.
pub fn build_rough(dim: usize, spec: &RoughSpec, n_alpha: usize) -> Result<PairField> {
    InitialProfile::prepare(&InitialData::Rough { dim, spec: *spec }, n_alpha)?.materialize(n_alpha)
}

/// `Π_{N^α} U(0)` at bandwidth `n_alpha`.
pub fn build_initial(data: &InitialData, n_alpha: usize) -> Result<PairField> {
    InitialProfile::prepare(data, n_alpha)?.materialize(n_alpha)
}
