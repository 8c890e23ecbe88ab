use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Fourier mode `k = (k_1, k_2)`. One-dimensional fields only use `k_1` and
/// keep `k_2 = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModeIndex(pub [i64; 2]);

impl ModeIndex {
    pub fn d1(k: i64) -> Self {
        ModeIndex([k, 0])
    }

    pub fn d2(k1: i64, k2: i64) -> Self {
        ModeIndex([k1, k2])
    }

    /// `|k|^2`
    pub fn sq_norm(&self) -> i64 {
        self.0[0] * self.0[0] + self.0[1] * self.0[1]
    }

    pub fn neg(&self) -> Self {
        ModeIndex([-self.0[0], -self.0[1]])
    }

    /// True when every component lies in `[-n, n-1]`.
    pub fn in_block(&self, n: usize) -> bool {
        let n = n as i64;
        self.0.iter().all(|&k| (-n..n).contains(&k))
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(Error::UnsupportedDim(dim))
    }
}

/// Number of stored modes `(2n)^dim`.
pub(crate) fn mode_count(dim: usize, n: usize) -> usize {
    (2 * n).pow(dim as u32)
}

/// Band-limited Fourier coefficients on the d-torus.
///
/// Modes are stored in row-major order with each component running from
/// `-N` to `N-1`, so the linear index of `k` is `Σ (k_i + N) (2N)^{d-1-i}`.
/// The `hermitian` flag asserts `c(-k) = conj(c(k))` wherever both modes are
/// stored, i.e. real physical values.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    dim: usize,
    n: usize,
    coeffs: Vec<Complex64>,
    hermitian: bool,
}

impl SpectralField {
    pub fn zeros(dim: usize, n: usize) -> Self {
        assert!(dim == 1 || dim == 2, "dimension must be 1 or 2");
        assert!(n >= 1, "bandwidth must be positive");
        SpectralField {
            dim,
            n,
            coeffs: vec![Complex64::new(0.0, 0.0); mode_count(dim, n)],
            hermitian: true,
        }
    }

    pub fn from_coeffs(
        dim: usize,
        n: usize,
        coeffs: Vec<Complex64>,
        hermitian: bool,
    ) -> Result<Self> {
        check_dim(dim)?;
        if n == 0 {
            return Err(invalid("bandwidth must be positive"));
        }
        if coeffs.len() != mode_count(dim, n) {
            return Err(invalid(format!(
                "expected {} coefficients for dim={dim}, N={n}, got {}",
                mode_count(dim, n),
                coeffs.len()
            )));
        }
        Ok(SpectralField {
            dim,
            n,
            coeffs,
            hermitian,
        })
    }

    /// Builds a field by evaluating `f` at every stored mode.
    pub fn from_fn(
        dim: usize,
        n: usize,
        hermitian: bool,
        mut f: impl FnMut(ModeIndex) -> Complex64,
    ) -> Self {
        let mut out = SpectralField::zeros(dim, n);
        out.hermitian = hermitian;
        for idx in 0..out.coeffs.len() {
            out.coeffs[idx] = f(out.mode_at(idx));
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn set_hermitian(&mut self, hermitian: bool) {
        self.hermitian = hermitian;
    }

    pub fn mode_at(&self, idx: usize) -> ModeIndex {
        let side = 2 * self.n;
        let n = self.n as i64;
        match self.dim {
            1 => ModeIndex::d1(idx as i64 - n),
            _ => ModeIndex::d2((idx / side) as i64 - n, (idx % side) as i64 - n),
        }
    }

    pub fn index_of(&self, k: ModeIndex) -> Option<usize> {
        if self.dim == 1 && k.0[1] != 0 {
            return None;
        }
        if !k.in_block(self.n) {
            return None;
        }
        let n = self.n as i64;
        let side = 2 * self.n;
        Some(match self.dim {
            1 => (k.0[0] + n) as usize,
            _ => (k.0[0] + n) as usize * side + (k.0[1] + n) as usize,
        })
    }

    /// Coefficient at `k`, zero for modes outside the stored block.
    pub fn get(&self, k: ModeIndex) -> Complex64 {
        self.index_of(k)
            .map(|i| self.coeffs[i])
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn set(&mut self, k: ModeIndex, value: Complex64) -> Result<()> {
        let i = self
            .index_of(k)
            .ok_or_else(|| invalid(format!("mode {:?} outside bandwidth {}", k.0, self.n)))?;
        self.coeffs[i] = value;
        Ok(())
    }

    /// `|k|^2` for every stored mode, in storage order.
    pub fn mode_sq_norms(&self) -> Vec<f64> {
        mode_sq_norms(self.dim, self.n)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest `|c(-k) - conj(c(k))|` over mode pairs that are both stored,
    /// including the imaginary part of `c(0)`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (idx, c) in self.coeffs.iter().enumerate() {
            let k = self.mode_at(idx);
            if let Some(j) = self.index_of(k.neg()) {
                worst = worst.max((self.coeffs[j] - c.conj()).norm());
            }
        }
        worst
    }

    pub fn scale(&mut self, factor: f64) {
        for c in &mut self.coeffs {
            *c *= factor;
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.scale(factor);
        out
    }

    /// `self += factor * other` for fields of identical shape.
    pub fn axpy(&mut self, factor: f64, other: &SpectralField) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * factor;
        }
        self.hermitian &= other.hermitian;
        Ok(())
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    pub(crate) fn check_same_shape(&self, other: &SpectralField) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        if self.n != other.n {
            return Err(Error::BandwidthMismatch(self.n, other.n));
        }
        Ok(())
    }
}

pub(crate) fn mode_sq_norms(dim: usize, n: usize) -> Vec<f64> {
    let side = 2 * n;
    let ni = n as i64;
    match dim {
        1 => (0..side).map(|i| ((i as i64 - ni).pow(2)) as f64).collect(),
        _ => {
            let mut out = Vec::with_capacity(side * side);
            for i in 0..side {
                let a = (i as i64 - ni).pow(2);
                for j in 0..side {
                    out.push((a + (j as i64 - ni).pow(2)) as f64);
                }
            }
            out
        }
    }
}

/// Real point values on the tensor grid `D^d`, `D = {j / (2N)}`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSamples {
    dim: usize,
    n: usize,
    values: Vec<f64>,
}

impl GridSamples {
    pub fn new(dim: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if n == 0 {
            return Err(invalid("bandwidth must be positive"));
        }
        if values.len() != mode_count(dim, n) {
            return Err(invalid(format!(
                "expected {} samples, got {}",
                mode_count(dim, n),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(GridSamples { dim, n, values })
    }

    /// Samples `f` at the grid points.
    pub fn from_fn(dim: usize, n: usize, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        check_dim(dim)?;
        let side = 2 * n;
        let h = 1.0 / side as f64;
        let values = match dim {
            1 => (0..side).map(|i| f(&[i as f64 * h])).collect(),
            _ => {
                let mut v = Vec::with_capacity(side * side);
                for i in 0..side {
                    for j in 0..side {
                        v.push(f(&[i as f64 * h, j as f64 * h]));
                    }
                }
                v
            }
        };
        GridSamples::new(dim, n, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// The first-order state `W = (u, v)`, `v = ∂_t u`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairField {
    pub u: SpectralField,
    pub v: SpectralField,
}

impl PairField {
    pub fn new(u: SpectralField, v: SpectralField) -> Result<Self> {
        u.check_same_shape(&v)?;
        Ok(PairField { u, v })
    }

    pub fn zeros(dim: usize, n: usize) -> Self {
        PairField {
            u: SpectralField::zeros(dim, n),
            v: SpectralField::zeros(dim, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn bandwidth(&self) -> usize {
        self.u.bandwidth()
    }

    pub fn is_hermitian(&self) -> bool {
        self.u.is_hermitian() && self.v.is_hermitian()
    }

    pub fn max_abs(&self) -> f64 {
        self.u.max_abs().max(self.v.max_abs())
    }

    pub fn all_finite(&self) -> bool {
        self.u.all_finite() && self.v.all_finite()
    }

    pub fn axpy(&mut self, factor: f64, other: &PairField) -> Result<()> {
        self.u.axpy(factor, &other.u)?;
        self.v.axpy(factor, &other.v)
    }

    pub fn add(&self, other: &PairField) -> Result<PairField> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &PairField) -> Result<PairField> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    pub fn scaled(&self, factor: f64) -> PairField {
        PairField {
            u: self.u.scaled(factor),
            v: self.v.scaled(factor),
        }
    }
}
