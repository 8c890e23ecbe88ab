//! Binary snapshot files.
//!
//! Layout (all little-endian): magic `HRWV`, format version `u32 = 1`,
//! `dim: u32`, `bandwidth: u32`, `time: f64`, then the `(2N)^d` u-coefficients
//! followed by the `(2N)^d` v-coefficients, each as `(re: f64, im: f64)` in
//! row-major mode order from `-N` to `N-1` per dimension.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::{check_dim, mode_count, PairField, SpectralField};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"HRWV";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 8;

/// Tolerance under which a decoded field is flagged hermitian.
const HERMITIAN_TOL: f64 = 1e-12;

pub fn encode(time: f64, w: &PairField) -> Vec<u8> {
    let n = w.u.len();
    let mut out = Vec::with_capacity(HEADER_LEN + 32 * n);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(w.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(w.bandwidth() as u32).to_le_bytes());
    out.extend_from_slice(&time.to_le_bytes());
    for c in w.u.coeffs().iter().chain(w.v.coeffs()) {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4-byte slice"))
}

fn read_f64(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"))
}

pub fn decode(bytes: &[u8]) -> Result<(f64, PairField)> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Snapshot("truncated header".into()));
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let version = read_u32(bytes, 4);
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let dim = read_u32(bytes, 8) as usize;
    check_dim(dim)?;
    let n = read_u32(bytes, 12) as usize;
    if n == 0 {
        return Err(Error::Snapshot("zero bandwidth".into()));
    }
    let time = read_f64(bytes, 16);
    let count = mode_count(dim, n);
    if bytes.len() != HEADER_LEN + 32 * count {
        return Err(Error::Snapshot(format!(
            "expected {} bytes, found {}",
            HEADER_LEN + 32 * count,
            bytes.len()
        )));
    }
    let mut coeffs = (0..2 * count).map(|i| {
        let at = HEADER_LEN + 16 * i;
        Complex64::new(read_f64(bytes, at), read_f64(bytes, at + 8))
    });
    let u: Vec<_> = coeffs.by_ref().take(count).collect();
    let v: Vec<_> = coeffs.collect();
    let mut u = SpectralField::from_coeffs(dim, n, u, false)?;
    let mut v = SpectralField::from_coeffs(dim, n, v, false)?;
    for f in [&mut u, &mut v] {
        let h = f.hermitian_defect() <= HERMITIAN_TOL * f.max_abs().max(1.0);
        f.set_hermitian(h);
    }
    Ok((time, PairField::new(u, v)?))
}

pub fn write_snapshot(path: impl AsRef<Path>, time: f64, w: &PairField) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(&encode(time, w))?;
    Ok(())
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<(f64, PairField)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}
