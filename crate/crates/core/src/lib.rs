//! Fourier pseudospectral integrators for semilinear wave equations
//! `u_tt - Δu = g(u)` on the periodic torus `[0,1]^d`, `d ∈ {1, 2}`.
//!
//! The equation is written as the first-order system `U' = LU + F(U)` with
//! `U = (u, u_t)`, `L = [[0, 1], [Δ - m, 0]]` and `F(U) = (0, g(u) + m u)`.
//! The main integrator is a filtered low-regularity exponential scheme whose
//! low Fourier band is time-stepped while the band `(N, N^α]` is propagated
//! exactly by the free wave group and only materialized at output times.
//!
//! Modules:
//! - [`spectral`]: fields, transforms, projections, norms, dealiased products
//!   and the binary snapshot format.
//! - [`waveop`]: per-mode wave group `e^{tL}` and the `φ_τ(L)` filter.
//! - [`model`]: nonlinearities and initial-data builders.
//! - [`integrate`]: the high-frequency recovered integrator and baselines.
//! - [`harness`]: reference solutions, errors, convergence sweeps, CSV.

pub mod error;
pub mod harness;
pub mod integrate;
pub mod model;
pub mod spectral;
pub mod waveop;

pub use error::{Error, Result};
pub use num_complex::Complex64;
