//! Fourier-spectral core on the periodic torus `[0,1]^d`, `d ∈ {1, 2}`.
//!
//! A field of bandwidth `N` stores the `2N` modes `k_i ∈ [-N, N-1]` per
//! dimension, in bijection with the `2N`-point grid `D = {j / (2N)}`; the
//! grid size must be a power of two. Projections keep the square block
//! `max_i |k_i| ≤ N` under the same storage convention.

mod fft;
pub(crate) mod field;
mod ops;
pub mod snapshot;

pub use field::{GridSamples, ModeIndex, PairField, SpectralField};
pub use ops::{
    band, dealiased_product, embed, embed_pair, forward_transform, inverse_transform,
    inverse_transform_complex, pair_norm, project, project_pair, resize, sample_on_grid,
    sobolev_norm, sobolev_norm_sq, sobolev_weight,
};
