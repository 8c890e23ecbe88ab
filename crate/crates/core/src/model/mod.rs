//! Problem definitions: nonlinearities and initial data.

mod initial;
mod nonlinearity;

pub use initial::{
    box_factor, build_initial, build_rough, exact_box_coefficients, BoxSpec, InitialData,
    InitialProfile, RoughSpec, SmoothProfile, RNG_ALGORITHM,
};
pub use nonlinearity::{eval_f_on_grid, Nonlinearity, NonlinearityKind, Which};
