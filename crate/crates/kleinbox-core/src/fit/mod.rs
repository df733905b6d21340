//! Nonlinear least squares: the shared engine and the physics fits.

mod dispersion;
mod lm;

pub use dispersion::{
    fit_dispersion_hole, fit_dispersion_particle, fit_level_sequence, DispersionPair,
    SequenceFitOptions,
};
pub use lm::{lm_minimize, lm_minimize_with_jacobian, FitResult, LmOptions};

pub(crate) use lm::solve_dense;
