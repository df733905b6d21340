//! Exact continuum solver for the stepped Dirac box in the Klein regime.

mod eigenstate;
mod kinematics;
mod levels;
mod smatrix;

pub use eigenstate::{build_box_eigenstate, build_eigenstate, default_grid_step, SpinorField};
pub use kinematics::{interface_coefficients, kinematics, ChannelKinematics, InterfaceCoefficients};
pub use levels::{find_levels, quantization_residual, single_box_levels, Branch, LevelSet};
pub use smatrix::{det_one_minus_s, locate_det_minimum, scattering_matrix};
