//! Numerical laboratory for quantized Klein tunneling in a bounded 1D
//! Dirac system.
//!
//! A massive Dirac particle confined to `[0, d]` with infinite-mass walls
//! meets a step potential `V0` at `x = a`. Inside the Klein window
//! `(mc^2, V0 - mc^2)` the particle channel on the left and the hole
//! channel on the right both propagate, and their hybridization quantizes
//! into discrete bound states. The same physics lives in a dimer chain of
//! coupled resonators, which this crate simulates side by side with the
//! continuum so each solver cross-checks the other:
//!
//! * [`dirac`] - scattering-matrix quantization, levels, spinor states;
//! * [`lattice`] - chain Hamiltonian, eigensystem, envelopes, comparisons;
//! * [`spectroscopy`] - synthetic reflection spectra, peaks, DOS/LDOS;
//! * [`fit`] - Levenberg-Marquardt engine and parameter extraction;
//! * [`pipeline`] - forward + inverse runs over disorder ensembles.

pub mod config;
pub mod dirac;
pub mod error;
pub mod export;
pub mod fit;
pub mod lattice;
pub mod params;
pub mod pipeline;
pub mod presets;
pub mod spectroscopy;

pub use config::RunConfig;
pub use error::{ConfigError, DiracError, FitError, LatticeError, ParamError};
pub use params::{DiracParams, Geometry};
pub use presets::{ExperimentPreset, PresetId};
