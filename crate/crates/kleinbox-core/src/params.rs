//! Physical constants and geometry of the bounded Dirac system.
//!
//! The box `[0, d]` holds a massive Dirac particle; a step potential of
//! height `V0` starts at `x = a`. All frequencies are in MHz, all lengths
//! in mm, and energies `E` are measured relative to the Dirac point `f0`.
//! The Klein window is the energy interval `(mc^2, V0 - mc^2)` where both
//! the particle channel (left of the step) and the hole channel (right of
//! the step) propagate.

use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// Dimer counts on each side of the potential step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Geometry {
    pub n_left: usize,
    pub n_right: usize,
}

impl Geometry {
    pub fn new(n_left: usize, n_right: usize) -> Result<Self, ParamError> {
        if n_left == 0 || n_right == 0 {
            return Err(ParamError::NonPositiveCount { n_left, n_right });
        }
        Ok(Self { n_left, n_right })
    }

    pub fn n_total(&self) -> usize {
        self.n_left + self.n_right
    }

    /// Step position `a = (N_L + 1/4) a0`.
    pub fn step_position_mm(&self, a0_mm: f64) -> f64 {
        (self.n_left as f64 + 0.25) * a0_mm
    }

    /// Box length `d = (N + 1/2) a0`.
    pub fn box_length_mm(&self, a0_mm: f64) -> f64 {
        (self.n_total() as f64 + 0.5) * a0_mm
    }
}

/// Continuum parameters of the Dirac box with a step.
///
/// `a_mm` and `d_mm` are derived from the lattice geometry and are kept
/// alongside the independent constants so a value loaded from file is
/// self-contained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiracParams {
    /// Rest-mass energy `mc^2` (MHz).
    pub mc2_mhz: f64,
    /// `c * hbar` (MHz * mm).
    pub hbar_c_mhz_mm: f64,
    /// Dirac-point frequency `f0` (MHz, absolute).
    pub f0_mhz: f64,
    /// Step height `V0` (MHz).
    pub v0_mhz: f64,
    /// Lattice constant `a0` (mm).
    pub a0_mm: f64,
    /// Step position `a` (mm).
    pub a_mm: f64,
    /// Box length `d` (mm).
    pub d_mm: f64,
}

impl DiracParams {
    /// Build parameters from a lattice geometry and the continuum constants.
    ///
    /// Rejects a non-positive mass or velocity and any step height that
    /// leaves the Klein window `(mc^2, V0 - mc^2)` empty.
    pub fn from_geometry(
        geometry: Geometry,
        mc2_mhz: f64,
        hbar_c_mhz_mm: f64,
        f0_mhz: f64,
        v0_mhz: f64,
        a0_mm: f64,
    ) -> Result<Self, ParamError> {
        if !(mc2_mhz > 0.0) {
            return Err(ParamError::NonPositive { name: "mc2_mhz", value: mc2_mhz });
        }
        if !(hbar_c_mhz_mm > 0.0) {
            return Err(ParamError::NonPositive { name: "hbar_c_mhz_mm", value: hbar_c_mhz_mm });
        }
        if !(a0_mm > 0.0) {
            return Err(ParamError::NonPositive { name: "a0_mm", value: a0_mm });
        }
        if !(v0_mhz > 2.0 * mc2_mhz) {
            return Err(ParamError::EmptyKleinWindow { v0_mhz, mc2_mhz });
        }
        let a_mm = geometry.step_position_mm(a0_mm);
        let d_mm = geometry.box_length_mm(a0_mm);
        Ok(Self { mc2_mhz, hbar_c_mhz_mm, f0_mhz, v0_mhz, a0_mm, a_mm, d_mm })
    }

    /// Klein window `(mc^2, V0 - mc^2)` in energy relative to `f0`.
    pub fn klein_window(&self) -> (f64, f64) {
        (self.mc2_mhz, self.v0_mhz - self.mc2_mhz)
    }

    /// Klein window in absolute frequency `(f0 + mc^2, f0 + V0 - mc^2)`.
    pub fn klein_window_abs(&self) -> (f64, f64) {
        let (lo, hi) = self.klein_window();
        (self.f0_mhz + lo, self.f0_mhz + hi)
    }

    /// Width `b = d - a` of the stepped region.
    pub fn step_region_mm(&self) -> f64 {
        self.d_mm - self.a_mm
    }

    /// Margin used to stay clear of the window edges, where the channels
    /// degenerate (`t -> 0`).
    pub fn window_margin(&self) -> f64 {
        1e-6 * self.v0_mhz
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::published;

    #[test]
    fn geometry_arithmetic_e1() {
        let g = Geometry::new(15, 15).unwrap();
        let p = DiracParams::from_geometry(
            g,
            published::MC2_MHZ,
            published::HBAR_C_OVER_A0_MHZ * published::A0_MM,
            published::F0_MHZ,
            published::V0_MHZ,
            published::A0_MM,
        )
        .unwrap();
        assert_eq!(p.a_mm, 312.625);
        assert_eq!(p.d_mm, 625.25);
    }

    #[test]
    fn geometry_arithmetic_e4() {
        let g = Geometry::new(15, 9).unwrap();
        let p = DiracParams::from_geometry(
            g,
            published::MC2_MHZ,
            published::HBAR_C_OVER_A0_MHZ * published::A0_MM,
            published::F0_MHZ,
            published::V0_MHZ,
            published::A0_MM,
        )
        .unwrap();
        assert_eq!(p.a_mm, 312.625);
        assert_eq!(p.d_mm, 502.25);
    }

    #[test]
    fn empty_klein_window_rejected() {
        let g = Geometry::new(15, 15).unwrap();
        let err = DiracParams::from_geometry(g, 12.894, 1257.1625, 6713.0, 20.0, 20.5);
        assert!(matches!(err, Err(ParamError::EmptyKleinWindow { .. })));
    }

    #[test]
    fn zero_counts_rejected() {
        assert!(Geometry::new(0, 15).is_err());
        assert!(Geometry::new(15, 0).is_err());
    }

    #[test]
    fn klein_window_is_open_interval() {
        let p = published::e1_params();
        let (lo, hi) = p.klein_window();
        assert!(lo > 0.0 && hi > lo);
        assert!((hi - (81.5 - 12.894)).abs() < 1e-12);
    }
}
