//! Channel kinematics and scattering coefficients in the Klein window.
//!
//! For energy `E` (relative to the Dirac point) inside the window
//! `(mc^2, V0 - mc^2)` both channels propagate:
//!
//! ```text
//! k     = sqrt(E^2 - m^2 c^4) / (c hbar)            particle, x < a
//! kappa = sqrt((V0 - E)^2 - m^2 c^4) / (c hbar)     hole,     x > a
//! xi    = c hbar k / (E + mc^2)
//! zeta  = c hbar kappa / (V0 - E + mc^2)
//! ```
//!
//! The interface mixes the channels with real reflection
//! `r = (xi zeta - 1)/(xi zeta + 1)` and transmission `t = sqrt(1 - r^2)`;
//! the hard walls reflect with the spinor phases
//! `r_L = -exp(+2i arctan xi)` and `r_R = -exp(-2i arctan zeta)`.

use num_complex::Complex64;

use crate::error::DiracError;
use crate::params::DiracParams;

/// Propagation data of both channels at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelKinematics {
    /// Energy relative to `f0` (MHz).
    pub energy_mhz: f64,
    /// Particle wavenumber (1/mm).
    pub k_per_mm: f64,
    /// Hole wavenumber (1/mm).
    pub kappa_per_mm: f64,
    /// Particle spinor ratio `xi`, in `[0, 1)` inside the window.
    pub xi: f64,
    /// Hole spinor ratio `zeta`, in `[0, 1)` inside the window.
    pub zeta: f64,
}

/// Check that `E` lies strictly inside the Klein window, with the margin
/// `eps * V0` that keeps clear of the degenerate band edges.
pub fn check_window(energy_mhz: f64, p: &DiracParams) -> Result<(), DiracError> {
    let (lo, hi) = p.klein_window();
    let eps = p.window_margin();
    if energy_mhz < lo + eps {
        return Err(DiracError::BelowWindow { energy_mhz, bound_mhz: lo + eps });
    }
    if energy_mhz > hi - eps {
        return Err(DiracError::AboveWindow { energy_mhz, bound_mhz: hi - eps });
    }
    Ok(())
}

/// Evaluate the channel kinematics at `E`.
pub fn kinematics(energy_mhz: f64, p: &DiracParams) -> Result<ChannelKinematics, DiracError> {
    check_window(energy_mhz, p)?;
    Ok(kinematics_unchecked(energy_mhz, p))
}

/// Same as [`kinematics`] but without the window check; used by window
/// sweeps that have already validated their grid.
pub(crate) fn kinematics_unchecked(energy_mhz: f64, p: &DiracParams) -> ChannelKinematics {
    let m = p.mc2_mhz;
    let hole_gap = p.v0_mhz - energy_mhz;
    let k = ((energy_mhz - m) * (energy_mhz + m)).max(0.0).sqrt() / p.hbar_c_mhz_mm;
    let kappa = ((hole_gap - m) * (hole_gap + m)).max(0.0).sqrt() / p.hbar_c_mhz_mm;
    ChannelKinematics {
        energy_mhz,
        k_per_mm: k,
        kappa_per_mm: kappa,
        xi: p.hbar_c_mhz_mm * k / (energy_mhz + m),
        zeta: p.hbar_c_mhz_mm * kappa / (hole_gap + m),
    }
}

/// Reflection/transmission at the step and at the two walls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceCoefficients {
    /// Interface reflection, real and in `(-1, 0]` inside the window.
    pub r: f64,
    /// Interface transmission, `sqrt(1 - r^2)`.
    pub t: f64,
    /// Left-wall reflection, unimodular.
    pub r_left_wall: Complex64,
    /// Right-wall reflection, unimodular.
    pub r_right_wall: Complex64,
    /// The particle->hole and hole->particle transmissions differ by a
    /// factor `e^{i pi}`; this records which one carries the sign.
    pub hole_to_particle_sign: f64,
}

pub fn interface_coefficients(kin: &ChannelKinematics) -> InterfaceCoefficients {
    let product = kin.xi * kin.zeta;
    let r = (product - 1.0) / (product + 1.0);
    let t = (1.0 - r * r).max(0.0).sqrt();
    InterfaceCoefficients {
        r,
        t,
        r_left_wall: -(Complex64::i() * 2.0 * kin.xi.atan()).exp(),
        r_right_wall: -(Complex64::i() * -2.0 * kin.zeta.atan()).exp(),
        hole_to_particle_sign: -1.0,
    }
}
