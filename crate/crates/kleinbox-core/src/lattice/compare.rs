//! Quantitative lattice-continuum cross validation.
//!
//! Levels map through `f_n - f0 = E_n`; wavefunctions through
//! `psi_n = U Psi_n` with `U = (sqrt(2)/2) [1, i; 1, -i]`, which sends the
//! continuum spinor components onto the A and B sublattices. Both
//! directions are compared at intensity level to stay independent of the
//! fast Bloch sign of the lattice eigenvectors.

use num_complex::Complex64;

use crate::dirac::{find_levels, SpinorField};
use crate::error::LatticeError;
use crate::params::DiracParams;

use super::{LatticeEigensystem, SiteMap};

/// Side-by-side in-window levels.
#[derive(Debug, Clone)]
pub struct LevelComparison {
    /// Lattice level relative to `f0` (MHz).
    pub lattice_mhz: Vec<f64>,
    /// Continuum level (MHz).
    pub continuum_mhz: Vec<f64>,
    /// `lattice - continuum` per pair.
    pub delta_mhz: Vec<f64>,
    pub max_abs_delta_mhz: f64,
}

/// Pair in-window lattice levels with the continuum spectrum by ascending
/// order. Counts are verified first; a mismatch is the error signal.
pub fn compare_levels(
    eig: &LatticeEigensystem,
    p: &DiracParams,
) -> Result<LevelComparison, LatticeError> {
    let (lo, hi) = p.klein_window_abs();
    let lattice: Vec<f64> =
        eig.frequencies_in_window(lo, hi).iter().map(|f| f - p.f0_mhz).collect();
    let continuum = find_levels(p)
        .map_err(|e| LatticeError::BadSpec(format!("continuum solve failed: {e}")))?
        .energies_mhz;
    if lattice.len() != continuum.len() {
        return Err(LatticeError::LevelCountMismatch {
            lattice: lattice.len(),
            continuum: continuum.len(),
        });
    }
    let delta: Vec<f64> =
        lattice.iter().zip(&continuum).map(|(l, c)| l - c).collect();
    let max_abs = delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    Ok(LevelComparison {
        lattice_mhz: lattice,
        continuum_mhz: continuum,
        delta_mhz: delta,
        max_abs_delta_mhz: max_abs,
    })
}

/// Deviation between a lattice eigenvector and the matched continuum state.
#[derive(Debug, Clone, Copy)]
pub struct IntensityDeviation {
    pub max_abs: f64,
    pub l2: f64,
}

/// Compare lattice sublattice intensities against the continuum spinor.
///
/// `psi = U Psi` is sampled at the site coordinates: `|psi^(1)|^2` on the
/// A sites, `|psi^(2)|^2` on the B sites. Both profiles are renormalized
/// to unit total sum before taking max-abs and L2 differences.
pub fn compare_intensities(
    eig: &LatticeEigensystem,
    level: usize,
    field: &SpinorField,
    map: &SiteMap,
) -> Result<IntensityDeviation, LatticeError> {
    let vector = eig.vector(level)?;
    let n_sites = vector.len();

    let mut lattice: Vec<f64> = vector.iter().map(|a| a * a).collect();
    let lat_sum: f64 = lattice.iter().sum();
    lattice.iter_mut().for_each(|v| *v /= lat_sum);

    let mut continuum = Vec::with_capacity(n_sites);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n_sites {
        let x = map.x_of_site(i);
        let (c1, c2) = field.eval(x);
        let value = if SiteMap::is_a_site(i) {
            // psi^(1) = (Psi1 + i Psi2)/sqrt(2)
            ((c1 + Complex64::i() * c2) * inv_sqrt2).norm_sqr()
        } else {
            ((c1 - Complex64::i() * c2) * inv_sqrt2).norm_sqr()
        };
        continuum.push(value);
    }
    let cont_sum: f64 = continuum.iter().sum();
    continuum.iter_mut().for_each(|v| *v /= cont_sum);

    let mut max_abs = 0.0f64;
    let mut l2 = 0.0f64;
    for (l, c) in lattice.iter().zip(&continuum) {
        let d = (l - c).abs();
        max_abs = max_abs.max(d);
        l2 += d * d;
    }
    Ok(IntensityDeviation { max_abs, l2: l2.sqrt() })
}
