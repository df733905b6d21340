//! Parameter extraction from level sequences and (f, k) pairs.
//!
//! The particle branch obeys `(f - f0)^2 = (mc^2)^2 + (c hbar k)^2`; the
//! hole branch is fitted with the sign-flipped `k^2` term and recovers
//! `f0 + V0`. A third, wavevector-free route forward-models the single-box
//! spectrum and least-squares matches the measured level sequence, which
//! sidesteps the k-estimation error entirely.

use crate::dirac::{single_box_levels, Branch};
use crate::error::FitError;
use crate::params::DiracParams;

use super::lm::{lm_minimize, FitResult, LmOptions};

/// `(f_mhz, k_per_mm)` data points.
pub type DispersionPair = (f64, f64);

fn default_particle_init(pairs: &[DispersionPair]) -> [f64; 3] {
    let f_min = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let f0 = f_min - 10.0;
    let first = pairs.first().unwrap();
    let last = pairs.last().unwrap();
    let dk2 = last.1 * last.1 - first.1 * first.1;
    let df2 = (last.0 - f0).powi(2) - (first.0 - f0).powi(2);
    let chbar = if dk2.abs() > 1e-30 && df2 / dk2 > 0.0 { (df2 / dk2).sqrt() } else { 1000.0 };
    [10.0, chbar, f0]
}

/// Fit `(f - f0)^2 = (mc^2)^2 + (c hbar)^2 k^2`.
///
/// Returns params `[mc2_mhz, hbar_c_mhz_mm, f0_mhz]`.
pub fn fit_dispersion_particle(
    pairs: &[DispersionPair],
    init: Option<[f64; 3]>,
) -> Result<FitResult, FitError> {
    if pairs.len() < 3 {
        return Err(FitError::TooFewPoints { what: "dispersion fit", min: 3, got: pairs.len() });
    }
    let init = init.unwrap_or_else(|| default_particle_init(pairs));
    let data = pairs.to_vec();
    let residual = move |p: &[f64]| -> Vec<f64> {
        data.iter()
            .map(|&(f, k)| (f - p[2]).powi(2) - p[0] * p[0] - (p[1] * k).powi(2))
            .collect()
    };
    let mut out = lm_minimize(residual, &init, &LmOptions::default())?;
    out.params[0] = out.params[0].abs();
    out.params[1] = out.params[1].abs();
    Ok(out)
}

/// Fit the hole branch `(f - f0R)^2 = (mc^2)^2 - (c hbar)^2 k^2`, where
/// `f0R = f0 + V0`.
///
/// Returns params `[mc2_mhz, hbar_c_mhz_mm, f0r_mhz]`. Errors when a
/// wavevector lies beyond the branch at the fitted mass (imaginary kappa).
pub fn fit_dispersion_hole(
    pairs: &[DispersionPair],
    init: Option<[f64; 3]>,
) -> Result<FitResult, FitError> {
    if pairs.len() < 3 {
        return Err(FitError::TooFewPoints { what: "dispersion fit", min: 3, got: pairs.len() });
    }
    // With a caller-supplied reference the branch domain is known up
    // front: k beyond mc^2 / c hbar means imaginary kappa.
    if let Some([mc2, chbar, _]) = init {
        let k_edge = mc2.abs() / chbar.abs().max(1e-30);
        for &(_, k) in pairs {
            if k > k_edge {
                return Err(FitError::HoleBranchDomain { k_per_mm: k });
            }
        }
    }
    let init = init.unwrap_or_else(|| {
        let f_max = pairs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        [10.0, 100.0, f_max + 10.0]
    });
    let data = pairs.to_vec();
    let residual = move |p: &[f64]| -> Vec<f64> {
        data.iter()
            .map(|&(f, k)| (f - p[2]).powi(2) - p[0] * p[0] + (p[1] * k).powi(2))
            .collect()
    };
    let mut out = lm_minimize(residual, &init, &LmOptions::default())?;
    out.params[0] = out.params[0].abs();
    out.params[1] = out.params[1].abs();
    // Beyond k = mc^2 / c hbar the fitted branch has imaginary kappa; data
    // out there cannot be hole states.
    let k_edge = out.params[0] / out.params[1].max(1e-30);
    for &(_, k) in pairs {
        if k > k_edge {
            return Err(FitError::HoleBranchDomain { k_per_mm: k });
        }
    }
    Ok(out)
}

/// Options for the sequence fit.
#[derive(Debug, Clone, Default)]
pub struct SequenceFitOptions {
    /// Hold the Dirac point fixed (e.g. at the measured spectral midgap)
    /// and fit only `(mc^2, c hbar)`.
    pub pin_f0_mhz: Option<f64>,
}

/// Fit `(mc^2, c hbar, f0)` by forward-modelling the single-box spectrum
/// and matching the measured level sequence in order.
///
/// The model level count is recomputed every iteration; a count mismatch
/// contributes a large penalty residual per unmatched level instead of
/// aborting, which keeps the optimizer inside the basin.
///
/// Returns params `[mc2_mhz, hbar_c_mhz_mm, f0_mhz]`.
pub fn fit_level_sequence(
    levels_mhz: &[f64],
    length_mm: f64,
    branch: Branch,
    template: &DiracParams,
    opts: &SequenceFitOptions,
) -> Result<FitResult, FitError> {
    if levels_mhz.len() < 4 {
        return Err(FitError::TooFewPoints {
            what: "level-sequence fit",
            min: 4,
            got: levels_mhz.len(),
        });
    }
    let template = template.clone();
    let measured = levels_mhz.to_vec();
    let penalty = 2.0 * template.v0_mhz;
    let pin = opts.pin_f0_mhz;

    let model_levels = {
        let template = template.clone();
        move |mc2: f64, chbar: f64| -> Vec<f64> {
            let mut p = template.clone();
            p.mc2_mhz = mc2.abs().max(1e-6);
            p.hbar_c_mhz_mm = chbar.abs().max(1e-6);
            match single_box_levels(length_mm, &p, branch) {
                Ok(set) => set.energies_mhz,
                Err(_) => Vec::new(),
            }
        }
    };

    let residual = {
        let measured = measured.clone();
        let model_levels = model_levels.clone();
        move |p: &[f64]| -> Vec<f64> {
            let f0 = pin.unwrap_or_else(|| p[2]);
            let model = model_levels(p[0], p[1]);
            measured
                .iter()
                .enumerate()
                .map(|(i, &f)| {
                    if i < model.len() {
                        f - f0 - model[i]
                    } else {
                        penalty
                    }
                })
                .collect()
        }
    };

    let f0_guess = pin.unwrap_or(measured[0] - 15.0);
    let init: Vec<f64> = if pin.is_some() {
        vec![10.0, template.hbar_c_mhz_mm * 0.9]
    } else {
        vec![10.0, template.hbar_c_mhz_mm * 0.9, f0_guess]
    };
    let out = lm_minimize(residual.clone(), &init, &LmOptions::default())?;

    // Surface a real count mismatch at the solution as an error.
    let f0 = pin.unwrap_or_else(|| out.params[2]);
    let model = model_levels(out.params[0], out.params[1]);
    let relative: Vec<f64> = measured.iter().map(|f| f - f0).collect();
    let in_range = model
        .iter()
        .filter(|&&e| e <= relative.last().unwrap() + penalty)
        .count();
    if in_range < measured.len() {
        return Err(FitError::LevelCountMismatch { model: in_range, measured: measured.len() });
    }

    let mut params = vec![out.params[0].abs(), out.params[1].abs(), f0];
    if pin.is_none() {
        params[2] = out.params[2];
    }
    Ok(FitResult { params, ..out })
}
