//! Multi-Lorentzian refinement and wavefunction-intensity extraction.

use rayon::prelude::*;

use crate::error::FitError;
use crate::fit::{lm_minimize, LmOptions};

use super::{ResonancePeak, SpectrumTrace};

/// A refined peak. When the refinement failed (or wandered more than one
/// width from its start) the initial estimate is kept and flagged.
#[derive(Debug, Clone, Copy)]
pub struct FittedPeak {
    pub peak: ResonancePeak,
    pub converged: bool,
    /// 1-sigma of the center from the fit covariance, when available.
    pub center_sigma_mhz: Option<f64>,
}

fn multi_lorentz(params: &[f64], x: f64) -> f64 {
    params
        .chunks_exact(3)
        .map(|p| {
            let half = p[1] / 2.0;
            p[2] * half * half / ((x - p[0]).powi(2) + half * half)
        })
        .sum()
}

/// Joint nonlinear refinement of all peaks on one trace.
pub fn fit_lorentzians(
    trace: &SpectrumTrace,
    initial: &[ResonancePeak],
) -> Result<Vec<FittedPeak>, FitError> {
    if initial.is_empty() {
        return Ok(Vec::new());
    }
    let signal = trace.signal();
    let freq = trace.freq_mhz.clone();
    let init: Vec<f64> = initial
        .iter()
        .flat_map(|p| [p.center_mhz, p.width_mhz, p.amplitude])
        .collect();
    let residual = move |p: &[f64]| -> Vec<f64> {
        freq.iter().zip(&signal).map(|(&x, &y)| multi_lorentz(p, x) - y).collect()
    };
    let out = lm_minimize(residual, &init, &LmOptions::default())?;

    let fitted = initial
        .iter()
        .enumerate()
        .map(|(i, start)| {
            let center = out.params[3 * i];
            let width = out.params[3 * i + 1].abs();
            let amplitude = out.params[3 * i + 2];
            let drifted = (center - start.center_mhz).abs() > start.width_mhz;
            if !out.converged && out.covariance.is_none() || drifted {
                FittedPeak { peak: *start, converged: false, center_sigma_mhz: None }
            } else {
                FittedPeak {
                    peak: ResonancePeak { center_mhz: center, width_mhz: width, amplitude },
                    converged: true,
                    center_sigma_mhz: out
                        .covariance
                        .as_ref()
                        .map(|c| c[3 * i][3 * i].max(0.0).sqrt()),
                }
            }
        })
        .collect();
    Ok(fitted)
}

/// Per-site intensity profile of one level, unit total sum.
#[derive(Debug, Clone)]
pub struct IntensityProfile {
    /// Intensity per probe site, ordered as the input traces.
    pub intensity: Vec<f64>,
    pub converged: Vec<bool>,
}

impl IntensityProfile {
    /// Split into (A, B) sublattice profiles assuming alternating sites.
    pub fn split_sublattices(&self) -> (Vec<f64>, Vec<f64>) {
        let a = self.intensity.iter().step_by(2).copied().collect();
        let b = self.intensity.iter().skip(1).step_by(2).copied().collect();
        (a, b)
    }
}

/// Extract `|psi_n(site)|^2` for one resonance from per-site traces.
///
/// Centers and widths are already known from the joint refinement, so the
/// per-site amplitudes solve by linear least squares: the target level
/// together with every `context` resonance near the crop window forms the
/// design matrix, which removes the neighbor-tail bias that a lone
/// Lorentzian would absorb. Sites whose normal equations degenerate keep
/// a zero amplitude; the run errors when fewer than half the sites solve.
pub fn extract_intensities(
    traces: &[SpectrumTrace],
    level: &ResonancePeak,
    context: &[ResonancePeak],
) -> Result<IntensityProfile, FitError> {
    let lo = level.center_mhz - 5.0 * level.width_mhz;
    let hi = level.center_mhz + 5.0 * level.width_mhz;
    // Model the target plus any context resonance whose tail reaches the
    // crop window.
    let mut model = vec![*level];
    for peak in context {
        let near = peak.center_mhz > lo - 4.0 * peak.width_mhz
            && peak.center_mhz < hi + 4.0 * peak.width_mhz;
        let duplicate = (peak.center_mhz - level.center_mhz).abs() < 0.01 * level.width_mhz;
        if near && !duplicate {
            model.push(*peak);
        }
    }

    let results: Vec<(f64, bool)> = traces
        .par_iter()
        .map(|trace| solve_site_amplitudes(trace, &model, lo, hi))
        .collect();
    let converged: Vec<bool> = results.iter().map(|r| r.1).collect();
    let n_ok = converged.iter().filter(|c| **c).count();
    if 2 * n_ok < traces.len() {
        return Err(FitError::TooFewConverged { converged: n_ok, total: traces.len() });
    }
    let mut intensity: Vec<f64> =
        results.iter().map(|r| if r.1 { r.0.max(0.0) } else { 0.0 }).collect();
    let total: f64 = intensity.iter().sum();
    if total > 0.0 {
        intensity.iter_mut().for_each(|v| *v /= total);
    }
    Ok(IntensityProfile { intensity, converged })
}

/// Linear solve for the amplitudes of fixed-shape Lorentzians on one
/// trace; returns the target's amplitude (model index 0).
fn solve_site_amplitudes(
    trace: &SpectrumTrace,
    model: &[ResonancePeak],
    lo: f64,
    hi: f64,
) -> (f64, bool) {
    let signal = trace.signal();
    let window: Vec<(f64, f64)> = trace
        .freq_mhz
        .iter()
        .zip(&signal)
        .filter(|(&x, _)| x >= lo && x <= hi)
        .map(|(&x, &y)| (x, y))
        .collect();
    let p = model.len();
    if window.len() < p + 3 {
        return (0.0, false);
    }
    let shape = |peak: &ResonancePeak, x: f64| {
        let half = peak.width_mhz / 2.0;
        half * half / ((x - peak.center_mhz).powi(2) + half * half)
    };
    let mut normal = vec![vec![0.0; p]; p];
    let mut rhs = vec![0.0; p];
    for &(x, y) in &window {
        let row: Vec<f64> = model.iter().map(|pk| shape(pk, x)).collect();
        for a in 0..p {
            rhs[a] += row[a] * y;
            for b in 0..p {
                normal[a][b] += row[a] * row[b];
            }
        }
    }
    match crate::fit::solve_dense(normal, rhs) {
        Some(amplitudes) if amplitudes[0].is_finite() => (amplitudes[0], true),
        _ => (0.0, false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectroscopy::{detect_peaks, FreqGrid, SpectrumTrace, TraceValues};

    fn lorentz(x: f64, c: f64, w: f64, a: f64) -> f64 {
        a * (w / 2.0) * (w / 2.0) / ((x - c).powi(2) + (w / 2.0).powi(2))
    }

    #[test]
    fn noise_free_single_peak_recovers_exactly() {
        let grid = FreqGrid::new(0.0, 30.0, 1501).values();
        let signal: Vec<f64> = grid.iter().map(|&x| lorentz(x, 14.3, 1.7, 0.62)).collect();
        let trace =
            SpectrumTrace { probe_site: 0, freq_mhz: grid, values: TraceValues::Ldos(signal) };
        let initial = detect_peaks(&trace, 0.05);
        assert_eq!(initial.len(), 1);
        let fitted = fit_lorentzians(&trace, &initial).unwrap();
        assert!(fitted[0].converged);
        assert!((fitted[0].peak.center_mhz - 14.3).abs() < 1e-6 * 14.3);
        assert!((fitted[0].peak.width_mhz - 1.7).abs() < 1e-6 * 1.7);
        assert!((fitted[0].peak.amplitude - 0.62).abs() < 1e-6 * 0.62);
    }

    #[test]
    fn overlapping_pair_separates_at_two_widths() {
        let gamma = 2.0;
        let grid = FreqGrid::new(0.0, 40.0, 2001).values();
        let (c1, c2) = (18.0, 18.0 + 2.0 * gamma);
        let signal: Vec<f64> = grid
            .iter()
            .map(|&x| lorentz(x, c1, gamma, 1.0) + lorentz(x, c2, gamma, 0.7))
            .collect();
        let trace =
            SpectrumTrace { probe_site: 0, freq_mhz: grid, values: TraceValues::Ldos(signal) };
        let initial = detect_peaks(&trace, 0.05);
        assert_eq!(initial.len(), 2);
        let fitted = fit_lorentzians(&trace, &initial).unwrap();
        assert!((fitted[0].peak.center_mhz - c1).abs() < gamma / 5.0);
        assert!((fitted[1].peak.center_mhz - c2).abs() < gamma / 5.0);
    }

    #[test]
    fn extraction_errors_when_the_level_is_off_grid() {
        // Traces that do not cover the requested resonance leave every
        // site without a usable crop window.
        let grid = FreqGrid::new(0.0, 10.0, 301).values();
        let traces: Vec<SpectrumTrace> = (0..4)
            .map(|site| SpectrumTrace {
                probe_site: site,
                freq_mhz: grid.clone(),
                values: TraceValues::Ldos(vec![0.0; grid.len()]),
            })
            .collect();
        let level = ResonancePeak { center_mhz: 100.0, width_mhz: 2.0, amplitude: 1.0 };
        assert!(matches!(
            extract_intensities(&traces, &level, &[]),
            Err(crate::error::FitError::TooFewConverged { .. })
        ));
    }

    #[test]
    fn refined_centers_stay_near_initials() {
        let grid = FreqGrid::new(0.0, 30.0, 901).values();
        let signal: Vec<f64> = grid.iter().map(|&x| lorentz(x, 11.0, 2.0, 0.9)).collect();
        let trace =
            SpectrumTrace { probe_site: 0, freq_mhz: grid, values: TraceValues::Ldos(signal) };
        let initial =
            vec![ResonancePeak { center_mhz: 11.4, width_mhz: 2.5, amplitude: 0.7 }];
        let fitted = fit_lorentzians(&trace, &initial).unwrap();
        assert!(fitted[0].converged);
        assert!((fitted[0].peak.center_mhz - 11.0).abs() < 1e-6);
    }
}
