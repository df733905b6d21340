//! Synthetic measurement chain.
//!
//! The experiment probes each resonator with an antenna and records the
//! reflection `S11(nu)`; the local density of states follows from the
//! resonance content of those traces. Here the chain is modelled forward
//! with Breit-Wigner resonances,
//!
//! ```text
//! S(nu) = 1 - i c sum_n |psi_n(site)|^2 (G/2) / (nu - f_n + i G/2) + noise
//! ```
//!
//! so `1 - Re S` is an exact sum of Lorentzians (FWHM `G`, amplitude
//! `c |psi_n(site)|^2`), which is the signal the peak detection and
//! fitting stages work on. Noise is additive complex Gaussian per
//! frequency point, with the RNG stream keyed by probe site so parallel
//! synthesis stays deterministic.

mod extract;
mod peaks;

pub use extract::{extract_intensities, fit_lorentzians, FittedPeak, IntensityProfile};
pub use peaks::detect_peaks;

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::lattice::LatticeEigensystem;

/// Uniform frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqGrid {
    pub start_mhz: f64,
    pub step_mhz: f64,
    pub n: usize,
}

impl FreqGrid {
    pub fn new(start_mhz: f64, stop_mhz: f64, n: usize) -> Self {
        assert!(n >= 2 && stop_mhz > start_mhz);
        Self { start_mhz, step_mhz: (stop_mhz - start_mhz) / (n - 1) as f64, n }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.start_mhz + self.step_mhz * i as f64).collect()
    }
}

/// One synthesized trace: complex reflection or real LDOS versus frequency.
#[derive(Debug, Clone)]
pub struct SpectrumTrace {
    pub probe_site: usize,
    pub freq_mhz: Vec<f64>,
    pub values: TraceValues,
}

#[derive(Debug, Clone)]
pub enum TraceValues {
    Reflection(Vec<Complex64>),
    Ldos(Vec<f64>),
}

impl SpectrumTrace {
    /// The real detection signal: `1 - Re S` for reflection, the values
    /// themselves for LDOS.
    pub fn signal(&self) -> Vec<f64> {
        match &self.values {
            TraceValues::Reflection(s) => s.iter().map(|v| 1.0 - v.re).collect(),
            TraceValues::Ldos(v) => v.clone(),
        }
    }
}

/// A Lorentzian resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePeak {
    pub center_mhz: f64,
    /// Full width at half maximum (MHz).
    pub width_mhz: f64,
    pub amplitude: f64,
}

/// Synthesize the reflection trace measured on top of one resonator.
pub fn synth_reflection(
    eig: &LatticeEigensystem,
    site: usize,
    grid: &FreqGrid,
    gamma_mhz: f64,
    coupling: f64,
    noise_sigma: f64,
    seed: u64,
) -> SpectrumTrace {
    assert!(gamma_mhz > 0.0, "resonance width must be positive");
    let freq = grid.values();
    let weights: Vec<(f64, f64)> = (0..eig.n_levels())
        .map(|n| {
            let a = eig.vector(n).expect("level index in range")[site];
            (eig.frequencies_mhz[n], a * a)
        })
        .collect();
    let half = gamma_mhz / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(site as u64);
    let values = freq
        .iter()
        .map(|&nu| {
            let mut s = Complex64::ONE;
            for &(f_n, w) in &weights {
                s -= Complex64::i() * coupling * w * half
                    / Complex64::new(nu - f_n, half);
            }
            if noise_sigma > 0.0 {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                s += noise_sigma * Complex64::new(re, im);
            }
            s
        })
        .collect();
    SpectrumTrace { probe_site: site, freq_mhz: freq, values: TraceValues::Reflection(values) }
}

/// LDOS map over the requested sites: rows are sites, columns frequencies.
#[derive(Debug, Clone)]
pub struct LdosMap {
    pub sites: Vec<usize>,
    pub freq_mhz: Vec<f64>,
    /// `values[row][col]` = LDOS(site = sites\[row\], freq\[col\]).
    pub values: Vec<Vec<f64>>,
}

impl LdosMap {
    /// Density of states: the site sum of the map.
    pub fn dos(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.freq_mhz.len()];
        for row in &self.values {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }

    pub fn dos_trace(&self) -> SpectrumTrace {
        SpectrumTrace {
            probe_site: usize::MAX,
            freq_mhz: self.freq_mhz.clone(),
            values: TraceValues::Ldos(self.dos()),
        }
    }
}

/// `LDOS(site, nu) = sum_n |psi_n(site)|^2 L_gamma(nu - f_n)` with the
/// unit-area Lorentzian `L_gamma(x) = (gamma / 2 pi) / (x^2 + (gamma/2)^2)`.
pub fn ldos_map(
    eig: &LatticeEigensystem,
    sites: &[usize],
    grid: &FreqGrid,
    gamma_mhz: f64,
) -> LdosMap {
    assert!(gamma_mhz > 0.0, "broadening must be positive");
    let freq = grid.values();
    let half = gamma_mhz / 2.0;
    let norm = gamma_mhz / (2.0 * std::f64::consts::PI);
    let values: Vec<Vec<f64>> = sites
        .par_iter()
        .map(|&site| {
            let weights: Vec<(f64, f64)> = (0..eig.n_levels())
                .map(|n| {
                    let a = eig.vector(n).expect("level index in range")[site];
                    (eig.frequencies_mhz[n], a * a)
                })
                .collect();
            freq.iter()
                .map(|&nu| {
                    weights
                        .iter()
                        .map(|&(f_n, w)| w * norm / ((nu - f_n).powi(2) + half * half))
                        .sum()
                })
                .collect()
        })
        .collect();
    LdosMap { sites: sites.to_vec(), freq_mhz: freq, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::solve_chain;
    use crate::presets::{ExperimentPreset, PresetId};

    fn clean_eig() -> LatticeEigensystem {
        let mut spec = ExperimentPreset::get(PresetId::E1).chain();
        spec.disorder_sigma_mhz = 0.0;
        solve_chain(&spec).unwrap()
    }

    #[test]
    fn decoupled_antenna_sees_unity() {
        let eig = clean_eig();
        let grid = FreqGrid::new(6700.0, 6800.0, 101);
        let trace = synth_reflection(&eig, 3, &grid, 2.0, 0.0, 0.0, 7);
        match trace.values {
            TraceValues::Reflection(v) => {
                for s in v {
                    assert_eq!(s, Complex64::ONE);
                }
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn single_resonance_signal_is_a_lorentzian_of_width_gamma() {
        // One synthetic level with unit weight at the probe site.
        let h = crate::lattice::Tridiagonal { diag: vec![6750.0], off: vec![] };
        let eig = crate::lattice::eigensolve(&h).unwrap();
        let gamma = 2.0;
        let grid = FreqGrid::new(6740.0, 6760.0, 2001);
        let trace = synth_reflection(&eig, 0, &grid, gamma, 0.3, 0.0, 0);
        let signal = trace.signal();
        let peak = signal.iter().cloned().fold(0.0f64, f64::max);
        assert!((peak - 0.3).abs() < 1e-9);
        for (i, &nu) in trace.freq_mhz.iter().enumerate() {
            let expect = 0.3 * (gamma / 2.0).powi(2)
                / ((nu - 6750.0).powi(2) + (gamma / 2.0).powi(2));
            assert!((signal[i] - expect).abs() < 1e-12);
        }
        // FWHM check at the half-maximum frequencies.
        let half_idx = trace
            .freq_mhz
            .iter()
            .position(|&nu| (nu - (6750.0 - gamma / 2.0)).abs() < 1e-9)
            .unwrap();
        assert!((signal[half_idx] - 0.15).abs() < 1e-9);
    }

    #[test]
    fn noise_is_deterministic_per_seed_and_site() {
        let eig = clean_eig();
        let grid = FreqGrid::new(6700.0, 6800.0, 64);
        let a = synth_reflection(&eig, 5, &grid, 2.0, 0.1, 0.01, 42);
        let b = synth_reflection(&eig, 5, &grid, 2.0, 0.1, 0.01, 42);
        let c = synth_reflection(&eig, 6, &grid, 2.0, 0.1, 0.01, 42);
        let (TraceValues::Reflection(va), TraceValues::Reflection(vb), TraceValues::Reflection(vc)) =
            (&a.values, &b.values, &c.values)
        else {
            unreachable!()
        };
        assert_eq!(va, vb);
        assert_ne!(va, vc);
    }

    #[test]
    fn ldos_integrates_to_one_per_site() {
        let eig = clean_eig();
        // Wide grid so the Lorentzian tails are captured.
        let grid = FreqGrid::new(6300.0, 7200.0, 9001);
        let map = ldos_map(&eig, &[0, 7, 31], &grid, 2.0);
        for row in &map.values {
            let integral: f64 =
                row.iter().sum::<f64>() * (map.freq_mhz[1] - map.freq_mhz[0]);
            assert!((integral - 1.0).abs() < 0.01, "integral {integral}");
        }
    }

    #[test]
    fn ldos_is_nonnegative_and_linear_in_weights() {
        let eig = clean_eig();
        let grid = FreqGrid::new(6700.0, 6790.0, 301);
        let map = ldos_map(&eig, &[10], &grid, 2.0);
        assert!(map.values[0].iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn mid_chain_trace_resolves_window_resonances() {
        // Self-consistency: peaks detected on one resonator's trace sit on
        // eigenfrequencies, and never outnumber the window levels.
        let eig = clean_eig();
        let preset = ExperimentPreset::get(PresetId::E1);
        let (lo, hi) = preset.params().klein_window_abs();
        let gamma = 2.0;
        let grid = FreqGrid::new(lo - 2.0 * gamma, hi + 2.0 * gamma, 2001);
        let trace = synth_reflection(&eig, 1, &grid, gamma, 0.3, 0.0, 0);
        let peaks = crate::spectroscopy::detect_peaks(&trace, 0.003);
        let window_peaks: Vec<f64> = peaks
            .iter()
            .map(|p| p.center_mhz)
            .filter(|c| *c > lo && *c < hi)
            .collect();
        assert!(!window_peaks.is_empty());
        assert!(window_peaks.len() <= 10, "{} peaks", window_peaks.len());
        for c in window_peaks {
            let nearest = eig
                .frequencies_mhz
                .iter()
                .map(|f| (f - c).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < gamma / 10.0, "peak at {c} is {nearest} MHz from a level");
        }
    }

    #[test]
    fn dos_sums_sites() {
        let eig = clean_eig();
        let grid = FreqGrid::new(6720.0, 6760.0, 11);
        let map = ldos_map(&eig, &[0, 1, 2], &grid, 2.0);
        let dos = map.dos();
        for col in 0..grid.n {
            let manual: f64 = (0..3).map(|r| map.values[r][col]).sum();
            assert!((dos[col] - manual).abs() < 1e-14);
        }
    }
}
