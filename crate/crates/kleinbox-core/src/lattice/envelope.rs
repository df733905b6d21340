//! Sublattice envelopes and wavevector estimation.
//!
//! An eigenvector splits into A- and B-sublattice intensity envelopes on
//! their continuum coordinates. Near the gap the raw amplitudes carry a
//! fast alternating Bloch factor, so quantitative work happens at the
//! intensity level; a standing wave `|psi|^2 ~ sin^2(kx + delta)` then
//! oscillates at spatial frequency `2k`, and the number of intensity peaks
//! over a segment of length `L` counts the mode index (`k ~ n pi / L`).

use crate::error::LatticeError;

use super::{LatticeEigensystem, SiteMap};

/// Per-sublattice intensity profiles of one eigenvector, unit total sum.
#[derive(Debug, Clone)]
pub struct SublatticeEnvelopes {
    pub a_x_mm: Vec<f64>,
    pub a_intensity: Vec<f64>,
    pub b_x_mm: Vec<f64>,
    pub b_intensity: Vec<f64>,
    /// Dimer count of the left (unstepped) region; splits the segments.
    pub n_left: usize,
    pub a0_mm: f64,
}

/// Intensity envelopes of level `n` on the site coordinates.
pub fn sublattice_envelopes(
    eig: &LatticeEigensystem,
    level: usize,
    map: &SiteMap,
    n_left: usize,
) -> Result<SublatticeEnvelopes, LatticeError> {
    let v = eig.vector(level)?;
    let mut env = SublatticeEnvelopes {
        a_x_mm: Vec::new(),
        a_intensity: Vec::new(),
        b_x_mm: Vec::new(),
        b_intensity: Vec::new(),
        n_left,
        a0_mm: map.a0_mm,
    };
    for (i, &amp) in v.iter().enumerate() {
        let x = map.x_of_site(i);
        if SiteMap::is_a_site(i) {
            env.a_x_mm.push(x);
            env.a_intensity.push(amp * amp);
        } else {
            env.b_x_mm.push(x);
            env.b_intensity.push(amp * amp);
        }
    }
    let total: f64 =
        env.a_intensity.iter().sum::<f64>() + env.b_intensity.iter().sum::<f64>();
    env.a_intensity.iter_mut().for_each(|i| *i /= total);
    env.b_intensity.iter_mut().for_each(|i| *i /= total);
    Ok(env)
}

/// Which potential region to analyze.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    Left,
    Right,
}

/// Wavevector estimate of a segment, with the peak-count consistency value.
#[derive(Debug, Clone, Copy)]
pub struct WavevectorEstimate {
    /// Half the dominant spatial frequency of the intensity envelope (1/mm).
    pub k_fourier_per_mm: f64,
    /// `n_peaks * pi / L` (1/mm).
    pub k_peak_count_per_mm: f64,
    pub n_peaks: usize,
}

/// Dominant angular spatial frequency of uniformly sampled values, by
/// zero-padded DFT with parabolic interpolation of the power peak.
///
/// The mean is removed and a Hann window applied so the DC bin and
/// rectangular-window leakage do not mask low frequencies. Returns a
/// frequency in `(0, pi/spacing]` (radians per unit length). On records
/// this short the result carries a few-percent leakage bias; see
/// [`refine_frequency`].
pub fn dominant_frequency(spacing: f64, values: &[f64]) -> f64 {
    const PAD: usize = 4096;
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let windowed: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let hann = 0.5
                - 0.5 * (2.0 * std::f64::consts::PI * j as f64 / (n as f64 - 1.0)).cos();
            (v - mean) * hann
        })
        .collect();
    // Zero-padded DFT, evaluated sparsely over the occupied samples.
    let bins = PAD / 2;
    let mut power = vec![0.0f64; bins + 1];
    for (b, p) in power.iter_mut().enumerate() {
        let q = 2.0 * std::f64::consts::PI * b as f64 / (PAD as f64 * spacing);
        let (mut re, mut im) = (0.0, 0.0);
        for (j, &v) in windowed.iter().enumerate() {
            let phase = q * spacing * j as f64;
            re += v * phase.cos();
            im -= v * phase.sin();
        }
        *p = re * re + im * im;
    }
    let mut peak = 1;
    for b in 1..bins {
        if power[b] > power[peak] {
            peak = b;
        }
    }
    let delta = if peak > 0 && peak < bins {
        let (lo, mid, hi) = (power[peak - 1], power[peak], power[peak + 1]);
        let denom = lo - 2.0 * mid + hi;
        if denom.abs() > 0.0 {
            (0.5 * (lo - hi) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        }
    } else {
        0.0
    };
    2.0 * std::f64::consts::PI * (peak as f64 + delta) / (PAD as f64 * spacing)
}

/// Polish a DFT frequency seed by least squares.
///
/// At fixed trial frequency the model `c0 + a cos(qx) + b sin(qx)` is
/// linear, so the profile over `q` is scanned by golden section within
/// one natural resolution width of the seed. Exact for a clean sinusoid,
/// which removes the short-record leakage bias of the raw DFT estimate.
pub fn refine_frequency(spacing: f64, values: &[f64], q_seed: f64) -> f64 {
    let n = values.len();
    let sse = |q: f64| -> f64 {
        let mut m = [[0.0f64; 3]; 3];
        let mut rhs = [0.0f64; 3];
        for (j, &v) in values.iter().enumerate() {
            let x = q * spacing * j as f64;
            let row = [1.0, x.cos(), x.sin()];
            for a in 0..3 {
                rhs[a] += row[a] * v;
                for b in 0..3 {
                    m[a][b] += row[a] * row[b];
                }
            }
        }
        let a = vec![m[0].to_vec(), m[1].to_vec(), m[2].to_vec()];
        match crate::fit::solve_dense(a, rhs.to_vec()) {
            Some(c) => values
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let x = q * spacing * j as f64;
                    let r = v - c[0] - c[1] * x.cos() - c[2] * x.sin();
                    r * r
                })
                .sum(),
            None => f64::INFINITY,
        }
    };
    let resolution = std::f64::consts::PI / (n as f64 * spacing);
    let q_min = (q_seed - resolution).max(0.05 * resolution);
    let q_max = (q_seed + resolution).min(std::f64::consts::PI / spacing);
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (q_min, q_max);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (sse(x1), sse(x2));
    for _ in 0..90 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = sse(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = sse(x2);
        }
    }
    0.5 * (a + b)
}

/// Count local maxima of an intensity profile; the half-open ends count
/// when they dominate their single neighbor.
pub fn count_intensity_peaks(values: &[f64]) -> usize {
    let n = values.len();
    if n < 2 {
        return n;
    }
    let mut peaks = 0;
    for j in 1..n - 1 {
        if values[j] >= values[j - 1] && values[j] >= values[j + 1] {
            peaks += 1;
        }
    }
    if values[0] > values[1] {
        peaks += 1;
    }
    if values[n - 1] > values[n - 2] {
        peaks += 1;
    }
    peaks
}

/// Estimate the wavevector of the A-sublattice envelope over one segment.
///
/// A standing-wave intensity oscillates at `2k`, so the Fourier route
/// halves the refined dominant frequency; the peak-count route reports
/// `n pi / L` with `L` the segment box length.
pub fn estimate_wavevector(
    env: &SublatticeEnvelopes,
    segment: Segment,
) -> Result<WavevectorEstimate, LatticeError> {
    let (vals, length) = segment_slice(env, segment)?;
    let seed = dominant_frequency(env.a0_mm, vals);
    let k_fourier = 0.5 * refine_frequency(env.a0_mm, vals, seed);
    let n_peaks = count_intensity_peaks(vals);
    Ok(WavevectorEstimate {
        k_fourier_per_mm: k_fourier,
        k_peak_count_per_mm: n_peaks as f64 * std::f64::consts::PI / length,
        n_peaks,
    })
}

fn segment_slice<'a>(
    env: &'a SublatticeEnvelopes,
    segment: Segment,
) -> Result<(&'a [f64], f64), LatticeError> {
    let n_total = env.a_intensity.len();
    let (vals, n_dimers) = match segment {
        Segment::Left => (&env.a_intensity[..env.n_left], env.n_left),
        Segment::Right => (&env.a_intensity[env.n_left..], n_total - env.n_left),
    };
    if vals.len() < 4 {
        return Err(LatticeError::SegmentTooShort { n_sites: vals.len(), min: 4 });
    }
    // Box length of the segment treated as a stand-alone chain, measured to
    // the interface: (n + 1/4) a0.
    let length = (n_dimers as f64 + 0.25) * env.a0_mm;
    Ok((vals, length))
}

/// Quadratic extrapolation of the three profile points nearest `x_target`;
/// used to check that envelopes respect the ghost-site boundary conditions.
pub fn extrapolate_to(xs: &[f64], vals: &[f64], x_target: f64) -> f64 {
    assert!(xs.len() >= 3, "need at least 3 points");
    let pick: [usize; 3] = if (x_target - xs[0]).abs() < (x_target - xs[xs.len() - 1]).abs() {
        [0, 1, 2]
    } else {
        [xs.len() - 3, xs.len() - 2, xs.len() - 1]
    };
    // Lagrange form through the three chosen points.
    let mut acc = 0.0;
    for (ii, &i) in pick.iter().enumerate() {
        let mut term = vals[i];
        for (jj, &j) in pick.iter().enumerate() {
            if ii != jj {
                term *= (x_target - xs[j]) / (xs[i] - xs[j]);
            }
        }
        acc += term;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::solve_chain;
    use crate::presets::{published, ExperimentPreset, PresetId};

    fn clean_e1() -> (LatticeEigensystem, SiteMap, usize) {
        let mut spec = ExperimentPreset::get(PresetId::E1).chain();
        spec.disorder_sigma_mhz = 0.0;
        let map = SiteMap::for_chain(&spec, published::A0_MM);
        (solve_chain(&spec).unwrap(), map, spec.n_left)
    }

    #[test]
    fn envelopes_are_normalized() {
        let (eig, map, n_left) = clean_e1();
        let env = sublattice_envelopes(&eig, 32, &map, n_left).unwrap();
        let total: f64 =
            env.a_intensity.iter().sum::<f64>() + env.b_intensity.iter().sum::<f64>();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(env.a_x_mm.len(), 30);
        assert_eq!(env.b_x_mm.len(), 30);
    }

    #[test]
    fn synthetic_sine_frequency_recovered() {
        let a0 = published::A0_MM;
        let k0 = 0.5 / a0;
        let values: Vec<f64> =
            (0..15).map(|j| ((j as f64 + 0.5) * a0 * k0).sin()).collect();
        let seed = dominant_frequency(a0, &values);
        assert!((seed - k0).abs() / k0 < 0.10, "raw seed {seed} vs {k0}");
        let est = refine_frequency(a0, &values, seed);
        assert!((est - k0).abs() / k0 < 0.02, "est {est} vs {k0}");
    }

    #[test]
    fn mirror_symmetry_of_clean_e1_envelopes() {
        // Chain reversal + particle-hole mirror: A-intensities of window
        // level n match the reversed B-intensities of the mirror level.
        let (eig, map, n_left) = clean_e1();
        let window = ExperimentPreset::get(PresetId::E1).params().klein_window_abs();
        let idx = eig.indices_in_window(window.0, window.1);
        for (pos, &level) in idx.iter().enumerate() {
            let mirror = idx[idx.len() - 1 - pos];
            let env = sublattice_envelopes(&eig, level, &map, n_left).unwrap();
            let env_m = sublattice_envelopes(&eig, mirror, &map, n_left).unwrap();
            for j in 0..env.a_intensity.len() {
                let b_rev = env_m.b_intensity[env.a_intensity.len() - 1 - j];
                assert!(
                    (env.a_intensity[j] - b_rev).abs() < 1e-10,
                    "level {level} site {j}"
                );
            }
        }
    }

    #[test]
    fn envelopes_vanish_at_ghost_sites() {
        // Smooth extension of the B envelope hits ~0 at x = 0 and of the A
        // envelope at x = d, for the low window modes where a quadratic is
        // a fair local model.
        let (eig, map, n_left) = clean_e1();
        let window = ExperimentPreset::get(PresetId::E1).params().klein_window_abs();
        let idx = eig.indices_in_window(window.0, window.1);
        for &level in &idx[..2] {
            let env = sublattice_envelopes(&eig, level, &map, n_left).unwrap();
            // Amplitude envelopes are linear near their nodes, so the
            // smooth extension is meaningful where intensity is quadratic.
            let b_amp: Vec<f64> = env.b_intensity.iter().map(|v| v.sqrt()).collect();
            let peak = b_amp.iter().cloned().fold(0.0f64, f64::max);
            let at_left = extrapolate_to(&env.b_x_mm, &b_amp, 0.0);
            assert!(at_left.abs() < 0.15 * peak, "level {level}: {at_left} vs peak {peak}");
            let a_amp: Vec<f64> = env.a_intensity.iter().map(|v| v.sqrt()).collect();
            let peak_a = a_amp.iter().cloned().fold(0.0f64, f64::max);
            let at_right = extrapolate_to(&env.a_x_mm, &a_amp, map.ghost_right_mm());
            assert!(at_right.abs() < 0.15 * peak_a, "level {level}: {at_right}");
        }
    }

    #[test]
    fn ground_state_wavevector_matches_box_oracle() {
        let preset = ExperimentPreset::get(PresetId::E1);
        let mut left = preset.chain_left_alone();
        left.disorder_sigma_mhz = 0.0;
        let eig = solve_chain(&left).unwrap();
        let p = preset.params();
        let window = p.klein_window_abs();
        let idx = eig.indices_in_window(window.0, window.1);
        let map = SiteMap::for_chain(&left, published::A0_MM);
        let env = sublattice_envelopes(&eig, idx[0], &map, left.n_dimers()).unwrap();
        let est = estimate_wavevector(&env, Segment::Left).unwrap();
        let box_levels =
            crate::dirac::single_box_levels(p.a_mm, &p, crate::dirac::Branch::Particle)
                .unwrap();
        let kin = crate::dirac::kinematics(box_levels.energies_mhz[0], &p).unwrap();
        let rel = (est.k_fourier_per_mm - kin.k_per_mm).abs() / kin.k_per_mm;
        assert!(rel < 0.05, "fourier k {} vs box k {}", est.k_fourier_per_mm, kin.k_per_mm);
    }

    #[test]
    fn segment_too_short_is_an_error() {
        let mut spec = ExperimentPreset::get(PresetId::E4).chain();
        spec.n_right = 3;
        spec.disorder_sigma_mhz = 0.0;
        let eig = solve_chain(&spec).unwrap();
        let map = SiteMap::for_chain(&spec, published::A0_MM);
        let env = sublattice_envelopes(&eig, 0, &map, spec.n_left).unwrap();
        assert!(matches!(
            estimate_wavevector(&env, Segment::Right),
            Err(LatticeError::SegmentTooShort { .. })
        ));
    }

    #[test]
    fn peak_counts_step_with_the_mode_index() {
        let preset = ExperimentPreset::get(PresetId::E1);
        let mut left = preset.chain_left_alone();
        left.disorder_sigma_mhz = 0.0;
        let eig = solve_chain(&left).unwrap();
        let window = preset.params().klein_window_abs();
        let idx = eig.indices_in_window(window.0, window.1);
        let map = SiteMap::for_chain(&left, published::A0_MM);
        for (n, &level) in idx.iter().enumerate() {
            let env = sublattice_envelopes(&eig, level, &map, left.n_dimers()).unwrap();
            let est = estimate_wavevector(&env, Segment::Left).unwrap();
            assert_eq!(est.n_peaks, n + 1, "level {level}");
        }
    }
}
