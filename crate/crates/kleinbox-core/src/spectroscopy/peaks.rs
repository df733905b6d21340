//! Resonance peak detection on real-valued traces.

use super::{ResonancePeak, SpectrumTrace};

/// Find local maxima of the detection signal whose prominence exceeds the
/// threshold. Centers are refined by parabolic interpolation; widths are
/// first estimates from the half-prominence crossings.
///
/// Prominence of a peak is its height above the higher of the two valley
/// floors separating it from higher terrain (or the trace ends).
pub fn detect_peaks(trace: &SpectrumTrace, prominence_threshold: f64) -> Vec<ResonancePeak> {
    let signal = trace.signal();
    let freq = &trace.freq_mhz;
    let n = signal.len();
    if n < 3 {
        return Vec::new();
    }
    let step = freq[1] - freq[0];

    let mut peaks = Vec::new();
    for i in 1..n - 1 {
        if !(signal[i] >= signal[i - 1] && signal[i] > signal[i + 1]) {
            continue;
        }
        let prominence = prominence_at(&signal, i);
        if prominence < prominence_threshold {
            continue;
        }
        // Parabolic refinement of the apex.
        let (lo, mid, hi) = (signal[i - 1], signal[i], signal[i + 1]);
        let denom = lo - 2.0 * mid + hi;
        let delta = if denom.abs() > 0.0 { (0.5 * (lo - hi) / denom).clamp(-0.5, 0.5) } else { 0.0 };
        let center = freq[i] + delta * step;
        let height = mid - 0.25 * (lo - hi) * delta;

        // Half-prominence crossings for the width estimate.
        let half_level = height - 0.5 * prominence;
        let mut left = i;
        while left > 0 && signal[left] > half_level {
            left -= 1;
        }
        let mut right = i;
        while right + 1 < n && signal[right] > half_level {
            right += 1;
        }
        let width = ((right - left) as f64 * step).max(step);
        peaks.push(ResonancePeak { center_mhz: center, width_mhz: width, amplitude: height });
    }
    peaks
}

fn prominence_at(signal: &[f64], i: usize) -> f64 {
    let height = signal[i];
    let mut floors = [f64::NEG_INFINITY; 2];
    // Walk outward on each side until higher terrain; track the lowest
    // valley along the way.
    let mut valley = height;
    for j in (0..i).rev() {
        if signal[j] > height {
            break;
        }
        valley = valley.min(signal[j]);
    }
    floors[0] = valley;
    valley = height;
    for &s in &signal[i + 1..] {
        if s > height {
            break;
        }
        valley = valley.min(s);
    }
    floors[1] = valley;
    height - floors[0].max(floors[1])
}
