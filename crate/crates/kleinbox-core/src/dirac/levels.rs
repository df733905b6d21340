//! Quantization condition and level finding.
//!
//! A bound state exists where `det(1 - S) = 0`. For the four-channel
//! scattering matrix of the stepped box this reduces to the real condition
//!
//! ```text
//! g(E) = cos(phi_a - phi_b) + r cos(phi_a + phi_b) = 0
//! phi_a = k a + arctan(xi),   phi_b = kappa b + arctan(zeta),   b = d - a
//! ```
//!
//! `g` is smooth across the window, so levels are located by bracketing
//! sign changes on a uniform scan and refining by bisection. The scan
//! density is tied to the expected level count (phase span over pi) so
//! that adjacent roots are separated by dozens of samples; if a finer
//! rescan changes the root count, the scan escalates.

use serde::Serialize;

use crate::error::DiracError;
use crate::params::DiracParams;

use super::kinematics::{check_window, interface_coefficients, kinematics_unchecked};

/// Sorted in-window levels with their residuals.
#[derive(Debug, Clone, Serialize)]
pub struct LevelSet {
    /// Energies relative to `f0` (MHz), strictly increasing.
    pub energies_mhz: Vec<f64>,
    /// `|g(E_n)|` at each level.
    pub residuals: Vec<f64>,
    /// The scanned window `(lo, hi)` in MHz relative to `f0`.
    pub window_mhz: (f64, f64),
}

impl LevelSet {
    pub fn len(&self) -> usize {
        self.energies_mhz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies_mhz.is_empty()
    }
}

/// Evaluate `g(E)`; errors outside the Klein window.
pub fn quantization_residual(energy_mhz: f64, p: &DiracParams) -> Result<f64, DiracError> {
    check_window(energy_mhz, p)?;
    Ok(residual_unchecked(energy_mhz, p))
}

fn residual_unchecked(energy_mhz: f64, p: &DiracParams) -> f64 {
    let kin = kinematics_unchecked(energy_mhz, p);
    let r = interface_coefficients(&kin).r;
    let phi_a = kin.k_per_mm * p.a_mm + kin.xi.atan();
    let phi_b = kin.kappa_per_mm * p.step_region_mm() + kin.zeta.atan();
    (phi_a - phi_b).cos() + r * (phi_a + phi_b).cos()
}

/// Estimate of the number of levels in the window: total phase span over pi.
fn expected_level_count(p: &DiracParams) -> f64 {
    let (lo, hi) = p.klein_window();
    let eps = p.window_margin();
    let top = kinematics_unchecked(hi - eps, p);
    let bottom = kinematics_unchecked(lo + eps, p);
    let k_max = top.k_per_mm;
    let kappa_max = bottom.kappa_per_mm;
    (k_max * p.a_mm + kappa_max * p.step_region_mm()) / std::f64::consts::PI
}

/// Find every root of `g` in the open Klein window.
pub fn find_levels(p: &DiracParams) -> Result<LevelSet, DiracError> {
    let (lo, hi) = p.klein_window();
    let eps = p.window_margin();
    let (lo, hi) = (lo + eps, hi - eps);
    let base = (64.0 * expected_level_count(p).max(1.0)).ceil() as usize;

    let mut m = base;
    for escalation in 0..=3 {
        let roots = scan_roots(lo, hi, m, p);
        let check = scan_roots(lo, hi, 4 * m, p);
        if roots.len() == check.len() {
            let residuals = check.iter().map(|&e| residual_unchecked(e, p).abs()).collect();
            return Ok(LevelSet { energies_mhz: check, residuals, window_mhz: (lo, hi) });
        }
        if escalation == 3 {
            return Err(DiracError::ScanUnstable { escalations: escalation });
        }
        m *= 4;
    }
    unreachable!()
}

fn scan_roots(lo: f64, hi: f64, m: usize, p: &DiracParams) -> Vec<f64> {
    let step = (hi - lo) / m as f64;
    let mut roots = Vec::new();
    let mut prev_e = lo;
    let mut prev_g = residual_unchecked(prev_e, p);
    for i in 1..=m {
        let e = if i == m { hi } else { lo + step * i as f64 };
        let g = residual_unchecked(e, p);
        if prev_g == 0.0 {
            roots.push(prev_e);
        } else if prev_g * g < 0.0 {
            roots.push(refine_root(prev_e, e, p));
        }
        prev_e = e;
        prev_g = g;
    }
    if prev_g == 0.0 {
        roots.push(prev_e);
    }
    roots
}

/// Bisect to |dE| < 1e-9 MHz, then polish with secant steps so the residual
/// itself drops to the rounding floor.
fn refine_root(mut lo: f64, mut hi: f64, p: &DiracParams) -> f64 {
    let mut g_lo = residual_unchecked(lo, p);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        let g_mid = residual_unchecked(mid, p);
        if g_mid == 0.0 {
            return mid;
        }
        if g_lo * g_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            g_lo = g_mid;
        }
    }
    let mut x0 = lo;
    let mut x1 = hi;
    let mut f0 = residual_unchecked(x0, p);
    let mut f1 = residual_unchecked(x1, p);
    for _ in 0..4 {
        if f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !x2.is_finite() {
            break;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = residual_unchecked(x1, p);
        if f1 == 0.0 {
            break;
        }
    }
    x1
}

/// Which dispersion branch a single uncoupled box lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Levels above the gap of the unstepped region.
    Particle,
    /// Levels below the gap of the stepped region; mirror image of the
    /// particle branch under `E -> V0 - E`.
    Hole,
}

/// Levels of a single hard-walled box of length `L` with no step.
///
/// With the infinite-mass walls, `Psi^(2)/Psi^(1) = -i` at `x = 0` and `+i`
/// at `x = L`, a right-mover picks up `r_L = -e^{2i arctan xi}` at the left
/// wall and `-e^{2i(kL + arctan xi)}` coming back, so a round trip closes
/// exactly when
///
/// ```text
/// k L + 2 arctan(xi) = n pi,  n = 1, 2, ...
/// ```
///
/// The hole branch is the mirror `E -> V0 - E` of the particle branch.
/// Only roots inside the Klein window of `p` are returned.
pub fn single_box_levels(
    length_mm: f64,
    p: &DiracParams,
    branch: Branch,
) -> Result<LevelSet, DiracError> {
    if !(length_mm > 0.0) {
        return Err(DiracError::Param(crate::error::ParamError::NonPositive {
            name: "length_mm",
            value: length_mm,
        }));
    }
    let (lo, hi) = p.klein_window();
    let eps = p.window_margin();
    let (lo, hi) = (lo + eps, hi - eps);

    let phase = |e: f64| -> f64 {
        let kin = kinematics_unchecked(e, p);
        kin.k_per_mm * length_mm + 2.0 * kin.xi.atan()
    };
    // Phase is monotone in E on the particle branch; solve phase = n pi.
    // The count is capped so absurd trial parameters inside fit loops
    // cannot make the scan explode.
    let phase_top = phase(hi);
    let n_max = ((phase_top / std::f64::consts::PI).floor() as usize).min(512);
    let mut energies = Vec::new();
    let mut residuals = Vec::new();
    for n in 1..=n_max {
        let target = n as f64 * std::f64::consts::PI;
        if phase(lo) > target {
            continue;
        }
        let (mut a, mut b) = (lo, hi);
        // Absolute target 1e-12 MHz, relaxed to the f64 grid at large E.
        let tol = 1e-12f64.max(4.0 * f64::EPSILON * hi.abs());
        while b - a > tol {
            let mid = 0.5 * (a + b);
            if phase(mid) < target {
                a = mid;
            } else {
                b = mid;
            }
        }
        // Secant polish: the phase slope can be steep enough that the
        // bisection cell still leaves a visible phase residual.
        let (mut x0, mut x1) = (a, b);
        let (mut f0, mut f1) = (phase(x0) - target, phase(x1) - target);
        for _ in 0..4 {
            if f1 == f0 || f1 == 0.0 {
                break;
            }
            let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
            if !x2.is_finite() {
                break;
            }
            (x0, f0) = (x1, f1);
            (x1, f1) = (x2, phase(x2) - target);
        }
        energies.push(x1);
        residuals.push(f1.abs());
    }
    if branch == Branch::Hole {
        energies = energies.iter().rev().map(|e| p.v0_mhz - e).collect();
        residuals.reverse();
    }
    Ok(LevelSet { energies_mhz: energies, residuals, window_mhz: (lo, hi) })
}
