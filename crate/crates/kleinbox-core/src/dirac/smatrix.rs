//! Full four-channel scattering matrix, kept as an independent
//! cross-check of the reduced quantization condition.
//!
//! Channel order: particle moving left, particle moving right, hole moving
//! left, hole moving right. The interface couples particle and hole with
//! `r` and `t` (the two transmissions differ by `e^{i pi}`), the walls
//! close the system with the unimodular spinor phases. The production root
//! function is the real reduction `g(E)`; here `det(1 - S)` is assembled
//! from the matrix itself and evaluated by complex elimination.

use num_complex::Complex64;

use crate::error::DiracError;
use crate::params::DiracParams;

use super::kinematics::{check_window, interface_coefficients, kinematics_unchecked};

/// The 4x4 scattering matrix at energy `E`.
pub fn scattering_matrix(energy_mhz: f64, p: &DiracParams) -> Result<[[Complex64; 4]; 4], DiracError> {
    check_window(energy_mhz, p)?;
    let kin = kinematics_unchecked(energy_mhz, p);
    let co = interface_coefficients(&kin);
    let i = Complex64::i();
    let phase_a = (i * kin.k_per_mm * p.a_mm).exp();
    let phase_b = (-i * kin.kappa_per_mm * p.step_region_mm()).exp();
    let t_ph = Complex64::from(co.t);
    let t_hp = Complex64::from(co.hole_to_particle_sign * co.t);
    let r = Complex64::from(co.r);
    let zero = Complex64::ZERO;
    Ok([
        [zero, r * phase_a, t_ph * phase_a, zero],
        [co.r_left_wall * phase_a, zero, zero, zero],
        [zero, zero, zero, co.r_right_wall * phase_b],
        [zero, t_hp * phase_b, r * phase_b, zero],
    ])
}

/// `det(1 - S)` by Gaussian elimination with partial pivoting.
pub fn det_one_minus_s(energy_mhz: f64, p: &DiracParams) -> Result<Complex64, DiracError> {
    let s = scattering_matrix(energy_mhz, p)?;
    let mut m = [[Complex64::ZERO; 4]; 4];
    for (row, s_row) in m.iter_mut().zip(s.iter()) {
        for (elem, &s_elem) in row.iter_mut().zip(s_row.iter()) {
            *elem = -s_elem;
        }
    }
    for (k, row) in m.iter_mut().enumerate() {
        row[k] += 1.0;
    }
    let mut det = Complex64::ONE;
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&a, &b| m[a][col].norm_sqr().total_cmp(&m[b][col].norm_sqr()))
            .unwrap();
        if m[pivot][col].norm_sqr() == 0.0 {
            return Ok(Complex64::ZERO);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..4 {
            let factor = m[row][col] / m[col][col];
            for j in col..4 {
                let sub = factor * m[col][j];
                m[row][j] -= sub;
            }
        }
    }
    Ok(det)
}

/// Locate the minimum of `|det(1 - S)|` in `[lo, hi]` by golden-section
/// search; used to confirm that reduced-condition roots coincide with
/// determinant minima.
pub fn locate_det_minimum(lo: f64, hi: f64, p: &DiracParams) -> Result<f64, DiracError> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let f = |e: f64| det_one_minus_s(e, p).map(|d| d.norm_sqr());
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > 1e-9 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(0.5 * (a + b))
}
