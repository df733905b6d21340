//! Spinor eigenfunction construction.
//!
//! A level's wavefunction is the four-channel superposition
//!
//! ```text
//! x < a:  P_A e^{ikx} (1, xi)  +  P_B e^{-ikx} (1, -xi)
//! x > a:  H_C e^{-i kappa (x-d)} (zeta, 1)  +  H_D e^{+i kappa (x-d)} (-zeta, 1)
//! ```
//!
//! The left wall fixes `P_A = r_L P_B`, two-component continuity at `x = a`
//! fixes `(H_C, H_D)`, and at a true root the right-wall condition
//! `H_D = r_R H_C` is then satisfied automatically; its residual is kept as
//! an internal-consistency check. The overall phase is fixed by making
//! `Psi^(1)(0)` real and positive, and the norm by the trapezoid rule.

use num_complex::Complex64;

use crate::error::DiracError;
use crate::params::DiracParams;

use super::kinematics::{interface_coefficients, kinematics};
use super::levels::quantization_residual;

/// Default sampling step: `a0 / 40`.
pub fn default_grid_step(p: &DiracParams) -> f64 {
    p.a0_mm / 40.0
}

/// Two-component wavefunction sampled on a uniform grid over `[0, d]`.
#[derive(Debug, Clone)]
pub struct SpinorField {
    pub x_mm: Vec<f64>,
    pub comp1: Vec<Complex64>,
    pub comp2: Vec<Complex64>,
    /// Relative mismatch of the two components across the interface.
    pub interface_residual: f64,
    /// Residual of the right-wall closure `H_D = r_R H_C`.
    pub wall_residual: f64,
    analytic: SpinorCoefficients,
}

#[derive(Debug, Clone, Copy)]
struct SpinorCoefficients {
    k: f64,
    kappa: f64,
    xi: f64,
    zeta: f64,
    a_mm: f64,
    d_mm: f64,
    p_a: Complex64,
    p_b: Complex64,
    h_c: Complex64,
    h_d: Complex64,
}

impl SpinorCoefficients {
    fn eval(&self, x: f64) -> (Complex64, Complex64) {
        let i = Complex64::i();
        if x < self.a_mm {
            let right = self.p_a * (i * self.k * x).exp();
            let left = self.p_b * (-i * self.k * x).exp();
            (right + left, self.xi * (right - left))
        } else {
            let to_right = self.h_c * (-i * self.kappa * (x - self.d_mm)).exp();
            let to_left = self.h_d * (i * self.kappa * (x - self.d_mm)).exp();
            (self.zeta * (to_right - to_left), to_right + to_left)
        }
    }

    fn scale(&mut self, factor: Complex64) {
        self.p_a *= factor;
        self.p_b *= factor;
        self.h_c *= factor;
        self.h_d *= factor;
    }
}

impl SpinorField {
    /// Evaluate the underlying analytic solution at an arbitrary point.
    pub fn eval(&self, x_mm: f64) -> (Complex64, Complex64) {
        self.analytic.eval(x_mm)
    }

    /// `|psi^(1)|^2 + |psi^(2)|^2` at a point.
    pub fn density(&self, x_mm: f64) -> f64 {
        let (c1, c2) = self.eval(x_mm);
        c1.norm_sqr() + c2.norm_sqr()
    }

    /// Trapezoid-rule norm over the stored grid.
    pub fn norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.x_mm.len() {
            let f0 = self.comp1[i - 1].norm_sqr() + self.comp2[i - 1].norm_sqr();
            let f1 = self.comp1[i].norm_sqr() + self.comp2[i].norm_sqr();
            acc += 0.5 * (f0 + f1) * (self.x_mm[i] - self.x_mm[i - 1]);
        }
        acc
    }

    /// Boundary-condition residuals `|Psi2/Psi1 + i|` at `x = 0` and
    /// `|Psi2/Psi1 - i|` at `x = d`.
    pub fn boundary_residuals(&self) -> (f64, f64) {
        let n = self.x_mm.len() - 1;
        let left = (self.comp2[0] / self.comp1[0] + Complex64::i()).norm();
        let right = (self.comp2[n] / self.comp1[n] - Complex64::i()).norm();
        (left, right)
    }

    /// Largest probability current `|Psi^dagger sigma_x Psi|` on the grid;
    /// identically zero for a bound state.
    pub fn max_current(&self) -> f64 {
        self.comp1
            .iter()
            .zip(&self.comp2)
            .map(|(c1, c2)| 2.0 * (c1.conj() * c2).re)
            .fold(0.0f64, |m, j| m.max(j.abs()))
    }
}

/// Build the normalized eigenstate at a quantized level.
pub fn build_eigenstate(
    energy_mhz: f64,
    p: &DiracParams,
    grid_step_mm: f64,
) -> Result<SpinorField, DiracError> {
    let g = quantization_residual(energy_mhz, p)?;
    if g.abs() >= 1e-8 {
        return Err(DiracError::NotALevel {
            energy_mhz,
            residual: g.abs(),
            limit: 1e-8,
        });
    }
    let kin = kinematics(energy_mhz, p)?;
    let co = interface_coefficients(&kin);
    let i = Complex64::i();
    let (a, d, b) = (p.a_mm, p.d_mm, p.step_region_mm());

    let p_b = Complex64::ONE;
    let p_a = co.r_left_wall * p_b;
    // Continuity at x = a: with e1 = e^{i kappa b}, e2 = e^{-i kappa b},
    //   zeta e1 H_C - zeta e2 H_D = Psi1(a-)
    //        e1 H_C +      e2 H_D = Psi2(a-)
    let e_right = p_a * (i * kin.k_per_mm * a).exp();
    let e_left = p_b * (-i * kin.k_per_mm * a).exp();
    let psi1_a = e_right + e_left;
    let psi2_a = kin.xi * (e_right - e_left);
    let e1 = (i * kin.kappa_per_mm * b).exp();
    let e2 = (-i * kin.kappa_per_mm * b).exp();
    let det = 2.0 * kin.zeta;
    if det.abs() < 1e-300 {
        return Err(DiracError::MatchingSingular { energy_mhz, residual: det.abs() });
    }
    let h_c = (psi1_a + kin.zeta * psi2_a) / (det * e1);
    let h_d = (kin.zeta * psi2_a - psi1_a) / (det * e2);

    let wall_residual = (h_d - co.r_right_wall * h_c).norm() / h_c.norm().max(h_d.norm());
    if wall_residual > 1e-6 {
        return Err(DiracError::MatchingSingular { energy_mhz, residual: wall_residual });
    }

    let mut coeffs = SpinorCoefficients {
        k: kin.k_per_mm,
        kappa: kin.kappa_per_mm,
        xi: kin.xi,
        zeta: kin.zeta,
        a_mm: a,
        d_mm: d,
        p_a,
        p_b,
        h_c,
        h_d,
    };

    // Phase convention: Psi1(0) real positive.
    let psi1_zero = coeffs.eval(0.0).0;
    coeffs.scale(psi1_zero.conj() / psi1_zero.norm());

    let n_cells = (d / grid_step_mm).round().max(8.0) as usize;
    let x_mm: Vec<f64> = (0..=n_cells).map(|j| d * j as f64 / n_cells as f64).collect();
    let mut field = SpinorField {
        comp1: x_mm.iter().map(|&x| coeffs.eval(x).0).collect(),
        comp2: x_mm.iter().map(|&x| coeffs.eval(x).1).collect(),
        x_mm,
        interface_residual: 0.0,
        wall_residual,
        analytic: coeffs,
    };

    // Normalize on the grid, then re-sample so stored samples and analytic
    // evaluation agree exactly.
    let scale = 1.0 / field.norm().sqrt();
    field.analytic.scale(scale.into());
    for (c1, c2) in field.comp1.iter_mut().zip(field.comp2.iter_mut()) {
        *c1 *= scale;
        *c2 *= scale;
    }

    let below = field.eval(a * (1.0 - 1e-14));
    let above = field.eval(a);
    let denom = below.0.norm().max(below.1.norm());
    field.interface_residual =
        ((below.0 - above.0).norm().max((below.1 - above.1).norm())) / denom;
    Ok(field)
}

/// Eigenstate of a single hard-walled box of length `L` without a step
/// (particle branch): the closed form behind the uncoupled half-chains.
pub fn build_box_eigenstate(
    energy_mhz: f64,
    length_mm: f64,
    p: &DiracParams,
    grid_step_mm: f64,
) -> Result<SpinorField, DiracError> {
    let kin = kinematics(energy_mhz, p)?;
    let phase = kin.k_per_mm * length_mm + 2.0 * kin.xi.atan();
    let closure = (phase / std::f64::consts::PI).round() * std::f64::consts::PI - phase;
    if closure.abs() >= 1e-8 {
        return Err(DiracError::NotALevel {
            energy_mhz,
            residual: closure.abs(),
            limit: 1e-8,
        });
    }
    let p_b = Complex64::ONE;
    let p_a = interface_coefficients(&kin).r_left_wall * p_b;
    let mut coeffs = SpinorCoefficients {
        k: kin.k_per_mm,
        kappa: 0.0,
        xi: kin.xi,
        zeta: 0.0,
        // The "interface" sits beyond the wall, so the particle region
        // covers the whole box.
        a_mm: f64::INFINITY,
        d_mm: length_mm,
        p_a,
        p_b,
        h_c: Complex64::ZERO,
        h_d: Complex64::ZERO,
    };
    let psi1_zero = coeffs.eval(0.0).0;
    coeffs.scale(psi1_zero.conj() / psi1_zero.norm());

    let n_cells = (length_mm / grid_step_mm).round().max(8.0) as usize;
    let x_mm: Vec<f64> = (0..=n_cells).map(|j| length_mm * j as f64 / n_cells as f64).collect();
    let mut field = SpinorField {
        comp1: x_mm.iter().map(|&x| coeffs.eval(x).0).collect(),
        comp2: x_mm.iter().map(|&x| coeffs.eval(x).1).collect(),
        x_mm,
        interface_residual: 0.0,
        wall_residual: closure.abs(),
        analytic: coeffs,
    };
    let scale = 1.0 / field.norm().sqrt();
    field.analytic.scale(scale.into());
    for (c1, c2) in field.comp1.iter_mut().zip(field.comp2.iter_mut()) {
        *c1 *= scale;
        *c2 *= scale;
    }
    Ok(field)
}
