//! Dense eigendecomposition of the chain Hamiltonian.
//!
//! The matrix is already symmetric tridiagonal, so the implicit-shift QL
//! iteration diagonalizes it directly while accumulating the rotations
//! into the eigenvector matrix. Eigenpairs are returned sorted ascending
//! with a deterministic sign convention (largest-magnitude component
//! positive).

use serde::{Deserialize, Serialize};

use crate::error::LatticeError;

use super::{build_hamiltonian, ChainSpec, Tridiagonal};

/// Position of a level relative to the Klein window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelClass {
    /// Below the window: hole band.
    HoleBand,
    /// Inside the particle-hole hybridization window.
    KleinWindow,
    /// Above the window: particle band.
    ParticleBand,
}

/// All eigenpairs of one chain realization.
#[derive(Debug, Clone)]
pub struct LatticeEigensystem {
    /// Eigenfrequencies (MHz, ascending).
    pub frequencies_mhz: Vec<f64>,
    /// `vectors[j]` is the orthonormal eigenvector of level `j`.
    vectors: Vec<Vec<f64>>,
    /// Classification against the window used at solve time.
    pub classes: Vec<LevelClass>,
}

impl LatticeEigensystem {
    pub fn n_levels(&self) -> usize {
        self.frequencies_mhz.len()
    }

    pub fn n_sites(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    pub fn vector(&self, level: usize) -> Result<&[f64], LatticeError> {
        self.vectors
            .get(level)
            .map(Vec::as_slice)
            .ok_or(LatticeError::LevelOutOfRange { index: level, count: self.n_levels() })
    }

    /// Indices of levels inside a frequency window.
    pub fn indices_in_window(&self, lo_mhz: f64, hi_mhz: f64) -> Vec<usize> {
        self.frequencies_mhz
            .iter()
            .enumerate()
            .filter(|(_, &f)| f > lo_mhz && f < hi_mhz)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn frequencies_in_window(&self, lo_mhz: f64, hi_mhz: f64) -> Vec<f64> {
        self.indices_in_window(lo_mhz, hi_mhz)
            .into_iter()
            .map(|i| self.frequencies_mhz[i])
            .collect()
    }

    /// Dirac-point estimate: the midpoint between the two levels that
    /// straddle the band gap. Exact for a clean chain, where the spectrum
    /// of the coupling part is symmetric about the on-site frequency.
    pub fn midgap_mhz(&self) -> f64 {
        let n = self.n_levels() / 2;
        0.5 * (self.frequencies_mhz[n - 1] + self.frequencies_mhz[n])
    }
}

/// Eigendecomposition of a symmetric tridiagonal matrix; classification is
/// filled against the window `(lo, hi)` when given.
pub fn eigensolve(h: &Tridiagonal) -> Result<LatticeEigensystem, LatticeError> {
    let n = h.n();
    let mut d = h.diag.clone();
    let mut e = h.off.clone();
    e.push(0.0);
    // z[k][j]: component k of (eventual) eigenvector j
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|k| (0..n).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
        .collect();

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(LatticeError::NoConvergence { index: l });
            }
            // Wilkinson-style implicit shift.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0_f64, 1.0_f64);
            let mut p = 0.0_f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for zk in z.iter_mut() {
                    f = zk[i + 1];
                    zk[i + 1] = s * zk[i] + c * f;
                    zk[i] = c * zk[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let frequencies_mhz: Vec<f64> = order.iter().map(|&j| d[j]).collect();
    let mut vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| (0..n).map(|k| z[k][j]).collect())
        .collect();
    for v in &mut vectors {
        let dominant = v
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap();
        if v[dominant] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }

    Ok(LatticeEigensystem { frequencies_mhz, vectors, classes: Vec::new() })
}

/// Build and diagonalize a chain, classifying levels against its window.
pub fn solve_chain(spec: &ChainSpec) -> Result<LatticeEigensystem, LatticeError> {
    let h = build_hamiltonian(spec)?;
    let mut eig = eigensolve(&h)?;
    let (lo, hi) = spec.klein_window_abs();
    eig.classes = eig
        .frequencies_mhz
        .iter()
        .map(|&f| {
            if f <= lo {
                LevelClass::HoleBand
            } else if f >= hi {
                LevelClass::ParticleBand
            } else {
                LevelClass::KleinWindow
            }
        })
        .collect();
    Ok(eig)
}
