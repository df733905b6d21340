//! Tight-binding dimer chain emulating the stepped Dirac box.
//!
//! Sites alternate A, B along the chain; the intra-dimer coupling `v` and
//! inter-dimer coupling `w` satisfy `v > w > 0` (trivial dimerization, no
//! in-gap edge modes). The left `n_left` dimers sit at the Dirac-point
//! frequency, the right `n_right` dimers at `f0 + V0`. Open ends are
//! equivalent to ghost resonators with vanishing amplitude: B_0 at `x = 0`
//! and A_{N+1} at `x = d = (N + 1/2) a0`, which is what ties the chain to
//! the infinite-mass boundary conditions of the continuum box.
//!
//! Disorder models the scatter of bare resonator frequencies: independent
//! Gaussian draws on the diagonal only, indexed by physical site so that a
//! sub-chain built from the same seed sees exactly the frequencies it has
//! in the full system. The optional permutation reshuffles draws within
//! each side (the experiment can reorder resonators of one radius, but a
//! left resonator never moves to the right side).

mod compare;
mod eigen;
mod envelope;

pub use compare::{compare_intensities, compare_levels, IntensityDeviation, LevelComparison};
pub use eigen::{eigensolve, solve_chain, LatticeEigensystem, LevelClass};
pub use envelope::{
    count_intensity_peaks, dominant_frequency, estimate_wavevector, extrapolate_to,
    sublattice_envelopes, Segment, SublatticeEnvelopes, WavevectorEstimate,
};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::LatticeError;

/// Description of one dimer chain realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n_left: usize,
    pub n_right: usize,
    /// Intra-dimer coupling (MHz).
    pub v_mhz: f64,
    /// Inter-dimer coupling (MHz).
    pub w_mhz: f64,
    /// On-site frequency of the left dimers (MHz).
    pub onsite_left_mhz: f64,
    /// On-site frequency of the right dimers (MHz).
    pub onsite_right_mhz: f64,
    /// Standard deviation of the per-site frequency scatter (MHz).
    pub disorder_sigma_mhz: f64,
    pub seed: u64,
    /// Reshuffle the disorder draws within each side.
    pub permute: bool,
    /// Physical index of this chain's first site in its parent system;
    /// nonzero for sub-chains so they reuse the parent's draws.
    #[serde(default)]
    pub disorder_offset: usize,
}

/// Symmetric tridiagonal matrix stored as diagonal + subdiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// `H v` for a dense vector.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * v[i + 1];
            }
            out[i] = s;
        }
        out
    }
}

impl ChainSpec {
    pub fn validate(&self) -> Result<(), LatticeError> {
        if self.n_left + self.n_right == 0 {
            return Err(LatticeError::BadSpec("chain has no dimers".into()));
        }
        if !(self.v_mhz > self.w_mhz && self.w_mhz > 0.0) {
            return Err(LatticeError::BadSpec(format!(
                "need v > w > 0, got v = {}, w = {}",
                self.v_mhz, self.w_mhz
            )));
        }
        Ok(())
    }

    pub fn n_dimers(&self) -> usize {
        self.n_left + self.n_right
    }

    pub fn n_sites(&self) -> usize {
        2 * self.n_dimers()
    }

    /// Rest-mass energy of the equivalent continuum model, `v - w`.
    pub fn mc2_mhz(&self) -> f64 {
        self.v_mhz - self.w_mhz
    }

    /// Klein window in absolute frequency, using the lower on-site value as
    /// the Dirac point.
    pub fn klein_window_abs(&self) -> (f64, f64) {
        let f0 = self.onsite_left_mhz.min(self.onsite_right_mhz);
        let top = self.onsite_left_mhz.max(self.onsite_right_mhz);
        (f0 + self.mc2_mhz(), top - self.mc2_mhz())
    }

    /// The disorder draw (in units of sigma) for every physical site of
    /// this chain, permuted when requested.
    fn disorder_draws(&self) -> Vec<f64> {
        let n = self.n_sites();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(0);
        let mut draws: Vec<f64> = (0..self.disorder_offset + n)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        if self.permute {
            // Shuffle within each same-side block, keyed by the block's
            // first physical index so sub-chains agree with the parent.
            let left_sites = 2 * self.n_left;
            let blocks = [
                (self.disorder_offset, left_sites),
                (self.disorder_offset + left_sites, n - left_sites),
            ];
            for (start, len) in blocks {
                if len == 0 {
                    continue;
                }
                let mut block_rng = ChaCha8Rng::seed_from_u64(self.seed);
                block_rng.set_stream(1 + start as u64);
                draws[start..start + len].shuffle(&mut block_rng);
            }
        }
        draws.split_off(self.disorder_offset)
    }

    /// On-site frequency of site `i` (0-based) before disorder.
    fn onsite(&self, i: usize) -> f64 {
        if i < 2 * self.n_left {
            self.onsite_left_mhz
        } else {
            self.onsite_right_mhz
        }
    }
}

/// Assemble the chain Hamiltonian: on-site frequencies (plus the disorder
/// draw) on the diagonal, couplings alternating v, w, v, ... off it.
pub fn build_hamiltonian(spec: &ChainSpec) -> Result<Tridiagonal, LatticeError> {
    spec.validate()?;
    let n = spec.n_sites();
    let draws = spec.disorder_draws();
    let diag = (0..n)
        .map(|i| spec.onsite(i) + spec.disorder_sigma_mhz * draws[i])
        .collect();
    let off = (0..n - 1)
        .map(|i| if i % 2 == 0 { spec.v_mhz } else { spec.w_mhz })
        .collect();
    Ok(Tridiagonal { diag, off })
}

/// Continuum coordinates of the chain sites.
///
/// `A_j` sits at `(j - 1/2) a0`, `B_j` at `j a0`; the ghost sites `B_0` and
/// `A_{N+1}` sit at `x = 0` and `x = d`.
#[derive(Debug, Clone, Copy)]
pub struct SiteMap {
    pub a0_mm: f64,
    pub n_dimers: usize,
}

impl SiteMap {
    pub fn new(a0_mm: f64, n_dimers: usize) -> Self {
        Self { a0_mm, n_dimers }
    }

    pub fn for_chain(spec: &ChainSpec, a0_mm: f64) -> Self {
        Self::new(a0_mm, spec.n_dimers())
    }

    /// Is site `i` (0-based) on the A sublattice?
    pub fn is_a_site(i: usize) -> bool {
        i % 2 == 0
    }

    /// Coordinate of 0-based site `i`.
    pub fn x_of_site(&self, i: usize) -> f64 {
        let dimer = i / 2;
        if Self::is_a_site(i) {
            (dimer as f64 + 0.5) * self.a0_mm
        } else {
            (dimer as f64 + 1.0) * self.a0_mm
        }
    }

    pub fn box_length_mm(&self) -> f64 {
        (self.n_dimers as f64 + 0.5) * self.a0_mm
    }

    pub fn ghost_left_mm(&self) -> f64 {
        0.0
    }

    pub fn ghost_right_mm(&self) -> f64 {
        self.box_length_mm()
    }
}
