//! Experiment presets and the published microwave-chain constants.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::lattice::ChainSpec;
use crate::params::{DiracParams, Geometry};

/// Constants extracted from the dielectric-resonator realization.
pub mod published {
    use crate::params::{DiracParams, Geometry};

    /// Rest-mass energy `mc^2 = v - w` (MHz).
    pub const MC2_MHZ: f64 = 12.894;
    /// `c hbar / a0 = w` (MHz).
    pub const HBAR_C_OVER_A0_MHZ: f64 = 61.325;
    /// Dirac-point frequency (MHz).
    pub const F0_MHZ: f64 = 6713.0;
    /// Step height `V0 = delta f` (MHz).
    pub const V0_MHZ: f64 = 81.5;
    /// Lattice constant (mm).
    pub const A0_MM: f64 = 20.5;
    /// Per-resonator frequency scatter (MHz).
    pub const DISORDER_SIGMA_MHZ: f64 = 2.7;

    /// Intra-dimer coupling `v = w + mc^2` (MHz). Only `v - w` and `w` are
    /// published, which fixes both couplings.
    pub const V_COUPLING_MHZ: f64 = HBAR_C_OVER_A0_MHZ + MC2_MHZ;
    /// Inter-dimer coupling `w` (MHz).
    pub const W_COUPLING_MHZ: f64 = HBAR_C_OVER_A0_MHZ;

    pub fn params(geometry: Geometry) -> DiracParams {
        DiracParams::from_geometry(
            geometry,
            MC2_MHZ,
            HBAR_C_OVER_A0_MHZ * A0_MM,
            F0_MHZ,
            V0_MHZ,
            A0_MM,
        )
        .expect("published constants satisfy the window invariants")
    }

    /// Symmetric (15, 15) geometry.
    pub fn e1_params() -> DiracParams {
        params(Geometry { n_left: 15, n_right: 15 })
    }

    /// Asymmetric (15, 9) geometry.
    pub fn e4_params() -> DiracParams {
        params(Geometry { n_left: 15, n_right: 9 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetId {
    E1,
    E2,
    E3,
    E4,
}

impl PresetId {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s.to_ascii_lowercase().as_str() {
            "e1" => Ok(Self::E1),
            "e2" => Ok(Self::E2),
            "e3" => Ok(Self::E3),
            "e4" => Ok(Self::E4),
            other => Err(ConfigError::UnknownPreset(other.to_string())),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::E1 => "e1",
            Self::E2 => "e2",
            Self::E3 => "e3",
            Self::E4 => "e4",
        }
    }
}

/// One of the four chain experiments.
///
/// E1 and E2 are independent disorder realizations of the symmetric
/// (15, 15) chain and differ only in seed. E3 reuses E1's disorder draws
/// but permutes their placement within each side. E4 is the asymmetric
/// (15, 9) chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPreset {
    pub id: PresetId,
    pub geometry: Geometry,
    pub disorder_sigma_mhz: f64,
    pub seed: u64,
    pub permute: bool,
}

impl ExperimentPreset {
    pub fn get(id: PresetId) -> Self {
        let sym = Geometry { n_left: 15, n_right: 15 };
        match id {
            PresetId::E1 => Self {
                id,
                geometry: sym,
                disorder_sigma_mhz: published::DISORDER_SIGMA_MHZ,
                seed: 11,
                permute: false,
            },
            PresetId::E2 => Self { seed: 22, ..Self::get(PresetId::E1) }.with_id(id),
            PresetId::E3 => Self { permute: true, ..Self::get(PresetId::E1) }.with_id(id),
            PresetId::E4 => Self {
                id,
                geometry: Geometry { n_left: 15, n_right: 9 },
                disorder_sigma_mhz: published::DISORDER_SIGMA_MHZ,
                seed: 44,
                permute: false,
            },
        }
    }

    fn with_id(mut self, id: PresetId) -> Self {
        self.id = id;
        self
    }

    pub fn params(&self) -> DiracParams {
        published::params(self.geometry)
    }

    /// Chain of the whole system: left side pinned to `f0`, right side to
    /// `f0 + V0`, so lattice and continuum share the Dirac point exactly.
    pub fn chain(&self) -> ChainSpec {
        let p = self.params();
        ChainSpec {
            n_left: self.geometry.n_left,
            n_right: self.geometry.n_right,
            v_mhz: published::V_COUPLING_MHZ,
            w_mhz: published::W_COUPLING_MHZ,
            onsite_left_mhz: p.f0_mhz,
            onsite_right_mhz: p.f0_mhz + p.v0_mhz,
            disorder_sigma_mhz: self.disorder_sigma_mhz,
            seed: self.seed,
            permute: self.permute,
            disorder_offset: 0,
        }
    }

    /// The left dimers alone (particle side).
    pub fn chain_left_alone(&self) -> ChainSpec {
        let mut c = self.chain();
        c.n_right = 0;
        c
    }

    /// The right dimers alone (hole side). The disorder offset makes the
    /// sub-chain reuse exactly the draws of the whole system's right side,
    /// the same resonators measured alone and together.
    pub fn chain_right_alone(&self) -> ChainSpec {
        ChainSpec {
            n_left: 0,
            disorder_offset: 2 * self.geometry.n_left,
            ..self.chain()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e1_e2_differ_only_in_seed() {
        let e1 = ExperimentPreset::get(PresetId::E1);
        let e2 = ExperimentPreset::get(PresetId::E2);
        assert_ne!(e1.seed, e2.seed);
        assert_eq!(e1.geometry, e2.geometry);
        assert_eq!(e1.disorder_sigma_mhz, e2.disorder_sigma_mhz);
        assert_eq!(e1.permute, e2.permute);
    }

    #[test]
    fn e3_is_permuted_e1() {
        let e1 = ExperimentPreset::get(PresetId::E1);
        let e3 = ExperimentPreset::get(PresetId::E3);
        assert_eq!(e1.seed, e3.seed);
        assert_eq!(e1.geometry, e3.geometry);
        assert!(e3.permute && !e1.permute);
    }

    #[test]
    fn e4_is_asymmetric() {
        let e4 = ExperimentPreset::get(PresetId::E4);
        assert_eq!((e4.geometry.n_left, e4.geometry.n_right), (15, 9));
    }

    #[test]
    fn coupling_difference_is_the_mass() {
        assert!((published::V_COUPLING_MHZ - published::W_COUPLING_MHZ - published::MC2_MHZ).abs() < 1e-12);
    }
}
