//! Flat key=value run configuration.
//!
//! The on-disk format is UTF-8 `key = value` lines with `#` comments and
//! unit suffixes spelled out in the key names. `f64` values are written
//! with the shortest representation that parses back to the same bits, so
//! a render/parse round trip is exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::lattice::ChainSpec;
use crate::params::{DiracParams, Geometry};
use crate::presets::{published, ExperimentPreset, PresetId};

/// Everything needed to reproduce one run: geometry, continuum constants,
/// and the disorder draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n_left: usize,
    pub n_right: usize,
    pub mc2_mhz: f64,
    pub hbar_c_mhz_mm: f64,
    pub f0_mhz: f64,
    pub v0_mhz: f64,
    pub a0_mm: f64,
    pub disorder_sigma_mhz: f64,
    pub seed: u64,
    pub permute: bool,
}

impl RunConfig {
    pub fn from_preset(preset: &ExperimentPreset) -> Self {
        Self {
            n_left: preset.geometry.n_left,
            n_right: preset.geometry.n_right,
            mc2_mhz: published::MC2_MHZ,
            hbar_c_mhz_mm: published::HBAR_C_OVER_A0_MHZ * published::A0_MM,
            f0_mhz: published::F0_MHZ,
            v0_mhz: published::V0_MHZ,
            a0_mm: published::A0_MM,
            disorder_sigma_mhz: preset.disorder_sigma_mhz,
            seed: preset.seed,
            permute: preset.permute,
        }
    }

    pub fn preset(id: PresetId) -> Self {
        Self::from_preset(&ExperimentPreset::get(id))
    }

    pub fn geometry(&self) -> Result<Geometry, ConfigError> {
        Ok(Geometry::new(self.n_left, self.n_right)?)
    }

    pub fn params(&self) -> Result<DiracParams, ConfigError> {
        Ok(DiracParams::from_geometry(
            self.geometry()?,
            self.mc2_mhz,
            self.hbar_c_mhz_mm,
            self.f0_mhz,
            self.v0_mhz,
            self.a0_mm,
        )?)
    }

    pub fn chain(&self) -> Result<ChainSpec, ConfigError> {
        Ok(ChainSpec {
            n_left: self.n_left,
            n_right: self.n_right,
            v_mhz: self.hbar_c_mhz_mm / self.a0_mm + self.mc2_mhz,
            w_mhz: self.hbar_c_mhz_mm / self.a0_mm,
            onsite_left_mhz: self.f0_mhz,
            onsite_right_mhz: self.f0_mhz + self.v0_mhz,
            disorder_sigma_mhz: self.disorder_sigma_mhz,
            seed: self.seed,
            permute: self.permute,
            disorder_offset: 0,
        })
    }

    /// Render as the key=value file format.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# kleinbox run configuration");
        let _ = writeln!(s, "n_left = {}", self.n_left);
        let _ = writeln!(s, "n_right = {}", self.n_right);
        let _ = writeln!(s, "mc2_mhz = {}", self.mc2_mhz);
        let _ = writeln!(s, "hbar_c_mhz_mm = {}", self.hbar_c_mhz_mm);
        let _ = writeln!(s, "f0_mhz = {}", self.f0_mhz);
        let _ = writeln!(s, "v0_mhz = {}", self.v0_mhz);
        let _ = writeln!(s, "a0_mm = {}", self.a0_mm);
        let _ = writeln!(s, "disorder_sigma_mhz = {}", self.disorder_sigma_mhz);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "permute = {}", self.permute);
        s
    }

    /// Parse the key=value format. Unknown keys are rejected to catch typos.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Malformed { line: i + 1, text: raw.to_string() })?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        let mut cfg = Self {
            n_left: take_parse(&mut map, "n_left")?,
            n_right: take_parse(&mut map, "n_right")?,
            mc2_mhz: take_parse(&mut map, "mc2_mhz")?,
            hbar_c_mhz_mm: take_parse(&mut map, "hbar_c_mhz_mm")?,
            f0_mhz: take_parse(&mut map, "f0_mhz")?,
            v0_mhz: take_parse(&mut map, "v0_mhz")?,
            a0_mm: take_parse(&mut map, "a0_mm")?,
            disorder_sigma_mhz: take_parse(&mut map, "disorder_sigma_mhz")?,
            seed: take_parse(&mut map, "seed")?,
            permute: false,
        };
        cfg.permute = take_parse(&mut map, "permute")?;
        if let Some((key, value)) = map.into_iter().next() {
            return Err(ConfigError::BadValue { key, value, ty: "known key" });
        }
        Ok(cfg)
    }
}

fn take_parse<T: std::str::FromStr>(
    map: &mut BTreeMap<String, String>,
    key: &'static str,
) -> Result<T, ConfigError> {
    let value = map.remove(key).ok_or(ConfigError::MissingKey(key))?;
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value,
        ty: std::any::type_name::<T>(),
    })
}
