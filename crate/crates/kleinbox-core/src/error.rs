//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("Klein window empty: need V0 > 2 mc^2, got V0 = {v0_mhz} MHz, mc^2 = {mc2_mhz} MHz")]
    EmptyKleinWindow { v0_mhz: f64, mc2_mhz: f64 },
    #[error("dimer counts must be positive, got ({n_left}, {n_right})")]
    NonPositiveCount { n_left: usize, n_right: usize },
}

#[derive(Debug, Error)]
pub enum DiracError {
    #[error("E = {energy_mhz} MHz below the Klein window bound mc^2 + eps = {bound_mhz} MHz")]
    BelowWindow { energy_mhz: f64, bound_mhz: f64 },
    #[error("E = {energy_mhz} MHz above the Klein window bound V0 - mc^2 - eps = {bound_mhz} MHz")]
    AboveWindow { energy_mhz: f64, bound_mhz: f64 },
    #[error("root scan unstable: level count kept changing after {escalations} grid escalations")]
    ScanUnstable { escalations: usize },
    #[error("eigenstate matching system singular at E = {energy_mhz} MHz (residual {residual})")]
    MatchingSingular { energy_mhz: f64, residual: f64 },
    #[error("E = {energy_mhz} MHz is not a quantized level: |g| = {residual} exceeds {limit}")]
    NotALevel { energy_mhz: f64, residual: f64, limit: f64 },
    #[error(transparent)]
    Param(#[from] ParamError),
}

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("chain spec invalid: {0}")]
    BadSpec(String),
    #[error("eigensolve failed to converge at index {index}")]
    NoConvergence { index: usize },
    #[error("level index {index} out of range (have {count})")]
    LevelOutOfRange { index: usize, count: usize },
    #[error("segment too short: {n_sites} sites, need at least {min}")]
    SegmentTooShort { n_sites: usize, min: usize },
    #[error("in-window level count mismatch: lattice has {lattice}, continuum has {continuum}")]
    LevelCountMismatch { lattice: usize, continuum: usize },
}

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least {min} data points for {what}, got {got}")]
    TooFewPoints { what: &'static str, min: usize, got: usize },
    #[error("residual dimension {residuals} smaller than parameter dimension {params}")]
    Underdetermined { residuals: usize, params: usize },
    #[error("wavevector {k_per_mm} 1/mm outside the hole branch (imaginary kappa at fitted mass)")]
    HoleBranchDomain { k_per_mm: f64 },
    #[error("model/measured level count mismatch inside the scan window: model {model}, measured {measured}")]
    LevelCountMismatch { model: usize, measured: usize },
    #[error("fewer than half the probe sites produced a converged fit ({converged}/{total})")]
    TooFewConverged { converged: usize, total: usize },
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dirac(#[from] DiracError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("pipeline stage {stage}: {message}")]
    Stage { stage: &'static str, message: String },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("missing key {0:?}")]
    MissingKey(&'static str),
    #[error("key {key:?}: cannot parse {value:?} as {ty}")]
    BadValue { key: String, value: String, ty: &'static str },
    #[error("unknown preset {0:?} (expected e1, e2, e3 or e4)")]
    UnknownPreset(String),
    #[error(transparent)]
    Param(#[from] ParamError),
}
