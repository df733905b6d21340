//! Run manifest: the config snapshot plus every flag that shapes the
//! outputs, enough to reproduce a run bit-identically.

use serde::{Deserialize, Serialize};

use kleinbox_core::config::RunConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    pub seeds: usize,
    pub gamma_mhz: f64,
    pub grid_step_mm: Option<f64>,
    pub write_traces: bool,
    pub format: String,
    /// Relative paths of every file the run wrote.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: RunConfig) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            seeds: 0,
            gamma_mhz: 2.0,
            grid_step_mm: None,
            write_traces: false,
            format: "csv".to_string(),
            outputs: Vec::new(),
        }
    }
}
