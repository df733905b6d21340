pub mod ldos;
pub mod levels;
pub mod pipeline;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use kleinbox_core::error::PipelineError;

pub type CmdResult = Result<ExitCode, PipelineError>;

pub fn write_artifact(
    dir: &Path,
    name: &str,
    content: &str,
    outputs: &mut Vec<String>,
) -> Result<PathBuf, PipelineError> {
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::Stage {
        stage: "write artifact",
        message: format!("cannot create {}: {e}", dir.display()),
    })?;
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|e| PipelineError::Stage {
        stage: "write artifact",
        message: format!("cannot write {}: {e}", path.display()),
    })?;
    outputs.push(name.to_string());
    Ok(path)
}
