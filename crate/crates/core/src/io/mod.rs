//! File formats: complex-matrix CSV, Touchstone v1 export, per-iteration
//! trace CSV, and TOML scene configuration.

pub mod matrix_csv;
pub mod touchstone;
pub mod trace;

use crate::error::{Error, Result};
use crate::scene::SceneConfig;
use std::path::Path;

/// Read and validate a TOML scene configuration.
pub fn read_scene_config(path: &Path) -> Result<SceneConfig> {
    let text = std::fs::read_to_string(path)?;
    let config: SceneConfig = toml::from_str(&text)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    config.validate()?;
    Ok(config)
}
