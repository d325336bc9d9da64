//! run.json: the full config, the realized seed, component versions, wall
//! time, and the artifact list. The config block round-trips losslessly, so
//! `--config run.json` replays the run.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Versions {
    pub tzl: String,
    #[serde(rename = "tzl-core")]
    pub core: String,
}

impl Versions {
    pub fn current() -> Self {
        Versions {
            tzl: env!("CARGO_PKG_VERSION").to_string(),
            core: tzl_core::VERSION.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub versions: Versions,
    pub wall_seconds: f64,
    pub artifacts: Vec<String>,
    #[serde(default)]
    pub summary: serde_json::Value,
}

/// Write run.json, then read it back and require the parsed config to equal
/// the one in memory.
pub fn write_and_verify(dir: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let path = dir.join("run.json");
    let mut text = serde_json::to_string_pretty(manifest)
        .map_err(|e| CliError::Numerical(format!("cannot serialize manifest: {e}")))?;
    text.push('\n');
    fs::write(&path, text)
        .map_err(|e| CliError::Precondition(format!("cannot write {}: {e}", path.display())))?;
    let back = fs::read_to_string(&path)
        .map_err(|e| CliError::Numerical(format!("cannot re-read {}: {e}", path.display())))?;
    let parsed: RunManifest = serde_json::from_str(&back)
        .map_err(|e| CliError::Numerical(format!("manifest does not parse back: {e}")))?;
    if parsed.config != manifest.config {
        return Err(CliError::Numerical(
            "manifest config round-trip mismatch".into(),
        ));
    }
    Ok(())
}

/// Load a config from a JSON file: either a bare `ExperimentConfig` or a
/// full manifest, recognized by its `config` key.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Precondition(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Precondition(format!("malformed config {}: {e}", path.display())))?;
    let config_value = match value.get("config") {
        Some(inner) => inner.clone(),
        None => value,
    };
    serde_json::from_value(config_value)
        .map_err(|e| CliError::Precondition(format!("malformed config {}: {e}", path.display())))
}
