use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::ConfigDoc;
use crate::error::{Error, Result};
use crate::sim::SimConfig;

pub const MANIFEST_JSON: &str = "manifest.json";

/// Descriptor written next to the logs of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    /// Canonical flat config, keys sorted.
    pub config: Value,
    pub config_hash: String,
    /// `(master seed, stream)` per replication.
    pub seeds: Vec<(u64, u64)>,
    /// Output files, relative to the manifest's directory.
    pub files: Vec<String>,
    pub duration_secs: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(config: &SimConfig, seeds: Vec<(u64, u64)>, files: &[PathBuf], duration_secs: f64) -> Self {
        RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: ConfigDoc::from_sim_config(config).to_value(),
            config_hash: config.hash(),
            seeds,
            files: files
                .iter()
                .filter_map(|p| p.file_name())
                .map(|n| n.to_string_lossy().into_owned())
                .collect(),
            duration_secs,
            notes: Vec::new(),
        }
    }

    /// The echoed config, parsed back.
    pub fn sim_config(&self) -> Result<SimConfig> {
        ConfigDoc::parse(&self.config.to_string())?.to_sim_config()
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_JSON);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_JSON);
        if !path.exists() {
            return Err(Error::MissingInput(path));
        }
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Referenced files missing from `dir`.
    pub fn missing_files(&self, dir: &Path) -> Vec<PathBuf> {
        self.files.iter().map(|f| dir.join(f)).filter(|p| !p.exists()).collect()
    }
}
