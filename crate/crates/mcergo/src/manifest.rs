use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::formats::write_file;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputHash {
    pub file: String,
    pub sha256: String,
}

/// Everything needed to reproduce a run: the exact configuration, its hash,
/// the seed, and the toolkit version, plus hashes of the files written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub outputs: Vec<OutputHash>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Manifest {
    pub fn new(config: &ExperimentConfig, outputs: &[(String, String)]) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: sha256_hex(config.to_json().as_bytes()),
            seed: config.seed,
            config: config.clone(),
            outputs: outputs
                .iter()
                .map(|(file, body)| OutputHash {
                    file: file.clone(),
                    sha256: sha256_hex(body.as_bytes()),
                })
                .collect(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let body = serde_json::to_string_pretty(self).expect("manifest serializes") + "\n";
        write_file(&dir.join(MANIFEST_FILE), &body)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}
