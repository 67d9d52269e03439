use std::path::{Path, PathBuf};

use opplearn_core::{Bounds, OppositionScheme, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::experiments::ExperimentConfig;
use crate::io::write_json;

/// Settings recorded in a manifest, by command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifestConfig {
    Generate {
        function: String,
        samples: usize,
        seed: u64,
        domain: Option<Bounds>,
    },
    Mine {
        scheme: OppositionScheme,
    },
    Train {
        scheme: OppositionScheme,
        train: TrainConfig,
    },
    Predict {
        model: PathBuf,
    },
    Experiment {
        series: u8,
        config: ExperimentConfig,
        initial: Option<usize>,
        #[serde(rename = "final")]
        final_n: Option<usize>,
    },
}

/// Provenance written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: ManifestConfig,
    /// RFC 3339, UTC.
    pub started_at: String,
    pub tool_version: String,
    pub output_paths: Vec<PathBuf>,
}

impl RunManifest {
    pub fn start(command: impl Into<String>, config: ManifestConfig) -> Self {
        Self {
            command: command.into(),
            config,
            started_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            output_paths: Vec::new(),
        }
    }

    /// Writes the manifest to `path`; every listed output must already exist.
    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(missing) = self.output_paths.iter().find(|p| !p.exists()) {
            return Err(HarnessError::Usage(format!(
                "manifest lists missing output {}",
                missing.display()
            )));
        }
        write_json(path, self)
    }
}

/// `out.csv` -> `out.csv.manifest.json`.
pub fn manifest_path_for(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
