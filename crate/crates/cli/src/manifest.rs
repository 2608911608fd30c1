//! Provenance record written next to every artifact.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Fully resolved parameters, defaults included.
    pub params: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<PathBuf>,
    /// Arguments after the program name; replay re-parses these.
    pub argv: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, params: Value, seed: Option<u64>, outputs: Vec<PathBuf>, argv: Vec<String>) -> Self {
        Self {
            subcommand: subcommand.into(),
            params,
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
            outputs,
            argv,
        }
    }

    /// `<out>.manifest.json` for file outputs.
    pub fn path_for(out: &Path) -> PathBuf {
        let mut s = out.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifests serialize");
        std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Domain(format!("{}: not a run manifest: {e}", path.display())))
    }
}
