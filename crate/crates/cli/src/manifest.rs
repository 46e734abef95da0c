//! Run provenance: every command writes a manifest with the resolved config,
//! seed, code version, wall time, and a checksum per output file. Feeding a
//! manifest back through `--config` reproduces the run byte-for-byte.

use crate::config::{EffectiveRun, ExperimentConfig};
use crate::{HarnessError, HarnessResult};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
    pub rows: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub code_version: String,
    pub seed: u64,
    pub wall_time_s: f64,
    pub outputs: Vec<OutputRecord>,
    pub config: ExperimentConfig,
}

/// Collects outputs for one run and writes them plus the manifest.
pub struct RunWriter {
    run: EffectiveRun,
    started: Instant,
    outputs: Vec<OutputRecord>,
}

impl RunWriter {
    pub fn new(run: &EffectiveRun) -> HarnessResult<Self> {
        std::fs::create_dir_all(&run.out_dir)
            .map_err(|e| HarnessError::Other(anyhow::anyhow!("creating {}: {e}", run.out_dir.display())))?;
        Ok(Self { run: run.clone(), started: Instant::now(), outputs: Vec::new() })
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.run.out_dir.join(name)
    }

    /// Write one artifact and record its checksum.
    pub fn write_output(&mut self, name: &str, bytes: &[u8], rows: usize) -> HarnessResult<PathBuf> {
        let path = self.out_path(name);
        std::fs::write(&path, bytes)
            .map_err(|e| HarnessError::Other(anyhow::anyhow!("writing {}: {e}", path.display())))?;
        self.outputs.push(OutputRecord { path: name.to_string(), sha256: hex_digest(bytes), rows });
        Ok(path)
    }

    /// Finalize: write `<command>_manifest.json` next to the outputs.
    pub fn finish(self) -> HarnessResult<PathBuf> {
        let manifest = RunManifest {
            command: self.run.kind.command_name().to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.run.seed,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs,
            config: self.run.config.clone(),
        };
        let path = self.run.out_dir.join(format!("{}_manifest.json", manifest.command.replace('-', "_")));
        let body = serde_json::to_vec_pretty(&manifest)
            .map_err(|e| HarnessError::Other(anyhow::anyhow!("manifest encode: {e}")))?;
        std::fs::write(&path, body)
            .map_err(|e| HarnessError::Other(anyhow::anyhow!("writing {}: {e}", path.display())))?;
        Ok(path)
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Load a manifest back (used by tests and the config loader).
pub fn read_manifest(path: &Path) -> HarnessResult<RunManifest> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Validation(format!("cannot read manifest {}: {e}", path.display())))?;
    serde_json::from_str(&raw).map_err(|e| HarnessError::Validation(format!("malformed manifest: {e}")))
}
