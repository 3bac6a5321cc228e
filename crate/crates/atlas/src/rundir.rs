//! Run directory: the only place a command writes its outputs.
//!
//! Each file is hashed as it is written so the manifest can list it.

use std::path::{Path, PathBuf};
use std::time::Instant;

use nls_core::groundstate::{PohozaevResiduals, QNorms, ShootingOptions};
use nls_core::params_well::ExponentSet;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::failure::Failure;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateRecord {
    pub q0: f64,
    pub norms: QNorms,
    pub pohozaev: PohozaevResiduals,
    pub shooting: ShootingOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: RunConfig,
    pub exponents: ExponentSet,
    pub ground_state: Option<GroundStateRecord>,
    pub files: Vec<FileRecord>,
    pub steps: u64,
    pub wall_clock_seconds: f64,
}

pub struct RunDir {
    root: PathBuf,
    files: Vec<FileRecord>,
    started: Instant,
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self, Failure> {
        std::fs::create_dir_all(root)
            .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), Failure> {
        let path = self.root.join(name);
        std::fs::write(&path, bytes)
            .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?;
        let digest = Sha256::digest(bytes);
        self.files.retain(|f| f.name != name);
        self.files.push(FileRecord {
            name: name.to_string(),
            sha256: hex::encode(digest),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        let mut text =
            serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn files(&self) -> &[FileRecord] {
        &self.files
    }

    /// Writes `manifest.json` (not listed in itself).
    pub fn finish(
        self,
        command: &str,
        config: &RunConfig,
        exponents: ExponentSet,
        ground_state: Option<GroundStateRecord>,
        steps: u64,
    ) -> Result<RunManifest, Failure> {
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed: config.seed,
            config: config.clone(),
            exponents,
            ground_state,
            files: self.files.clone(),
            steps,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        };
        let text =
            serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Runtime(e.to_string()))?;
        let path = self.root.join("manifest.json");
        std::fs::write(&path, text + "\n")
            .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?;
        Ok(manifest)
    }
}

/// Reads a manifest back, e.g. to re-run its configuration.
pub fn read_manifest(path: &Path) -> Result<RunManifest, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("bad manifest {}: {e}", path.display())))
}
