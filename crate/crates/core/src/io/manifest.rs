//! Run manifest: resolved parameters, run statistics, and content digests of
//! every file a run wrote.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::params::{Grid, SimParams};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub n: usize,
    pub length: f64,
    pub dx: f64,
}

impl From<&Grid> for GridInfo {
    fn from(g: &Grid) -> Self {
        GridInfo {
            n: g.n(),
            length: g.length(),
            dx: g.dx(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub params: SimParams,
    /// The same parameters as a configuration document.
    pub config: String,
    pub grid: GridInfo,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub status: RunStatus,
    pub failure: Option<String>,
    pub max_energy_drift: f64,
    pub max_stage_residual: f64,
    pub label: Option<String>,
    pub files: Vec<FileDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_file(dir: &Path, name: &str) -> Result<FileDigest> {
    let bytes = fs::read(dir.join(name))?;
    Ok(FileDigest {
        name: name.to_string(),
        bytes: bytes.len() as u64,
        sha256: sha256_hex(&bytes),
    })
}

/// Writes `contents` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> Result<()> {
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, dir.join(name))?;
    Ok(())
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| Error::Malformed {
            file: MANIFEST_FILE.into(),
            message: e.to_string(),
        })?;
        text.push('\n');
        write_atomic(dir, MANIFEST_FILE, text.as_bytes())
    }

    pub fn read(dir: &Path) -> Result<Self> {
        Self::read_file(&dir.join(MANIFEST_FILE))
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Malformed {
            file: path.display().to_string(),
            message: e.to_string(),
        })
    }

    /// Names of inventoried files whose current content no longer matches
    /// the recorded digest (missing files included).
    pub fn verify(&self, dir: &Path) -> Vec<String> {
        self.files
            .iter()
            .filter(|f| match digest_file(dir, &f.name) {
                Ok(d) => d != **f,
                Err(_) => true,
            })
            .map(|f| f.name.clone())
            .collect()
    }
}
