//! Run reports and file output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub kind: &'static str,
    pub path: PathBuf,
    pub sha256: String,
}

/// What a command read, wrote and checked. Verdicts are recomputed from
/// the outputs, never copied from the algorithm that produced them.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    pub seed: u64,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<OutputRecord>,
    pub verdicts: BTreeMap<String, bool>,
    pub result: serde_json::Value,
    pub timings_ms: BTreeMap<String, f64>,
    pub budget: BTreeMap<String, u64>,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
