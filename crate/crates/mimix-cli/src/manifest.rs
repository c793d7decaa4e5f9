//! Run manifests and atomic file output. Every file-writing command records
//! the full resolved parameter set, the master seed, the artifact version,
//! and digests of its inputs, so a run can be reproduced bit-exactly.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

#[derive(Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub params: serde_json::Value,
    pub master_seed: Option<u64>,
    pub artifact_version: &'static str,
    pub input_digests: BTreeMap<String, String>,
    pub timestamp_utc: String,
}

impl RunManifest {
    pub fn new(command: &'static str, params: impl Serialize, master_seed: Option<u64>) -> Self {
        RunManifest {
            command,
            params: serde_json::to_value(params).expect("serializable params"),
            master_seed,
            artifact_version: env!("CARGO_PKG_VERSION"),
            input_digests: BTreeMap::new(),
            timestamp_utc: chrono::Utc::now()
                .to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn digest_input(&mut self, path: &Path) -> Result<(), CliError> {
        use sha2::Digest;
        let mut file = std::fs::File::open(path)?;
        let mut hasher = sha2::Sha256::new();
        let mut buf = [0u8; 64 * 1024];
        loop {
            let n = file.read(&mut buf)?;
            if n == 0 {
                break;
            }
            hasher.update(&buf[..n]);
        }
        self.input_digests.insert(
            path.to_string_lossy().into_owned(),
            hex::encode(hasher.finalize()),
        );
        Ok(())
    }

    /// Write `<stem>.manifest.json` next to the command's outputs.
    pub fn write(&self, stem: &Path) -> Result<(), CliError> {
        let path = suffixed(stem, "manifest.json");
        let mut bytes = serde_json::to_vec_pretty(self)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        bytes.push(b'\n');
        atomic_write(&path, &bytes)
    }
}

/// `<stem>.<ext>` with the stem taken verbatim (keeps `out.csv` readable as
/// `out.csv.manifest.json`).
pub fn suffixed(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Write through a temporary file in the destination directory, then rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))?;
    std::io::Write::write_all(&mut tmp, bytes)?;
    tmp.persist(path)
        .map_err(|e| CliError::Input(e.to_string()))?;
    Ok(())
}
