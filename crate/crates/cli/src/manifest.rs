use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use crate::error::Failure;

/// Record of one invocation. The hash covers the command, its parameters
/// and the toolkit version, not the timestamp or the output paths, so
/// repeated runs with the same inputs share it.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub version: String,
    pub timestamp: String,
    pub outputs: Vec<String>,
    pub hash: String,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value) -> Self {
        let version = env!("CARGO_PKG_VERSION").to_string();
        let canonical = json!({"command": command, "parameters": parameters, "version": version});
        let hash = format!("{:x}", Sha256::digest(canonical.to_string().as_bytes()));
        let timestamp = OffsetDateTime::now_utc()
            .format(&Rfc3339)
            .unwrap_or_else(|_| "unknown".into());
        Self {
            command: command.to_string(),
            parameters,
            version,
            timestamp,
            outputs: Vec::new(),
            hash,
        }
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn write(&self, path: &Path) -> Result<(), Failure> {
        write_json(path, self)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::guard(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Failure::io(path, e))
}

/// `file.csv` → `file.csv.manifest.json`.
pub fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_timestamp_and_outputs() {
        let mut a = RunManifest::new("verify", json!({"seed": 7}));
        let b = RunManifest::new("verify", json!({"seed": 7}));
        a.add_output(Path::new("x.json"));
        assert_eq!(a.hash, b.hash);
        assert_ne!(a.hash, RunManifest::new("verify", json!({"seed": 8})).hash);
        assert_eq!(a.hash.len(), 64);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            sidecar(Path::new("out/t.csv")),
            PathBuf::from("out/t.csv.manifest.json")
        );
    }
}
