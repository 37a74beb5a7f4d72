//! Run manifests: what went in, what came out, and under which settings.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};
use zhwn_core::config::Config;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    /// Digest of the command, input digests and config; equal ids mean
    /// equal outputs.
    pub run_id: String,
    pub command: String,
    pub tool_version: String,
    pub inputs: BTreeMap<String, FileDigest>,
    pub outputs: BTreeMap<String, FileDigest>,
    pub config: Config,
    pub started_at: String,
    pub finished_at: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest of a file, or of every file below a directory (sorted by relative
/// path, each contributing its path and contents).
pub fn digest_path(path: &Path) -> std::io::Result<String> {
    if !path.is_dir() {
        return Ok(sha256_hex(&std::fs::read(path)?));
    }
    let mut files = Vec::new();
    collect(path, path, &mut files)?;
    files.sort();
    let mut h = Sha256::new();
    for rel in files {
        h.update(rel.as_bytes());
        h.update([0]);
        h.update(sha256_hex(&std::fs::read(path.join(&rel))?).as_bytes());
        h.update(b"\n");
    }
    Ok(hex::encode(h.finalize()))
}

fn collect(root: &Path, dir: &Path, out: &mut Vec<String>) -> std::io::Result<()> {
    for entry in std::fs::read_dir(dir)? {
        let p = entry?.path();
        if p.is_dir() {
            collect(root, &p, out)?;
        } else {
            out.push(p.strip_prefix(root).expect("below root").to_string_lossy().replace('\\', "/"));
        }
    }
    Ok(())
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Collects inputs and outputs while a command runs.
#[derive(Debug)]
pub struct ManifestBuilder {
    command: String,
    started_at: String,
    inputs: BTreeMap<String, FileDigest>,
    outputs: BTreeMap<String, FileDigest>,
}

impl ManifestBuilder {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            started_at: now(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, role: &str, path: &Path) -> std::io::Result<()> {
        let sha256 = digest_path(path)?;
        self.inputs.insert(
            role.to_string(),
            FileDigest {
                path: path.display().to_string(),
                sha256,
            },
        );
        Ok(())
    }

    /// Records an output by the bytes written; `path` is `-` for stdout.
    pub fn output(&mut self, role: &str, path: &str, bytes: &[u8]) {
        self.outputs.insert(
            role.to_string(),
            FileDigest {
                path: path.to_string(),
                sha256: sha256_hex(bytes),
            },
        );
    }

    pub fn finish(self, config: &Config) -> RunManifest {
        let mut h = Sha256::new();
        h.update(self.command.as_bytes());
        for (role, d) in &self.inputs {
            h.update([0]);
            h.update(role.as_bytes());
            h.update([0]);
            h.update(d.sha256.as_bytes());
        }
        h.update([0]);
        h.update(config.to_text().as_bytes());
        RunManifest {
            run_id: hex::encode(&h.finalize()[..8]),
            command: self.command,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: self.inputs,
            outputs: self.outputs,
            config: config.clone(),
            started_at: self.started_at,
            finished_at: now(),
        }
    }
}
