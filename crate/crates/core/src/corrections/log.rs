use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CorrectionEdit, CorrectionError};

/// `prev` of the first record.
pub const GENESIS: &str = "0000000000000000000000000000000000000000000000000000000000000000";

/// One line of the edit log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRecord {
    pub prev: String,
    pub digest: String,
    pub edit: CorrectionEdit,
}

/// SHA-256 over the previous digest, a newline, and the edit's JSON.
pub fn chain_digest(prev: &str, edit: &CorrectionEdit) -> String {
    let mut h = Sha256::new();
    h.update(prev.as_bytes());
    h.update(b"\n");
    h.update(serde_json::to_string(edit).expect("edit serializes").as_bytes());
    hex::encode(h.finalize())
}

fn record_line(record: &LogRecord) -> String {
    serde_json::to_string(record).expect("record serializes")
}

/// Chains `edits` into log text.
pub fn serialize_log(edits: &[CorrectionEdit]) -> String {
    let mut prev = GENESIS.to_string();
    let mut out = String::new();
    for edit in edits {
        let digest = chain_digest(&prev, edit);
        out.push_str(&record_line(&LogRecord {
            prev,
            digest: digest.clone(),
            edit: edit.clone(),
        }));
        out.push('\n');
        prev = digest;
    }
    out
}

/// Parses and checks a complete log. Each line must be exactly the
/// canonical serialization of its record, link to the previous digest, and
/// carry the right digest; edit ids must be unique.
pub fn verify_log(bytes: &[u8]) -> Result<Vec<LogRecord>, CorrectionError> {
    let text = std::str::from_utf8(bytes).map_err(|e| CorrectionError::Chain {
        line: bytes[..e.valid_up_to()].iter().filter(|b| **b == b'\n').count() + 1,
        message: "not valid UTF-8".into(),
    })?;
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(CorrectionError::Chain {
            line: text.lines().count(),
            message: "last record is not newline-terminated".into(),
        });
    }
    let mut records = Vec::new();
    let mut ids = std::collections::HashSet::new();
    let mut prev = GENESIS.to_string();
    for (i, line) in text.split_terminator('\n').enumerate() {
        let err = |message: String| CorrectionError::Chain { line: i + 1, message };
        let record: LogRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        if record_line(&record) != line {
            return Err(err("record is not in canonical form".into()));
        }
        if record.prev != prev {
            return Err(err("chain broken: prev does not match the preceding digest".into()));
        }
        if chain_digest(&record.prev, &record.edit) != record.digest {
            return Err(err("digest mismatch".into()));
        }
        record.edit.validate().map_err(|e| err(e.to_string()))?;
        if !ids.insert(record.edit.id.clone()) {
            return Err(err(format!("duplicate edit id {}", record.edit.id)));
        }
        prev = record.digest.clone();
        records.push(record);
    }
    Ok(records)
}

/// What [`EditLog::open`] had to repair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Recovery {
    /// Bytes of an unterminated trailing record that were cut off.
    pub truncated_bytes: usize,
}

/// Append-only, hash-chained edit log, optionally mirrored to a file.
#[derive(Debug)]
pub struct EditLog {
    path: Option<PathBuf>,
    file: Option<File>,
    records: Vec<LogRecord>,
}

impl EditLog {
    pub fn in_memory() -> Self {
        Self {
            path: None,
            file: None,
            records: Vec::new(),
        }
    }

    /// Opens or creates the log at `path`. A trailing record without its
    /// newline is the remains of an interrupted append and is cut off; any
    /// other damage is an error.
    pub fn open(path: &Path) -> Result<(Self, Recovery), CorrectionError> {
        let io = |source| CorrectionError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut bytes = match std::fs::read(path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(io(e)),
        };
        let mut recovery = Recovery::default();
        if !bytes.is_empty() && bytes.last() != Some(&b'\n') {
            let keep = bytes.iter().rposition(|b| *b == b'\n').map_or(0, |i| i + 1);
            recovery.truncated_bytes = bytes.len() - keep;
            bytes.truncate(keep);
            log::warn!(
                "{}: dropping {} bytes of an incomplete trailing record",
                path.display(),
                recovery.truncated_bytes
            );
            let f = OpenOptions::new().write(true).open(path).map_err(io)?;
            f.set_len(keep as u64).map_err(io)?;
            f.sync_all().map_err(io)?;
        }
        let records = verify_log(&bytes)?;
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
        Ok((
            Self {
                path: Some(path.to_path_buf()),
                file: Some(file),
                records,
            },
            recovery,
        ))
    }

    /// Builds an in-memory log from edits, chaining them afresh.
    pub fn from_edits(edits: &[CorrectionEdit]) -> Result<Self, CorrectionError> {
        let mut log = Self::in_memory();
        for e in edits {
            log.append(e.clone())?;
        }
        Ok(log)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[LogRecord] {
        &self.records
    }

    pub fn edits(&self) -> impl Iterator<Item = &CorrectionEdit> {
        self.records.iter().map(|r| &r.edit)
    }

    pub fn edit_list(&self) -> Vec<CorrectionEdit> {
        self.edits().cloned().collect()
    }

    /// Digest of the last record, or [`GENESIS`].
    pub fn tip(&self) -> &str {
        self.records.last().map_or(GENESIS, |r| r.digest.as_str())
    }

    /// The id the next appended edit receives when it has none.
    pub fn next_id(&self) -> String {
        format!("e{:06}", self.records.len() + 1)
    }

    /// Validates, chains and durably appends an edit, assigning the next
    /// sequential id if `edit.id` is empty.
    pub fn append(&mut self, mut edit: CorrectionEdit) -> Result<&LogRecord, CorrectionError> {
        if edit.id.is_empty() {
            edit.id = self.next_id();
        }
        edit.validate()?;
        if self.records.iter().any(|r| r.edit.id == edit.id) {
            return Err(CorrectionError::Malformed {
                message: "duplicate edit id".into(),
                edit: edit.id,
            });
        }
        let prev = self.tip().to_string();
        let record = LogRecord {
            digest: chain_digest(&prev, &edit),
            prev,
            edit,
        };
        if let (Some(file), Some(path)) = (self.file.as_mut(), self.path.as_ref()) {
            let mut line = record_line(&record);
            line.push('\n');
            let io = |source| CorrectionError::Io {
                path: path.clone(),
                source,
            };
            file.write_all(line.as_bytes()).map_err(io)?;
            file.sync_data().map_err(io)?;
        }
        self.records.push(record);
        Ok(self.records.last().expect("just pushed"))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&record_line(r));
            out.push('\n');
        }
        out
    }
}
