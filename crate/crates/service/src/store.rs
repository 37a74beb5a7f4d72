//! Flat-file persistence behind the review service.
//!
//! A data directory holds:
//!
//! ```text
//! lexicon.jsonl     base lexicon snapshot (never rewritten by the service)
//! edits.jsonl       hash-chained edit log, appended one record per decision
//! queue.jsonl       review items, rewritten atomically after each decision
//! screening.jsonl   optional screening report, one outcome per line
//! ```
//!
//! The current lexicon is the base with every logged edit replayed on top.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use zhwn_core::corrections::{apply_edits, decide, CorrectionEdit, CorrectionError, Decision, EditLog, Recovery, ReviewItem, ReviewQueue};
use zhwn_core::lexicon::{BilingualLexicon, LexiconError};
use zhwn_core::screening::{ScreeningOutcome, ScreeningSummary};
use zhwn_core::wordnet::{SynsetId, WordnetDb};

pub const LEXICON_FILE: &str = "lexicon.jsonl";
pub const EDITS_FILE: &str = "edits.jsonl";
pub const QUEUE_FILE: &str = "queue.jsonl";
pub const SCREENING_FILE: &str = "screening.jsonl";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Correction(CorrectionError),
    #[error("{}: line {line}: {message}", .path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("review item {0} not found")]
    NotFound(u64),
    #[error("review item {} is already {}", .0.id, .0.status)]
    Conflict(Box<ReviewItem>),
    #[error("invalid decision: {0}")]
    Invalid(String),
    #[error("decision cannot be applied: {0}")]
    Apply(String),
}

impl From<CorrectionError> for StoreError {
    fn from(e: CorrectionError) -> Self {
        Self::Correction(e)
    }
}

/// Everything the service reads and writes.
#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    base: BilingualLexicon,
    lexicon: BilingualLexicon,
    log: EditLog,
    queue: ReviewQueue,
    db: Option<WordnetDb>,
    screening: Option<ScreeningSummary>,
}

fn read_optional(path: &Path) -> Result<Option<String>, StoreError> {
    match std::fs::read_to_string(path) {
        Ok(t) => Ok(Some(t)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(source) => Err(StoreError::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

fn parse_outcomes(path: &Path, text: &str) -> Result<Vec<ScreeningOutcome>, StoreError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(line).map_err(|e| StoreError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

/// Writes `contents` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), StoreError> {
    let io = |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    };
    let tmp = path.with_extension("jsonl.tmp");
    let mut f = std::fs::File::create(&tmp).map_err(io)?;
    f.write_all(contents.as_bytes()).map_err(io)?;
    f.sync_all().map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

impl Store {
    /// Loads the data directory. A missing lexicon or queue is empty; the
    /// edit log is opened with recovery, replayed onto the base and used to
    /// close any queue items whose decision was logged but not saved.
    pub fn open(dir: &Path, db: Option<WordnetDb>) -> Result<(Self, Recovery), StoreError> {
        let version = db.as_ref().map_or("3.0", |d| d.version()).to_string();
        let base = match read_optional(&dir.join(LEXICON_FILE))? {
            Some(t) => BilingualLexicon::from_jsonl(&t, &version)?,
            None => BilingualLexicon::new(version),
        };
        let (log, recovery) = EditLog::open(&dir.join(EDITS_FILE))?;
        let lexicon = apply_edits(&base, &log.edit_list())?;
        let queue_path = dir.join(QUEUE_FILE);
        let mut queue = match read_optional(&queue_path)? {
            Some(t) => ReviewQueue::from_jsonl(&t)?,
            None => ReviewQueue::new(),
        };
        let before = queue.clone();
        queue.reconcile(log.edits());
        if queue != before {
            log::info!("{}: closed items decided in the edit log", queue_path.display());
            write_atomic(&queue_path, &queue.to_jsonl())?;
        }
        let screening_path = dir.join(SCREENING_FILE);
        let screening = match read_optional(&screening_path)? {
            Some(t) => Some(ScreeningSummary::from_outcomes(&parse_outcomes(&screening_path, &t)?)),
            None => None,
        };
        Ok((
            Self {
                dir: dir.to_path_buf(),
                base,
                lexicon,
                log,
                queue,
                db,
                screening,
            },
            recovery,
        ))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn base(&self) -> &BilingualLexicon {
        &self.base
    }

    pub fn lexicon(&self) -> &BilingualLexicon {
        &self.lexicon
    }

    pub fn log(&self) -> &EditLog {
        &self.log
    }

    pub fn queue(&self) -> &ReviewQueue {
        &self.queue
    }

    pub fn db(&self) -> Option<&WordnetDb> {
        self.db.as_ref()
    }

    pub fn screening(&self) -> Option<&ScreeningSummary> {
        self.screening.as_ref()
    }

    /// Logged edits touching `id`, oldest first.
    pub fn history(&self, id: SynsetId) -> Vec<&CorrectionEdit> {
        self.log.edits().filter(|e| e.synset == id).collect()
    }

    /// Review items by synset.
    pub fn items_of(&self, id: SynsetId) -> Vec<&ReviewItem> {
        self.queue.iter().filter(|i| i.synset == id).collect()
    }

    /// Queue counts keyed by status name.
    pub fn queue_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut out = BTreeMap::new();
        for i in self.queue.iter() {
            *out.entry(i.status.as_str()).or_insert(0) += 1;
        }
        out
    }

    /// Closes an open item. The edit is checked against the current lexicon,
    /// appended to the log, and only then reflected in memory and in the
    /// queue file.
    pub fn decide(
        &mut self,
        item_id: u64,
        decision: &Decision,
        author: &str,
        timestamp: &str,
    ) -> Result<(CorrectionEdit, ReviewItem), StoreError> {
        let current = self.queue.get(item_id).ok_or(StoreError::NotFound(item_id))?;
        let mut item = current.clone();
        let mut edit = decide(&mut item, decision, author, timestamp).map_err(|e| match e {
            CorrectionError::Conflict { .. } => StoreError::Conflict(Box::new(current.clone())),
            other => StoreError::Invalid(other.to_string()),
        })?;
        edit.id = self.log.next_id();
        let lexicon = apply_edits(&self.lexicon, std::slice::from_ref(&edit)).map_err(|e| StoreError::Apply(e.to_string()))?;
        let edit = self.log.append(edit)?.edit.clone();
        self.lexicon = lexicon;
        item.decided_by = Some(edit.id.clone());
        *self.queue.get_mut(item_id).expect("item exists") = item.clone();
        // The log is authoritative; a stale queue file is reconciled on the
        // next start.
        if let Err(e) = write_atomic(&self.dir.join(QUEUE_FILE), &self.queue.to_jsonl()) {
            log::error!("{e}");
        }
        Ok((edit, item))
    }
}
