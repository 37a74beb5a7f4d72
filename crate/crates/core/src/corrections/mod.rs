//! Human corrections as an auditable edit stream: edit records, their
//! replay onto a lexicon, the hash-chained log that stores them, the review
//! queue that produces them, and surface-form rules.

mod log;
mod review;
mod rules;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lexicon::{BilingualLexicon, CandidateLemma, Status};
use crate::wordnet::SynsetId;

pub use log::{chain_digest, serialize_log, verify_log, EditLog, LogRecord, Recovery, GENESIS};
pub use review::{decide, Decision, ReviewItem, ReviewQueue, ReviewReason, ReviewStatus};
pub use rules::{flag_hard_translation, mark_affix, normalize_name, HardPattern, Normalized};

#[derive(Debug, thiserror::Error)]
pub enum CorrectionError {
    #[error("edit {edit}: {message}")]
    Apply { edit: String, message: String },
    #[error("invalid edit {edit}: {message}")]
    Malformed { edit: String, message: String },
    #[error("review item {id} is already {status}")]
    Conflict { id: u64, status: ReviewStatus },
    #[error("review item {0} not found")]
    UnknownItem(u64),
    #[error("edit log line {line}: {message}")]
    Chain { line: usize, message: String },
    #[error("segments {segments:?} do not spell {lemma:?}")]
    Segmentation { lemma: String, segments: Vec<String> },
    #[error("{}: {source}", .path.display())]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EditKind {
    DeleteLemma,
    ReplaceLemma,
    AddLemma,
    RetagNote,
    Normalize,
}

impl EditKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::DeleteLemma => "delete-lemma",
            Self::ReplaceLemma => "replace-lemma",
            Self::AddLemma => "add-lemma",
            Self::RetagNote => "retag-note",
            Self::Normalize => "normalize",
        }
    }

    fn needs_old(self) -> bool {
        !matches!(self, Self::AddLemma)
    }

    fn needs_new(self) -> bool {
        matches!(self, Self::ReplaceLemma | Self::AddLemma | Self::Normalize)
    }
}

impl fmt::Display for EditKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Why a correction was made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    WrongMeaning,
    PosMismatch,
    PolysemySplit,
    UnifyPlaceLanguage,
    UnifyAffix,
    UnifySingleSense,
    UnifyNameDots,
    UnifyMultiword,
    HardTranslation,
    Other,
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("unknown rule {s:?}"))
    }
}

/// One correction. Field names and order are the on-disk schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionEdit {
    pub id: String,
    pub synset: SynsetId,
    pub kind: EditKind,
    /// The lemma acted on (absent for additions).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub old: Option<String>,
    /// The lemma introduced (replacements, additions, normalizations).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub new: Option<String>,
    pub author: String,
    /// RFC 3339.
    pub timestamp: String,
    #[serde(default)]
    pub rationale: String,
    pub rule: Rule,
    /// Review item this edit decided, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub review_item: Option<u64>,
}

impl CorrectionEdit {
    /// An edit without an id; [`EditLog::append`] assigns one.
    pub fn new(synset: SynsetId, kind: EditKind, old: Option<&str>, new: Option<&str>, author: &str, timestamp: &str, rule: Rule) -> Self {
        Self {
            id: String::new(),
            synset,
            kind,
            old: old.map(str::to_string),
            new: new.map(str::to_string),
            author: author.to_string(),
            timestamp: timestamp.to_string(),
            rationale: String::new(),
            rule,
            review_item: None,
        }
    }

    pub fn with_rationale(mut self, rationale: impl Into<String>) -> Self {
        self.rationale = rationale.into();
        self
    }

    /// Checks that the payload fits the kind.
    pub fn validate(&self) -> Result<(), CorrectionError> {
        let bad = |message: String| CorrectionError::Malformed {
            edit: self.id.clone(),
            message,
        };
        let text_ok = |t: &str| !t.trim().is_empty() && !t.contains(['\t', '\n', '\r']);
        match (&self.old, self.kind.needs_old()) {
            (None, true) => return Err(bad(format!("{} needs an old lemma", self.kind))),
            (Some(_), false) => return Err(bad(format!("{} takes no old lemma", self.kind))),
            (Some(t), true) if !text_ok(t) => return Err(bad(format!("invalid lemma text {t:?}"))),
            _ => {}
        }
        match (&self.new, self.kind.needs_new()) {
            (None, true) => return Err(bad(format!("{} needs a new lemma", self.kind))),
            (Some(_), false) => return Err(bad(format!("{} takes no new lemma", self.kind))),
            (Some(t), true) if !text_ok(t) => return Err(bad(format!("invalid lemma text {t:?}"))),
            _ => {}
        }
        if self.old.is_some() && self.old == self.new {
            return Err(bad("old and new lemma are identical".into()));
        }
        if self.author.trim().is_empty() {
            return Err(bad("empty author".into()));
        }
        Ok(())
    }
}

/// Replays `edits` in order onto a copy of `lex`.
///
/// Deletions, replacements and normalizations need a target that exists and
/// is not already human-dropped, so replaying a log a second time fails.
/// Additions need the new lemma not to be live. Retagging marks an existing
/// lemma human-kept and may repeat. Any failure rejects the whole log.
pub fn apply_edits(lex: &BilingualLexicon, edits: &[CorrectionEdit]) -> Result<BilingualLexicon, CorrectionError> {
    let mut out = lex.clone();
    for edit in edits {
        apply_one(&mut out, edit)?;
    }
    if let Some(last) = edits.last() {
        out.provenance.edit_tip = Some(last.id.clone());
    }
    Ok(out)
}

fn apply_one(lex: &mut BilingualLexicon, edit: &CorrectionEdit) -> Result<(), CorrectionError> {
    edit.validate()?;
    let fail = |message: String| CorrectionError::Apply {
        edit: edit.id.clone(),
        message,
    };
    let id = edit.synset;

    if let Some(old) = edit.old.as_deref() {
        let target = lex
            .candidate(id, old)
            .ok_or_else(|| fail(format!("{old:?} is not a candidate of {id}")))?;
        if edit.kind != EditKind::RetagNote && target.status == Status::HumanDropped {
            return Err(fail(format!(
                "{old:?} in {id} was already removed by {}",
                target.decided_by.as_deref().unwrap_or("?")
            )));
        }
        let next = if edit.kind == EditKind::RetagNote {
            Status::HumanKept
        } else {
            Status::HumanDropped
        };
        set_human(lex, id, old, next, &edit.id);
    }

    if let Some(new) = edit.new.as_deref() {
        match lex.candidate(id, new) {
            Some(c) if c.is_live() && edit.kind == EditKind::AddLemma => {
                return Err(fail(format!("{new:?} is already a live candidate of {id}")));
            }
            Some(_) => set_human(lex, id, new, Status::HumanKept, &edit.id),
            None => {
                let mut c = CandidateLemma::proposed(id, new, format!("edit:{}", edit.id));
                c.status = Status::HumanKept;
                c.decided_by = Some(edit.id.clone());
                lex.insert(c).map_err(|e| fail(e.to_string()))?;
            }
        }
    }
    Ok(())
}

fn set_human(lex: &mut BilingualLexicon, id: SynsetId, text: &str, status: Status, edit: &str) {
    let list = lex.candidates_mut(id).expect("candidate checked");
    let c = list.iter_mut().find(|c| c.text == text).expect("candidate checked");
    c.set_status(status).expect("human statuses are always reachable");
    c.decided_by = Some(edit.to_string());
}

/// Every human status must name an edit of the log that touched that lemma
/// of that synset. Returns one message per violation.
pub fn audit_provenance(lex: &BilingualLexicon, edits: &[CorrectionEdit]) -> Vec<String> {
    let by_id: std::collections::HashMap<&str, &CorrectionEdit> = edits.iter().map(|e| (e.id.as_str(), e)).collect();
    let mut problems = Vec::new();
    for c in lex.all_candidates() {
        if !c.status.is_human() {
            continue;
        }
        let Some(edit_id) = c.decided_by.as_deref() else {
            problems.push(format!("{} {:?} is {} without an edit", c.synset, c.text, c.status));
            continue;
        };
        match by_id.get(edit_id) {
            None => problems.push(format!("{} {:?} cites unknown edit {edit_id}", c.synset, c.text)),
            Some(e) if e.synset != c.synset || (e.old.as_deref() != Some(&c.text) && e.new.as_deref() != Some(&c.text)) => {
                problems.push(format!("{} {:?} cites edit {edit_id}, which does not touch it", c.synset, c.text));
            }
            Some(_) => {}
        }
    }
    problems
}
