use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CorrectionEdit, CorrectionError, EditKind, Rule};
use crate::screening::ScreeningOutcome;
use crate::wordnet::SynsetId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReviewReason {
    ScreeningDeferred,
    RuleFlagged,
    Conflict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReviewStatus {
    Open,
    Accepted,
    Rejected,
    Edited,
}

impl ReviewStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Open => "open",
            Self::Accepted => "accepted",
            Self::Rejected => "rejected",
            Self::Edited => "edited",
        }
    }
}

impl fmt::Display for ReviewStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ReviewStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "open" => Ok(Self::Open),
            "accepted" => Ok(Self::Accepted),
            "rejected" => Ok(Self::Rejected),
            "edited" => Ok(Self::Edited),
            other => Err(format!("unknown review status {other:?}")),
        }
    }
}

/// A candidate awaiting a human decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewItem {
    pub id: u64,
    pub synset: SynsetId,
    pub candidate: String,
    pub reason: ReviewReason,
    pub status: ReviewStatus,
    /// Distance to the origin on the screening projection, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnitude: Option<f64>,
    /// Extra context, such as the hard-translation pattern that matched.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Edit that closed the item.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decided_by: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "decision", rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
    Edit { new_text: String },
}

/// Closes an open item and returns the edit that records the decision:
/// accepting retags the candidate (human-kept), rejecting deletes it, and
/// editing replaces it with the new text. The edit has no id yet.
pub fn decide(item: &mut ReviewItem, decision: &Decision, author: &str, timestamp: &str) -> Result<CorrectionEdit, CorrectionError> {
    if item.status != ReviewStatus::Open {
        return Err(CorrectionError::Conflict {
            id: item.id,
            status: item.status,
        });
    }
    let old = Some(item.candidate.as_str());
    let (kind, new, rule, status) = match decision {
        Decision::Accept => (EditKind::RetagNote, None, Rule::Other, ReviewStatus::Accepted),
        Decision::Reject => (EditKind::DeleteLemma, None, Rule::WrongMeaning, ReviewStatus::Rejected),
        Decision::Edit { new_text } => (EditKind::ReplaceLemma, Some(new_text.as_str()), Rule::Other, ReviewStatus::Edited),
    };
    let mut edit = CorrectionEdit::new(item.synset, kind, old, new, author, timestamp, rule)
        .with_rationale(format!("review item {}: {}", item.id, status));
    edit.review_item = Some(item.id);
    edit.validate()?;
    item.status = status;
    Ok(edit)
}

/// Review items keyed by id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReviewQueue {
    items: BTreeMap<u64, ReviewItem>,
}

impl ReviewQueue {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an open item unless the same candidate is already open; returns
    /// the id of the new or existing item.
    pub fn push(&mut self, synset: SynsetId, candidate: &str, reason: ReviewReason, magnitude: Option<f64>, note: Option<String>) -> u64 {
        if let Some(existing) = self
            .items
            .values()
            .find(|i| i.status == ReviewStatus::Open && i.synset == synset && i.candidate == candidate)
        {
            return existing.id;
        }
        let id = self.items.keys().next_back().map_or(1, |k| k + 1);
        self.items.insert(
            id,
            ReviewItem {
                id,
                synset,
                candidate: candidate.to_string(),
                reason,
                status: ReviewStatus::Open,
                magnitude,
                note,
                decided_by: None,
            },
        );
        id
    }

    /// Queues every deferred candidate of the outcomes.
    pub fn add_deferred(&mut self, outcomes: &[ScreeningOutcome]) -> usize {
        let before = self.items.len();
        for o in outcomes {
            for c in &o.deferred {
                self.push(o.synset, c, ReviewReason::ScreeningDeferred, o.magnitudes.get(c).copied(), None);
            }
        }
        self.items.len() - before
    }

    pub fn get(&self, id: u64) -> Option<&ReviewItem> {
        self.items.get(&id)
    }

    pub fn get_mut(&mut self, id: u64) -> Option<&mut ReviewItem> {
        self.items.get_mut(&id)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ReviewItem> {
        self.items.values()
    }

    /// Items with `status` (all when `None`), in id order.
    pub fn filtered(&self, status: Option<ReviewStatus>) -> Vec<&ReviewItem> {
        self.items.values().filter(|i| status.is_none_or(|s| i.status == s)).collect()
    }

    pub fn count(&self, status: ReviewStatus) -> usize {
        self.items.values().filter(|i| i.status == status).count()
    }

    /// Marks items closed by logged edits: each edit naming a review item
    /// closes it with the matching status. Used after a restart so the queue
    /// agrees with the log even if the queue file was not rewritten.
    pub fn reconcile<'a>(&mut self, edits: impl IntoIterator<Item = &'a CorrectionEdit>) {
        for e in edits {
            let Some(item) = e.review_item.and_then(|id| self.items.get_mut(&id)) else {
                continue;
            };
            item.status = match e.kind {
                EditKind::RetagNote => ReviewStatus::Accepted,
                EditKind::DeleteLemma => ReviewStatus::Rejected,
                _ => ReviewStatus::Edited,
            };
            item.decided_by = Some(e.id.clone());
        }
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for item in self.items.values() {
            out.push_str(&serde_json::to_string(item).expect("item serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, CorrectionError> {
        let mut q = Self::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let item: ReviewItem = serde_json::from_str(line).map_err(|e| CorrectionError::Chain {
                line: i + 1,
                message: e.to_string(),
            })?;
            if q.items.insert(item.id, item).is_some() {
                return Err(CorrectionError::Chain {
                    line: i + 1,
                    message: "duplicate review item id".into(),
                });
            }
        }
        Ok(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> SynsetId {
        s.parse().unwrap()
    }

    #[test]
    fn decisions_close_items_once() {
        let mut q = ReviewQueue::new();
        let a = q.push(id("00469382-v"), "穿", ReviewReason::RuleFlagged, None, None);
        assert_eq!(q.push(id("00469382-v"), "穿", ReviewReason::Conflict, None, None), a);
        let item = q.get_mut(a).unwrap();
        let e = decide(item, &Decision::Edit { new_text: "磨损".into() }, "lin", "t").unwrap();
        assert_eq!(e.kind, EditKind::ReplaceLemma);
        assert_eq!(e.new.as_deref(), Some("磨损"));
        assert_eq!(e.review_item, Some(a));
        assert_eq!(item.status, ReviewStatus::Edited);
        assert!(matches!(
            decide(item, &Decision::Accept, "lin", "t"),
            Err(CorrectionError::Conflict { .. })
        ));
    }

    #[test]
    fn accept_and_reject_kinds() {
        let mut q = ReviewQueue::new();
        let a = q.push(id("05960464-n"), "教条", ReviewReason::ScreeningDeferred, Some(0.3), None);
        let b = q.push(id("05960464-n"), "信仰", ReviewReason::ScreeningDeferred, None, None);
        assert_eq!(
            decide(q.get_mut(a).unwrap(), &Decision::Accept, "x", "t").unwrap().kind,
            EditKind::RetagNote
        );
        assert_eq!(
            decide(q.get_mut(b).unwrap(), &Decision::Reject, "x", "t").unwrap().kind,
            EditKind::DeleteLemma
        );
        assert_eq!(q.count(ReviewStatus::Open), 0);
        let mut bad = q.clone();
        let c = bad.push(id("05960464-n"), "x", ReviewReason::Conflict, None, None);
        assert!(decide(bad.get_mut(c).unwrap(), &Decision::Edit { new_text: "x".into() }, "x", "t").is_err());
        assert_eq!(bad.get(c).unwrap().status, ReviewStatus::Open);
    }

    #[test]
    fn jsonl_and_reconcile() {
        let mut q = ReviewQueue::new();
        let a = q.push(id("05960464-n"), "信仰", ReviewReason::RuleFlagged, None, Some("noun+noun".into()));
        let text = q.to_jsonl();
        let mut back = ReviewQueue::from_jsonl(&text).unwrap();
        assert_eq!(back, q);

        let mut item = q.get(a).unwrap().clone();
        let mut e = decide(&mut item, &Decision::Reject, "x", "t").unwrap();
        e.id = "e000001".into();
        back.reconcile([&e]);
        assert_eq!(back.get(a).unwrap().status, ReviewStatus::Rejected);
        assert_eq!(back.get(a).unwrap().decided_by.as_deref(), Some("e000001"));
        assert!(ReviewQueue::from_jsonl(&(text.clone() + &text)).is_err());
        let d: Decision = serde_json::from_str(r#"{"decision":"edit","new_text":"磨损"}"#).unwrap();
        assert_eq!(d, Decision::Edit { new_text: "磨损".into() });
    }

    proptest::proptest! {
        #[test]
        fn jsonl_keeps_magnitudes_exact(m in proptest::num::f64::NORMAL | proptest::num::f64::POSITIVE) {
            let mut q = ReviewQueue::new();
            q.push(id("05960464-n"), "信仰", ReviewReason::ScreeningDeferred, Some(m), None);
            let back = ReviewQueue::from_jsonl(&q.to_jsonl()).unwrap();
            proptest::prop_assert_eq!(back.get(1).unwrap().magnitude.map(f64::to_bits), Some(m.to_bits()));
        }
    }
}
