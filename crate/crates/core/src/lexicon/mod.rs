//! Chinese candidate lemmas attached to wordnet synsets.

mod dictionary;
mod expand;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::wordnet::SynsetId;

pub use dictionary::{parse_dictionary, DictionaryEntry};
pub use expand::{
    classify, merge, translate_synsets, write_miss_report, Category, Classification, Merged, Miss, SynsetCategory, Translation,
};

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate candidate {text:?} for {synset}")]
    Duplicate { synset: SynsetId, text: String },
    #[error("lexicons target different wordnet versions: {base:?} vs {new:?}")]
    VersionMismatch { base: String, new: String },
    #[error("candidate {text:?} of {synset} cannot move from {from} to {to}")]
    Transition {
        synset: SynsetId,
        text: String,
        from: Status,
        to: Status,
    },
}

/// Lifecycle of a candidate. Stages only move forward: proposed, then a
/// machine decision, then a human decision; a later human decision replaces
/// an earlier one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Proposed,
    MachineKept,
    MachineDropped,
    HumanKept,
    HumanDropped,
}

impl Status {
    fn stage(self) -> u8 {
        match self {
            Self::Proposed => 0,
            Self::MachineKept | Self::MachineDropped => 1,
            Self::HumanKept | Self::HumanDropped => 2,
        }
    }

    pub fn can_become(self, next: Status) -> bool {
        next.stage() >= self.stage()
    }

    pub fn is_dropped(self) -> bool {
        matches!(self, Self::MachineDropped | Self::HumanDropped)
    }

    pub fn is_human(self) -> bool {
        self.stage() == 2
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Proposed => "proposed",
            Self::MachineKept => "machine-kept",
            Self::MachineDropped => "machine-dropped",
            Self::HumanKept => "human-kept",
            Self::HumanDropped => "human-dropped",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateLemma {
    pub synset: SynsetId,
    pub text: String,
    pub source: String,
    pub status: Status,
    /// Id of the edit behind a human status.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decided_by: Option<String>,
}

impl CandidateLemma {
    pub fn proposed(synset: SynsetId, text: impl Into<String>, source: impl Into<String>) -> Self {
        Self {
            synset,
            text: text.into(),
            source: source.into(),
            status: Status::Proposed,
            decided_by: None,
        }
    }

    pub fn is_live(&self) -> bool {
        !self.status.is_dropped()
    }

    pub fn set_status(&mut self, next: Status) -> Result<(), LexiconError> {
        if !self.status.can_become(next) {
            return Err(LexiconError::Transition {
                synset: self.synset,
                text: self.text.clone(),
                from: self.status,
                to: next,
            });
        }
        self.status = next;
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub wordnet_version: String,
    /// Labels of the dictionaries and base lexicons folded in, first use first.
    #[serde(default)]
    pub sources: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub built_at: Option<String>,
    /// Id of the last correction edit applied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edit_tip: Option<String>,
}

impl Provenance {
    pub(crate) fn add_source(&mut self, label: &str) {
        if !self.sources.iter().any(|s| s == label) {
            self.sources.push(label.to_string());
        }
    }
}

/// Synset id → candidate lemmas, each list in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BilingualLexicon {
    pub provenance: Provenance,
    entries: BTreeMap<SynsetId, Vec<CandidateLemma>>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    lexicon: Provenance,
}

impl BilingualLexicon {
    pub fn new(wordnet_version: impl Into<String>) -> Self {
        Self {
            provenance: Provenance {
                wordnet_version: wordnet_version.into(),
                ..Provenance::default()
            },
            entries: BTreeMap::new(),
        }
    }

    pub fn wordnet_version(&self) -> &str {
        &self.provenance.wordnet_version
    }

    pub fn insert(&mut self, candidate: CandidateLemma) -> Result<(), LexiconError> {
        let list = self.entries.entry(candidate.synset).or_default();
        if list.iter().any(|c| c.text == candidate.text) {
            return Err(LexiconError::Duplicate {
                synset: candidate.synset,
                text: candidate.text,
            });
        }
        list.push(candidate);
        Ok(())
    }

    pub fn candidates(&self, id: SynsetId) -> &[CandidateLemma] {
        self.entries.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub(crate) fn candidates_mut(&mut self, id: SynsetId) -> Option<&mut Vec<CandidateLemma>> {
        self.entries.get_mut(&id)
    }

    pub fn candidate(&self, id: SynsetId, text: &str) -> Option<&CandidateLemma> {
        self.candidates(id).iter().find(|c| c.text == text)
    }

    /// Candidates not dropped by machine or human screening.
    pub fn live_lemmas(&self, id: SynsetId) -> impl Iterator<Item = &str> {
        self.candidates(id).iter().filter(|c| c.is_live()).map(|c| c.text.as_str())
    }

    /// Synsets with at least one candidate of any status, in id order.
    pub fn synsets(&self) -> impl Iterator<Item = SynsetId> + '_ {
        self.entries.iter().filter(|(_, v)| !v.is_empty()).map(|(k, _)| *k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (SynsetId, &[CandidateLemma])> {
        self.entries.iter().filter(|(_, v)| !v.is_empty()).map(|(k, v)| (*k, v.as_slice()))
    }

    pub fn all_candidates(&self) -> impl Iterator<Item = &CandidateLemma> {
        self.entries.values().flatten()
    }

    pub fn synset_count(&self) -> usize {
        self.synsets().count()
    }

    pub fn candidate_count(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.candidate_count() == 0
    }

    /// Reverse index from live lemma text to the synsets it belongs to.
    pub fn lemma_index(&self) -> LemmaIndex {
        let mut map: HashMap<String, Vec<SynsetId>> = HashMap::new();
        for c in self.all_candidates().filter(|c| c.is_live()) {
            let ids = map.entry(c.text.clone()).or_default();
            if !ids.contains(&c.synset) {
                ids.push(c.synset);
            }
        }
        LemmaIndex { map }
    }

    /// JSON lines: a provenance header, then one candidate per line in synset order.
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&Header {
            lexicon: self.provenance.clone(),
        })
        .expect("provenance serializes");
        out.push('\n');
        for c in self.all_candidates() {
            out.push_str(&serde_json::to_string(c).expect("candidate serializes"));
            out.push('\n');
        }
        out
    }

    /// Reads [`to_jsonl`](Self::to_jsonl) output. The header line is optional;
    /// without it the wordnet version defaults to `default_version`.
    pub fn from_jsonl(text: &str, default_version: &str) -> Result<Self, LexiconError> {
        let mut lex = Self::new(default_version);
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |e: serde_json::Error| LexiconError::Parse {
                line: i + 1,
                message: e.to_string(),
            };
            if i == 0 && line.trim_start().starts_with("{\"lexicon\"") {
                let header: Header = serde_json::from_str(line).map_err(parse_err)?;
                lex.provenance = header.lexicon;
                continue;
            }
            let c: CandidateLemma = serde_json::from_str(line).map_err(parse_err)?;
            if c.text.is_empty() || c.text.contains(['\t', '\n']) {
                return Err(LexiconError::Parse {
                    line: i + 1,
                    message: format!("invalid lemma text {:?}", c.text),
                });
            }
            lex.insert(c)?;
        }
        Ok(lex)
    }
}

/// Lemma text → synsets, built from a lexicon's live candidates.
#[derive(Debug, Clone, Default)]
pub struct LemmaIndex {
    map: HashMap<String, Vec<SynsetId>>,
}

impl LemmaIndex {
    pub fn synsets(&self, lemma: &str) -> &[SynsetId] {
        self.map.get(lemma).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.map.contains_key(lemma)
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> SynsetId {
        s.parse().unwrap()
    }

    #[test]
    fn status_moves_forward_only() {
        use Status::*;
        assert!(Proposed.can_become(MachineKept));
        assert!(MachineKept.can_become(MachineDropped));
        assert!(MachineDropped.can_become(HumanKept));
        assert!(HumanKept.can_become(HumanDropped));
        assert!(!HumanKept.can_become(MachineDropped));
        assert!(!MachineKept.can_become(Proposed));
    }

    #[test]
    fn rejects_duplicate_pairs() {
        let mut lex = BilingualLexicon::new("3.0");
        lex.insert(CandidateLemma::proposed(id("09478678-n"), "白尼罗河", "oxford"))
            .unwrap();
        assert!(matches!(
            lex.insert(CandidateLemma::proposed(id("09478678-n"), "白尼罗河", "xinhua")),
            Err(LexiconError::Duplicate { .. })
        ));
    }

    #[test]
    fn jsonl_roundtrip_keeps_provenance() {
        let mut lex = BilingualLexicon::new("3.0");
        lex.provenance.add_source("oxford");
        lex.provenance.edit_tip = Some("E000003".into());
        let mut c = CandidateLemma::proposed(id("05960464-n"), "信仰", "oxford");
        c.status = Status::HumanDropped;
        c.decided_by = Some("E000001".into());
        lex.insert(c).unwrap();
        lex.insert(CandidateLemma::proposed(id("05960464-n"), "教条", "xinhua")).unwrap();
        let text = lex.to_jsonl();
        assert!(text.starts_with("{\"lexicon\""));
        let back = BilingualLexicon::from_jsonl(&text, "x").unwrap();
        assert_eq!(back, lex);
        assert_eq!(back.live_lemmas(id("05960464-n")).collect::<Vec<_>>(), ["教条"]);
    }

    #[test]
    fn headerless_jsonl_uses_default_version() {
        let line = r#"{"synset":"09478678-n","text":"白尼罗河","source":"sew","status":"proposed"}"#;
        let lex = BilingualLexicon::from_jsonl(line, "3.0").unwrap();
        assert_eq!(lex.wordnet_version(), "3.0");
        assert_eq!(lex.candidate_count(), 1);
    }
}
