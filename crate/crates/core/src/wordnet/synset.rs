use std::fmt;

use serde::{Deserialize, Serialize};

use super::id::{PartOfSpeech, SynsetId};

/// A pointer kind from the `data.*` pointer list.
///
/// The taxonomy kinds get their own variants; every other pointer symbol is
/// carried verbatim so that serialization reproduces it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationKind {
    Hypernym,
    InstanceHypernym,
    Hyponym,
    InstanceHyponym,
    Other(String),
}

impl RelationKind {
    pub fn from_symbol(symbol: &str) -> Self {
        match symbol {
            "@" => Self::Hypernym,
            "@i" => Self::InstanceHypernym,
            "~" => Self::Hyponym,
            "~i" => Self::InstanceHyponym,
            other => Self::Other(other.to_string()),
        }
    }

    pub fn symbol(&self) -> &str {
        match self {
            Self::Hypernym => "@",
            Self::InstanceHypernym => "@i",
            Self::Hyponym => "~",
            Self::InstanceHyponym => "~i",
            Self::Other(s) => s,
        }
    }

    /// Hypernym edges of either flavour; these define the taxonomy.
    pub fn is_hypernym(&self) -> bool {
        matches!(self, Self::Hypernym | Self::InstanceHypernym)
    }

    pub fn is_hyponym(&self) -> bool {
        matches!(self, Self::Hyponym | Self::InstanceHyponym)
    }

    /// The kind that must appear on the target pointing back, for taxonomy kinds.
    pub fn inverse(&self) -> Option<Self> {
        match self {
            Self::Hypernym => Some(Self::Hyponym),
            Self::InstanceHypernym => Some(Self::InstanceHyponym),
            Self::Hyponym => Some(Self::Hypernym),
            Self::InstanceHyponym => Some(Self::InstanceHypernym),
            Self::Other(_) => None,
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for RelationKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for RelationKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(Self::from_symbol(&s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub kind: RelationKind,
    pub target: SynsetId,
    /// The 4-hex-digit source/target word numbers; 0 for semantic pointers.
    pub words: u16,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma {
    /// Surface form with underscores preserved, e.g. `White_Nile`.
    pub word: String,
    pub lex_id: u8,
    /// Adjective syntactic marker such as `p`, `a`, `ip`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marker: Option<String>,
}

impl Lemma {
    pub fn new(word: impl Into<String>) -> Self {
        Self {
            word: word.into(),
            lex_id: 0,
            marker: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerbFrame {
    pub frame: u8,
    /// 0 means the frame applies to every lemma of the synset.
    pub word: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Synset {
    pub id: SynsetId,
    pub lex_filenum: u8,
    /// Adjective satellite (`s` in the data file).
    #[serde(default)]
    pub satellite: bool,
    pub lemmas: Vec<Lemma>,
    pub relations: Vec<Relation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frames: Vec<VerbFrame>,
    pub gloss: String,
}

impl Synset {
    /// Minimal synset for tests and programmatic construction.
    pub fn new(id: SynsetId, lemmas: &[&str], gloss: impl Into<String>) -> Self {
        Self {
            id,
            lex_filenum: 0,
            satellite: false,
            lemmas: lemmas.iter().map(|w| Lemma::new(*w)).collect(),
            relations: Vec::new(),
            frames: Vec::new(),
            gloss: gloss.into(),
        }
    }

    pub fn pos(&self) -> PartOfSpeech {
        self.id.pos()
    }

    pub fn lemma_words(&self) -> impl Iterator<Item = &str> {
        self.lemmas.iter().map(|l| l.word.as_str())
    }

    pub fn relations_of<'a>(&'a self, kind: &'a RelationKind) -> impl Iterator<Item = SynsetId> + 'a {
        self.relations.iter().filter(move |r| &r.kind == kind).map(|r| r.target)
    }

    pub fn hypernyms(&self) -> impl Iterator<Item = SynsetId> + '_ {
        self.relations.iter().filter(|r| r.kind.is_hypernym()).map(|r| r.target)
    }

    pub fn hyponyms(&self) -> impl Iterator<Item = SynsetId> + '_ {
        self.relations.iter().filter(|r| r.kind.is_hyponym()).map(|r| r.target)
    }

    pub fn add_relation(&mut self, kind: RelationKind, target: SynsetId) {
        self.relations.push(Relation { kind, target, words: 0 });
    }

    pub(crate) fn ss_type(&self) -> char {
        if self.satellite {
            's'
        } else {
            self.id.pos().letter()
        }
    }
}

/// Key used by the lemma index: lower-cased, spaces folded to underscores.
pub fn index_key(lemma: &str) -> String {
    lemma.trim().to_lowercase().replace(' ', "_")
}
