use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Serialize, Serializer};

use super::{BilingualLexicon, CandidateLemma, DictionaryEntry, LexiconError};
use crate::wordnet::{SynsetId, WordnetDb};

/// An English lemma that no dictionary translated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Miss {
    pub synset: SynsetId,
    pub lemma: String,
}

#[derive(Debug, Clone)]
pub struct Translation {
    pub lexicon: BilingualLexicon,
    pub misses: Vec<Miss>,
}

/// Proposes Chinese candidates for every synset from its English lemmas.
///
/// Each lemma is looked up verbatim, then with underscores replaced by
/// spaces. Candidates are the de-duplicated union over all lemmas and
/// dictionaries, in first-seen order; the source of a candidate is the
/// dictionary that supplied it first.
pub fn translate_synsets(db: &WordnetDb, dicts: &[DictionaryEntry]) -> Translation {
    let mut by_headword: HashMap<&str, Vec<(&str, &str)>> = HashMap::new();
    let mut lexicon = BilingualLexicon::new(db.version());
    for entry in dicts {
        lexicon.provenance.add_source(&entry.source);
        let list = by_headword.entry(entry.english.as_str()).or_default();
        list.extend(entry.chinese.iter().map(|zh| (zh.as_str(), entry.source.as_str())));
    }

    let mut misses = Vec::new();
    for synset in db.synsets() {
        for word in synset.lemma_words() {
            let spaced;
            let hits = match by_headword.get(word) {
                Some(hits) => Some(hits),
                None => {
                    spaced = word.replace('_', " ");
                    by_headword.get(spaced.as_str())
                }
            };
            let Some(hits) = hits else {
                misses.push(Miss {
                    synset: synset.id,
                    lemma: word.to_string(),
                });
                continue;
            };
            for (zh, source) in hits {
                if lexicon.candidate(synset.id, zh).is_none() {
                    lexicon
                        .insert(CandidateLemma::proposed(synset.id, *zh, *source))
                        .expect("checked for duplicates");
                }
            }
        }
    }
    Translation { lexicon, misses }
}

/// `synset<TAB>lemma` lines.
pub fn write_miss_report(misses: &[Miss]) -> String {
    let mut out = String::new();
    for m in misses {
        let _ = writeln!(out, "{}\t{}", m.synset, m.lemma);
    }
    out
}

/// Arity-based synset categories; combinations the three categories do not
/// cover are kept as [`Category::Uncategorized`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    /// One English lemma, one Chinese candidate.
    One,
    /// One English lemma, two or more Chinese candidates.
    Two,
    /// Two or more English lemmas, two or more Chinese candidates.
    Three,
    Uncategorized,
}

impl Category {
    pub fn from_counts(english: usize, chinese: usize) -> Option<Self> {
        match (english, chinese) {
            (_, 0) | (0, _) => None,
            (1, 1) => Some(Self::One),
            (1, _) => Some(Self::Two),
            (_, 1) => Some(Self::Uncategorized),
            _ => Some(Self::Three),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::One => "1",
            Self::Two => "2",
            Self::Three => "3",
            Self::Uncategorized => "uncategorized",
        }
    }
}

impl Serialize for Category {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SynsetCategory {
    pub synset: SynsetId,
    pub category: Category,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Classification {
    pub categories: Vec<SynsetCategory>,
    /// Lexicon synsets absent from the wordnet.
    pub unresolved: Vec<SynsetId>,
}

impl Classification {
    pub fn count(&self, category: Category) -> usize {
        self.categories.iter().filter(|c| c.category == category).count()
    }

    pub fn get(&self, id: SynsetId) -> Option<Category> {
        self.categories.iter().find(|c| c.synset == id).map(|c| c.category)
    }
}

/// Assigns a category to every synset that has at least one live candidate.
pub fn classify(db: &WordnetDb, lex: &BilingualLexicon) -> Classification {
    let mut out = Classification::default();
    for id in lex.synsets() {
        let Some(synset) = db.get(id) else {
            out.unresolved.push(id);
            continue;
        };
        let chinese = lex.live_lemmas(id).count();
        if let Some(category) = Category::from_counts(synset.lemmas.len(), chinese) {
            out.categories.push(SynsetCategory { synset: id, category });
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Merged {
    pub lexicon: BilingualLexicon,
    pub concept_count: usize,
    pub lemma_count: usize,
}

/// Per-synset union of two lexicons over the same wordnet version. On a
/// `(synset, text)` collision the base candidate is kept as is.
pub fn merge(base: &BilingualLexicon, new: &BilingualLexicon) -> Result<Merged, LexiconError> {
    if base.wordnet_version() != new.wordnet_version() {
        return Err(LexiconError::VersionMismatch {
            base: base.wordnet_version().to_string(),
            new: new.wordnet_version().to_string(),
        });
    }
    let mut lexicon = base.clone();
    for source in &new.provenance.sources {
        lexicon.provenance.add_source(source);
    }
    for c in new.all_candidates() {
        if lexicon.candidate(c.synset, &c.text).is_none() {
            lexicon.insert(c.clone())?;
        }
    }
    Ok(Merged {
        concept_count: lexicon.synset_count(),
        lemma_count: lexicon.candidate_count(),
        lexicon,
    })
}
