use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::id::SynsetId;
use super::WordnetError;

/// Result of mapping an id across wordnet versions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "id", rename_all = "lowercase")]
pub enum Mapped {
    Mapped(SynsetId),
    Unmapped,
}

/// An injective synset-id mapping between two wordnet versions, read from a
/// `from<TAB>to` TSV file. Lines starting with `#` are comments.
#[derive(Debug, Clone)]
pub struct VersionMap {
    from_version: String,
    to_version: String,
    pairs: BTreeMap<SynsetId, SynsetId>,
}

impl VersionMap {
    pub fn new(from_version: impl Into<String>, to_version: impl Into<String>) -> Self {
        Self {
            from_version: from_version.into(),
            to_version: to_version.into(),
            pairs: BTreeMap::new(),
        }
    }

    pub fn parse(text: &str, from_version: impl Into<String>, to_version: impl Into<String>) -> Result<Self, WordnetError> {
        let mut map = Self::new(from_version, to_version);
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| WordnetError::VersionMap { line: i + 1, message: msg };
            let (from, to) = line.split_once('\t').ok_or_else(|| bad("expected from<TAB>to".into()))?;
            let from: SynsetId = from.parse().map_err(|e: super::IdError| bad(e.to_string()))?;
            let to: SynsetId = to.trim().parse().map_err(|e: super::IdError| bad(e.to_string()))?;
            map.insert(from, to).map_err(bad)?;
        }
        map.check_injective()?;
        Ok(map)
    }

    fn insert(&mut self, from: SynsetId, to: SynsetId) -> Result<(), String> {
        match self.pairs.insert(from, to) {
            Some(prev) if prev != to => Err(format!("{from} mapped to both {prev} and {to}")),
            _ => Ok(()),
        }
    }

    fn check_injective(&self) -> Result<(), WordnetError> {
        let mut seen: HashMap<SynsetId, SynsetId> = HashMap::new();
        let mut clashes = Vec::new();
        for (from, to) in &self.pairs {
            if let Some(other) = seen.insert(*to, *from) {
                clashes.push(format!("{other} and {from} both map to {to}"));
            }
        }
        if clashes.is_empty() {
            Ok(())
        } else {
            Err(WordnetError::Consistency { offenders: clashes })
        }
    }

    pub fn from_version(&self) -> &str {
        &self.from_version
    }

    pub fn to_version(&self) -> &str {
        &self.to_version
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn map_id(&self, id: SynsetId) -> Mapped {
        self.pairs.get(&id).copied().map_or(Mapped::Unmapped, Mapped::Mapped)
    }

    /// Ids from `ids` the map has no entry for, in input order.
    pub fn unmapped<I: IntoIterator<Item = SynsetId>>(&self, ids: I) -> Vec<SynsetId> {
        ids.into_iter().filter(|id| !self.pairs.contains_key(id)).collect()
    }
}
