use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use super::id::{PartOfSpeech, SynsetId};
use super::parse::{parse_data_file, parse_index_file, write_data_file, write_index_line, IndexEntry};
use super::synset::{index_key, Synset};
use super::taxonomy::Taxonomy;
use super::WordnetError;

/// An immutable, fully linked wordnet.
///
/// The lemma index maps `(lower-cased lemma, pos)` to synset ids. When loaded
/// from disk the index keeps the sense order of the `index.*` files; when built
/// from synsets it follows offset order.
#[derive(Debug)]
pub struct WordnetDb {
    version: String,
    synsets: BTreeMap<SynsetId, Synset>,
    index: BTreeMap<(String, PartOfSpeech), Vec<SynsetId>>,
    taxonomies: [OnceLock<Taxonomy>; 2],
}

impl WordnetDb {
    /// Links a set of synsets into a database, deriving the lemma index.
    pub fn from_synsets(version: impl Into<String>, synsets: impl IntoIterator<Item = Synset>) -> Result<Self, WordnetError> {
        let mut map = BTreeMap::new();
        let mut duplicates = Vec::new();
        for s in synsets {
            let id = s.id;
            if map.insert(id, s).is_some() {
                duplicates.push(format!("duplicate synset {id}"));
            }
        }
        if !duplicates.is_empty() {
            return Err(WordnetError::Consistency { offenders: duplicates });
        }
        let index = derive_index(&map);
        let db = Self {
            version: version.into(),
            synsets: map,
            index,
            taxonomies: Default::default(),
        };
        db.check_links()?;
        Ok(db)
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn get(&self, id: SynsetId) -> Option<&Synset> {
        self.synsets.get(&id)
    }

    pub fn contains(&self, id: SynsetId) -> bool {
        self.synsets.contains_key(&id)
    }

    /// Synsets in id order (part of speech, then offset).
    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.values()
    }

    pub fn synsets_of(&self, pos: PartOfSpeech) -> impl Iterator<Item = &Synset> {
        self.synsets.values().filter(move |s| s.pos() == pos)
    }

    pub fn count(&self, pos: PartOfSpeech) -> usize {
        self.synsets_of(pos).count()
    }

    /// Synsets containing `lemma` (case-insensitive, spaces or underscores).
    pub fn lookup(&self, lemma: &str, pos: PartOfSpeech) -> &[SynsetId] {
        self.index.get(&(index_key(lemma), pos)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Synsets containing `lemma` in any part of speech.
    pub fn lookup_any(&self, lemma: &str) -> Vec<SynsetId> {
        PartOfSpeech::ALL
            .iter()
            .flat_map(|&p| self.lookup(lemma, p).iter().copied())
            .collect()
    }

    pub fn index_entries(&self) -> impl Iterator<Item = (&str, PartOfSpeech, &[SynsetId])> {
        self.index.iter().map(|((l, p), ids)| (l.as_str(), *p, ids.as_slice()))
    }

    /// The hypernym taxonomy of a noun or verb, built on first use.
    pub fn taxonomy(&self, pos: PartOfSpeech) -> Result<&Taxonomy, WordnetError> {
        let slot = match pos {
            PartOfSpeech::Noun => &self.taxonomies[0],
            PartOfSpeech::Verb => &self.taxonomies[1],
            other => return Err(WordnetError::UnsupportedPos(other)),
        };
        Ok(slot.get_or_init(|| Taxonomy::build(self, pos)))
    }

    /// Number of distinct synsets below `id` via hyponym edges.
    pub fn hyponym_count(&self, id: SynsetId) -> Result<usize, WordnetError> {
        let tax = self.taxonomy_for(id)?;
        Ok(tax.hyponym_count(tax.slot(id).expect("present")))
    }

    /// Minimum number of hypernym edges from `id` to the taxonomy root.
    pub fn depth(&self, id: SynsetId) -> Result<u32, WordnetError> {
        let tax = self.taxonomy_for(id)?;
        Ok(tax.depth(tax.slot(id).expect("present")))
    }

    fn taxonomy_for(&self, id: SynsetId) -> Result<&Taxonomy, WordnetError> {
        if !id.pos().has_taxonomy() {
            return Err(WordnetError::UnsupportedPos(id.pos()));
        }
        if !self.contains(id) {
            return Err(WordnetError::NotFound(id));
        }
        self.taxonomy(id.pos())
    }

    /// Every relation target resolves and hypernym/hyponym edges are mutually inverse.
    fn check_links(&self) -> Result<(), WordnetError> {
        let unresolved: Vec<(SynsetId, SynsetId)> = self
            .synsets
            .values()
            .flat_map(|s| s.relations.iter().map(move |r| (s.id, r.target)))
            .filter(|(_, t)| !self.synsets.contains_key(t))
            .collect();
        if !unresolved.is_empty() {
            return Err(WordnetError::Link { unresolved });
        }

        let mut offenders = Vec::new();
        for s in self.synsets.values() {
            for r in &s.relations {
                let Some(inverse) = r.kind.inverse() else { continue };
                let target = &self.synsets[&r.target];
                if !target.relations_of(&inverse).any(|t| t == s.id) {
                    offenders.push(format!("{} {} {} has no inverse {} edge", s.id, r.kind, r.target, inverse));
                }
            }
        }
        if offenders.is_empty() {
            Ok(())
        } else {
            Err(WordnetError::Consistency { offenders })
        }
    }

    /// Writes `data.*` and `index.*` files for every part of speech.
    pub fn write_dir(&self, dir: &Path) -> Result<(), WordnetError> {
        fs::create_dir_all(dir).map_err(|e| WordnetError::io(dir, e))?;
        for pos in PartOfSpeech::ALL {
            let data = write_data_file(self.synsets_of(pos));
            let path = dir.join(format!("data.{}", pos.file_suffix()));
            fs::write(&path, data).map_err(|e| WordnetError::io(&path, e))?;

            let mut index = String::new();
            for ((lemma, p), ids) in self.index.iter().filter(|((_, p), _)| *p == pos) {
                let pointers: BTreeSet<String> = ids
                    .iter()
                    .flat_map(|id| self.synsets[id].relations.iter().map(|r| r.kind.symbol().to_string()))
                    .collect();
                let entry = IndexEntry {
                    lemma: lemma.clone(),
                    pos: *p,
                    pointers: pointers.into_iter().collect(),
                    tagsense_cnt: 0,
                    offsets: ids.iter().map(|id| id.offset()).collect(),
                };
                index.push_str(&write_index_line(&entry));
                index.push('\n');
            }
            let path = dir.join(format!("index.{}", pos.file_suffix()));
            fs::write(&path, index).map_err(|e| WordnetError::io(&path, e))?;
        }
        Ok(())
    }
}

fn derive_index(synsets: &BTreeMap<SynsetId, Synset>) -> BTreeMap<(String, PartOfSpeech), Vec<SynsetId>> {
    let mut index: BTreeMap<(String, PartOfSpeech), Vec<SynsetId>> = BTreeMap::new();
    for s in synsets.values() {
        for word in s.lemma_words() {
            let ids = index.entry((index_key(word), s.pos())).or_default();
            if !ids.contains(&s.id) {
                ids.push(s.id);
            }
        }
    }
    index
}

/// Loads `data.{noun,verb,adj,adv}` and `index.{noun,verb,adj,adv}` from `dir`.
///
/// The index files must agree exactly (as sets) with lemma membership in the
/// data files; disagreements are collected and reported together.
pub fn load_db(dir: &Path, version: impl Into<String>) -> Result<WordnetDb, WordnetError> {
    let read = |name: String| -> Result<Vec<u8>, WordnetError> {
        let path = dir.join(&name);
        if !path.is_file() {
            return Err(WordnetError::MissingFile {
                file: name,
                dir: dir.to_path_buf(),
            });
        }
        fs::read(&path).map_err(|e| WordnetError::io(&path, e))
    };

    let mut files = Vec::new();
    for pos in PartOfSpeech::ALL {
        let data = read(format!("data.{}", pos.file_suffix()))?;
        let index = read(format!("index.{}", pos.file_suffix()))?;
        files.push((pos, data, index));
    }

    let mut synsets = Vec::new();
    let mut index_entries = Vec::new();
    for (pos, data, index) in &files {
        synsets.extend(parse_data_file(data, *pos)?);
        index_entries.extend(parse_index_file(index, *pos)?);
    }

    let mut db = WordnetDb::from_synsets(version, synsets)?;

    let mut from_files: BTreeMap<(String, PartOfSpeech), Vec<SynsetId>> = BTreeMap::new();
    let mut offenders = Vec::new();
    for e in index_entries {
        let key = (index_key(&e.lemma), e.pos);
        let mut ids = Vec::with_capacity(e.offsets.len());
        for off in e.offsets {
            match SynsetId::new(off, e.pos) {
                Ok(id) => ids.push(id),
                Err(err) => offenders.push(format!("index.{} {}: {err}", e.pos.file_suffix(), e.lemma)),
            }
        }
        if from_files.insert(key, ids).is_some() {
            offenders.push(format!("index.{} lists {:?} twice", e.pos.file_suffix(), e.lemma));
        }
    }

    let keys: BTreeSet<&(String, PartOfSpeech)> = db.index.keys().chain(from_files.keys()).collect();
    for key in keys {
        let derived: BTreeSet<SynsetId> = db.index.get(key).into_iter().flatten().copied().collect();
        let listed: BTreeSet<SynsetId> = from_files.get(key).into_iter().flatten().copied().collect();
        if derived != listed {
            let missing: Vec<String> = derived.difference(&listed).map(ToString::to_string).collect();
            let extra: Vec<String> = listed.difference(&derived).map(ToString::to_string).collect();
            offenders.push(format!(
                "index.{} {:?}: missing [{}], not in data [{}]",
                key.1.file_suffix(),
                key.0,
                missing.join(" "),
                extra.join(" ")
            ));
        }
    }
    if !offenders.is_empty() {
        return Err(WordnetError::Consistency { offenders });
    }

    db.index = from_files;
    Ok(db)
}
