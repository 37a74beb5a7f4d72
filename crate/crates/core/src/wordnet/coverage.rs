use std::fmt::Write as _;

use serde::Serialize;

use super::db::WordnetDb;
use super::id::{PartOfSpeech, SynsetId};
use crate::lexicon::BilingualLexicon;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosCoverage {
    pub label: String,
    pub concepts: usize,
    pub translated: usize,
    pub ratio: f64,
    pub lemmas: usize,
}

impl PosCoverage {
    fn new(label: &str, concepts: usize, translated: usize, lemmas: usize) -> Self {
        Self {
            label: label.to_string(),
            concepts,
            translated,
            ratio: if concepts == 0 { 0.0 } else { translated as f64 / concepts as f64 },
            lemmas,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub rows: Vec<PosCoverage>,
    pub total: PosCoverage,
    /// Lexicon synsets that do not resolve in the wordnet.
    pub unresolved: Vec<SynsetId>,
}

impl CoverageReport {
    pub fn row(&self, pos: PartOfSpeech) -> &PosCoverage {
        &self.rows[PartOfSpeech::ALL.iter().position(|p| *p == pos).expect("all parts of speech")]
    }

    /// Tab-separated table: POS, concepts, translated, ratio, lemmas.
    pub fn to_table(&self) -> String {
        let mut out = String::from("pos\tconcepts\ttranslated\tratio\tlemmas\n");
        for r in self.rows.iter().chain(std::iter::once(&self.total)) {
            let _ = writeln!(out, "{}\t{}\t{}\t{:.3}\t{}", r.label, r.concepts, r.translated, r.ratio, r.lemmas);
        }
        if !self.unresolved.is_empty() {
            let _ = writeln!(out, "# {} lexicon synsets not in the wordnet", self.unresolved.len());
        }
        out
    }
}

/// Per-POS translation coverage. A synset counts as translated when it has
/// at least one live (not dropped) candidate; lemma counts are distinct live
/// `(synset, Chinese lemma)` pairs.
pub fn coverage_report(db: &WordnetDb, lex: &BilingualLexicon) -> CoverageReport {
    let mut translated = [0usize; 4];
    let mut lemmas = [0usize; 4];
    let mut unresolved = Vec::new();
    for id in lex.synsets() {
        if !db.contains(id) {
            unresolved.push(id);
            continue;
        }
        let slot = PartOfSpeech::ALL.iter().position(|p| *p == id.pos()).expect("pos");
        let live = lex.live_lemmas(id).count();
        if live > 0 {
            translated[slot] += 1;
            lemmas[slot] += live;
        }
    }
    let rows: Vec<PosCoverage> = PartOfSpeech::ALL
        .iter()
        .enumerate()
        .map(|(i, p)| PosCoverage::new(p.file_suffix(), db.count(*p), translated[i], lemmas[i]))
        .collect();
    let total = PosCoverage::new(
        "total",
        rows.iter().map(|r| r.concepts).sum(),
        translated.iter().sum(),
        lemmas.iter().sum(),
    );
    CoverageReport { rows, total, unresolved }
}
