use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Serialize;

use super::EvalError;
use crate::embedding::{compose, cosine, Compose, EmbeddingTable};
use crate::lexicon::BilingualLexicon;
use crate::text::{Stoplist, Tokenizer};
use crate::wordnet::{PartOfSpeech, SynsetId};

/// Synsets paired with a reference Chinese gloss.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlossStandard {
    pub label: String,
    pub entries: Vec<(SynsetId, String)>,
}

impl GlossStandard {
    pub fn new(label: impl Into<String>, entries: Vec<(SynsetId, String)>) -> Result<Self, EvalError> {
        let mut seen = HashSet::new();
        for (id, _) in &entries {
            if !seen.insert(*id) {
                return Err(EvalError::DuplicateSynset(*id));
            }
        }
        Ok(Self {
            label: label.into(),
            entries,
        })
    }

    /// `synset-id<TAB>chinese-gloss` lines; `#` comments and blank lines skipped.
    pub fn parse(label: impl Into<String>, text: &str) -> Result<Self, EvalError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| EvalError::Parse { line: i + 1, message };
            let (id, gloss) = line.split_once('\t').ok_or_else(|| err("expected synset<TAB>gloss".into()))?;
            let id: SynsetId = id.trim().parse().map_err(|e| err(format!("{e}")))?;
            let gloss = gloss.trim();
            if gloss.is_empty() {
                return Err(err(format!("empty gloss for {id}")));
            }
            entries.push((id, gloss.to_string()));
        }
        Self::new(label, entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Checks the canonical shape: 180 or 240 entries split 3:1:1:1 across
    /// nouns, verbs, adjectives and adverbs (each count within one of the
    /// exact share).
    pub fn validate_canonical(&self) -> Result<(), EvalError> {
        let n = self.entries.len();
        if n != 180 && n != 240 {
            return Err(EvalError::Invalid(format!("canonical gloss sets have 180 or 240 entries, got {n}")));
        }
        let count = |pos: PartOfSpeech| self.entries.iter().filter(|(id, _)| id.pos() == pos).count();
        let share = [3.0, 1.0, 1.0, 1.0];
        for (pos, s) in PartOfSpeech::ALL.iter().zip(share) {
            let want = n as f64 * s / 6.0;
            let got = count(*pos);
            if (got as f64 - want).abs() > 1.0 {
                return Err(EvalError::Invalid(format!(
                    "{} has {got} {} entries, expected about {want}",
                    self.label,
                    pos.file_suffix()
                )));
            }
        }
        Ok(())
    }
}

/// F = 2PR/(P+R), or 0 when both are 0.
pub fn f_score(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Mean vector of the gloss's in-vocabulary tokens after stopword removal.
pub fn gloss_vector(gloss: &str, table: &EmbeddingTable, tokenizer: &dyn Tokenizer, stoplist: &Stoplist) -> Result<Vec<f64>, EvalError> {
    let tokens = stoplist.filter(tokenizer.tokenize(gloss));
    let vectors: Vec<&[f64]> = tokens.iter().filter_map(|t| table.get(t)).collect();
    if vectors.is_empty() {
        return Err(EvalError::OovGloss(gloss.to_string()));
    }
    Ok(compose(&vectors, Compose::Mean)?)
}

/// Vector of a Chinese lemma, ignoring the `+` affix and `·` name markers
/// added during correction when the marked form itself has no vector.
pub(crate) fn lemma_vector<'t>(table: &'t EmbeddingTable, lemma: &str) -> Option<&'t [f64]> {
    table.get(lemma).or_else(|| {
        let bare: String = lemma.chars().filter(|c| *c != '+' && *c != '·').collect();
        table.get(&bare)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaDetail {
    pub lemma: String,
    /// Synset whose gloss the lemma is most related to; absent for OOV lemmas.
    pub best: Option<SynsetId>,
    pub cosine: Option<f64>,
    pub right: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConceptDetail {
    pub synset: SynsetId,
    pub lemmas: Vec<LemmaDetail>,
    pub right: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelatednessReport {
    pub label: String,
    pub relatedness: &'static str,
    pub ng: usize,
    pub e: usize,
    pub s: usize,
    pub l: usize,
    pub r: f64,
    pub p: f64,
    pub f: f64,
    /// Lemmas without a usable vector, all counted wrong.
    pub oov_lemmas: usize,
    /// Standard glosses without a usable vector.
    pub oov_glosses: Vec<SynsetId>,
    /// Standard synsets with no live lemma in the lexicon.
    pub missing_synsets: Vec<SynsetId>,
    pub details: Vec<ConceptDetail>,
}

impl RelatednessReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "standard\tng\tE\tS\tL\tR\tP\tF");
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}",
            self.label, self.ng, self.e, self.s, self.l, self.r, self.p, self.f
        );
        out
    }
}

/// Scores each standard synset's live lemmas by which standard gloss they
/// are most related to (cosine against the mean gloss-token vector). A lemma
/// is right when its best gloss is its own synset's, the lowest-index gloss
/// winning ties; a concept is right when it has lemmas and all are right.
pub fn evaluate_relatedness(
    lex: &BilingualLexicon,
    std: &GlossStandard,
    table: &EmbeddingTable,
    tokenizer: &dyn Tokenizer,
    stoplist: &Stoplist,
) -> Result<RelatednessReport, EvalError> {
    if std.is_empty() {
        return Err(EvalError::Empty("gloss standard"));
    }
    let mut oov_glosses = Vec::new();
    let glosses: Vec<Option<Vec<f64>>> = std
        .entries
        .iter()
        .map(|(id, gloss)| {
            let v = gloss_vector(gloss, table, tokenizer, stoplist)
                .ok()
                .filter(|v| v.iter().any(|x| *x != 0.0));
            if v.is_none() {
                oov_glosses.push(*id);
            }
            v
        })
        .collect();

    let mut details = Vec::with_capacity(std.len());
    let mut missing_synsets = Vec::new();
    let (mut e, mut s, mut l, mut oov_lemmas) = (0, 0, 0, 0);
    for (own, (id, _)) in std.entries.iter().enumerate() {
        let lemmas: Vec<&str> = lex.live_lemmas(*id).collect();
        if lemmas.is_empty() {
            missing_synsets.push(*id);
        }
        let mut rows = Vec::with_capacity(lemmas.len());
        for lemma in lemmas {
            s += 1;
            let v = lemma_vector(table, lemma).filter(|v| v.iter().any(|x| *x != 0.0));
            let Some(v) = v else {
                oov_lemmas += 1;
                rows.push(LemmaDetail {
                    lemma: lemma.to_string(),
                    best: None,
                    cosine: None,
                    right: false,
                });
                continue;
            };
            let mut best: Option<(usize, f64)> = None;
            for (j, g) in glosses.iter().enumerate() {
                let Some(g) = g else { continue };
                let c = cosine(v, g)?.value;
                if best.is_none_or(|(_, b)| c > b) {
                    best = Some((j, c));
                }
            }
            let right = best.is_some_and(|(j, _)| j == own);
            if right {
                l += 1;
            }
            rows.push(LemmaDetail {
                lemma: lemma.to_string(),
                best: best.map(|(j, _)| std.entries[j].0),
                cosine: best.map(|(_, c)| c),
                right,
            });
        }
        let right = !rows.is_empty() && rows.iter().all(|r| r.right);
        if right {
            e += 1;
        }
        details.push(ConceptDetail {
            synset: *id,
            lemmas: rows,
            right,
        });
    }

    let ng = std.len();
    let r = e as f64 / ng as f64;
    let p = if s == 0 { 0.0 } else { l as f64 / s as f64 };
    Ok(RelatednessReport {
        label: std.label.clone(),
        relatedness: "cosine(lemma vector, mean of gloss token vectors)",
        ng,
        e,
        s,
        l,
        r,
        p,
        f: f_score(p, r),
        oov_lemmas,
        oov_glosses,
        missing_synsets,
        details,
    })
}
