//! Embedding-distance screening of candidate lemmas.
//!
//! Each synset's candidates are placed on a 2D PCA projection and compared by
//! their distance to the origin. Candidates whose magnitudes chain together
//! under the threshold form groups; the largest group survives.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::embedding::{pca_fit_project, EmbeddingError, EmbeddingTable, Projection2D};
use crate::lexicon::{BilingualLexicon, CandidateLemma, Status};
use crate::wordnet::{PartOfSpeech, SynsetId};

#[derive(Debug, thiserror::Error)]
pub enum ScreeningError {
    #[error("no candidates to screen")]
    Empty,
    #[error("candidate {text:?} belongs to {found}, expected {expected}")]
    MixedSynsets { expected: SynsetId, found: SynsetId, text: String },
    #[error("invalid screening config: {0}")]
    Config(String),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// What to do with candidates that have no vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OovPolicy {
    Review,
    Keep,
    Drop,
}

impl FromStr for OovPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "review" => Ok(Self::Review),
            "keep" => Ok(Self::Keep),
            "drop" => Ok(Self::Drop),
            other => Err(format!("unknown OOV policy {other:?} (expected review, keep or drop)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreeningConfig {
    pub threshold: f64,
    pub min_candidates: usize,
    pub oov_policy: OovPolicy,
}

impl Default for ScreeningConfig {
    fn default() -> Self {
        Self {
            threshold: 0.21,
            min_candidates: 3,
            oov_policy: OovPolicy::Review,
        }
    }
}

impl ScreeningConfig {
    pub fn validate(&self) -> Result<(), ScreeningError> {
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(ScreeningError::Config(format!(
                "threshold must be positive, got {}",
                self.threshold
            )));
        }
        if self.min_candidates < 2 {
            return Err(ScreeningError::Config(format!(
                "min_candidates must be at least 2, got {}",
                self.min_candidates
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningOutcome {
    pub synset: SynsetId,
    pub kept: Vec<String>,
    pub dropped: Vec<String>,
    /// Out-of-vocabulary candidates routed to human review.
    pub deferred: Vec<String>,
    pub magnitudes: BTreeMap<String, f64>,
    /// Whether the threshold rule ran, as opposed to the small-set path.
    pub filtered: bool,
}

impl ScreeningOutcome {
    pub fn len(&self) -> usize {
        self.kept.len() + self.dropped.len() + self.deferred.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Distance of a lemma's 2D point to the origin; `None` if the lemma was not
/// projected.
pub fn magnitude(projection: &Projection2D, lemma: &str) -> Option<f64> {
    projection.get(lemma).map(|[x, y]| x.hypot(y))
}

/// Screens the candidates of one synset.
///
/// Human-decided candidates are passed through on their current side and do
/// not take part in grouping. Output lists are sorted by code point, so the
/// outcome does not depend on input order.
pub fn select_lemmas(
    candidates: &[CandidateLemma],
    projection: &Projection2D,
    cfg: &ScreeningConfig,
) -> Result<ScreeningOutcome, ScreeningError> {
    cfg.validate()?;
    let first = candidates.first().ok_or(ScreeningError::Empty)?;
    let synset = first.synset;
    if let Some(c) = candidates.iter().find(|c| c.synset != synset) {
        return Err(ScreeningError::MixedSynsets {
            expected: synset,
            found: c.synset,
            text: c.text.clone(),
        });
    }

    let mut out = ScreeningOutcome {
        synset,
        kept: Vec::new(),
        dropped: Vec::new(),
        deferred: Vec::new(),
        magnitudes: BTreeMap::new(),
        filtered: false,
    };
    let mut placed: Vec<(f64, &str)> = Vec::new();
    for c in candidates {
        let text = c.text.as_str();
        let m = magnitude(projection, text);
        if let Some(m) = m {
            out.magnitudes.insert(text.to_string(), m);
        }
        if c.status.is_human() {
            if c.status.is_dropped() {
                out.dropped.push(text.to_string());
            } else {
                out.kept.push(text.to_string());
            }
            continue;
        }
        match m {
            Some(m) => placed.push((m, text)),
            None => match cfg.oov_policy {
                OovPolicy::Review => out.deferred.push(text.to_string()),
                OovPolicy::Keep => out.kept.push(text.to_string()),
                OovPolicy::Drop => out.dropped.push(text.to_string()),
            },
        }
    }

    if placed.len() < cfg.min_candidates {
        out.kept.extend(placed.iter().map(|(_, t)| t.to_string()));
    } else {
        out.filtered = true;
        let keep = largest_group(&mut placed, cfg.threshold);
        for (i, (_, t)) in placed.iter().enumerate() {
            if keep.contains(&i) {
                out.kept.push(t.to_string());
            } else {
                out.dropped.push(t.to_string());
            }
        }
    }
    out.kept.sort();
    out.dropped.sort();
    out.deferred.sort();
    Ok(out)
}

/// Sorts `points` by magnitude and returns the index range of the largest
/// connected group, where neighbours closer than `threshold` are connected.
/// On a line, connected components of the threshold graph are exactly the
/// runs of consecutive points with gaps below the threshold.
fn largest_group(points: &mut [(f64, &str)], threshold: f64) -> std::ops::Range<usize> {
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    let mut best: Option<(std::ops::Range<usize>, &str)> = None;
    let mut start = 0;
    for end in 1..=points.len() {
        let split = end == points.len() || (points[end].0 - points[end - 1].0).abs() >= threshold;
        if !split {
            continue;
        }
        let smallest = points[start..end].iter().map(|(_, t)| *t).min().expect("non-empty run");
        let better = match &best {
            None => true,
            Some((r, s)) => end - start > r.len() || (end - start == r.len() && smallest < *s),
        };
        if better {
            best = Some((start..end, smallest));
        }
        start = end;
    }
    best.map(|(r, _)| r).unwrap_or(0..0)
}

/// Per-POS totals of a screening run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PosTally {
    pub synsets: usize,
    pub kept: usize,
    pub dropped: usize,
    pub deferred: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ScreeningSummary {
    pub by_pos: BTreeMap<PartOfSpeech, PosTally>,
}

impl ScreeningSummary {
    pub fn from_outcomes(outcomes: &[ScreeningOutcome]) -> Self {
        let mut by_pos: BTreeMap<PartOfSpeech, PosTally> = PartOfSpeech::ALL.iter().map(|p| (*p, PosTally::default())).collect();
        for o in outcomes {
            let t = by_pos.entry(o.synset.pos()).or_default();
            t.synsets += 1;
            t.kept += o.kept.len();
            t.dropped += o.dropped.len();
            t.deferred += o.deferred.len();
        }
        Self { by_pos }
    }

    pub fn total(&self) -> PosTally {
        self.by_pos.values().fold(PosTally::default(), |mut acc, t| {
            acc.synsets += t.synsets;
            acc.kept += t.kept;
            acc.dropped += t.dropped;
            acc.deferred += t.deferred;
            acc
        })
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("pos\tsynsets\tkept\tdropped\tdeferred\n");
        let total = self.total();
        let rows = self
            .by_pos
            .iter()
            .map(|(p, t)| (p.file_suffix(), t))
            .chain(std::iter::once(("total", &total)));
        for (label, t) in rows {
            let _ = writeln!(out, "{label}\t{}\t{}\t{}\t{}", t.synsets, t.kept, t.dropped, t.deferred);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct ScreeningRun {
    /// The input lexicon with statuses updated from the outcomes.
    pub lexicon: BilingualLexicon,
    pub outcomes: Vec<ScreeningOutcome>,
    pub summary: ScreeningSummary,
    /// Number of distinct tokens the projection was fitted on.
    pub fitted_tokens: usize,
}

impl ScreeningRun {
    /// One JSON outcome per line, in synset order.
    pub fn report_jsonl(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            out.push_str(&serde_json::to_string(o).expect("outcome serializes"));
            out.push('\n');
        }
        out
    }
}

/// Screens every candidate-bearing synset.
///
/// One projection is fitted over all distinct non-human candidate tokens of
/// the run. Deferred candidates keep their current status; others become
/// machine-kept or machine-dropped.
pub fn screen_all(lex: &BilingualLexicon, table: &EmbeddingTable, cfg: &ScreeningConfig) -> Result<ScreeningRun, ScreeningError> {
    cfg.validate()?;
    let tokens: Vec<&str> = {
        let mut seen = std::collections::BTreeSet::new();
        let mut v = Vec::new();
        for c in lex.all_candidates() {
            if !c.status.is_human() && seen.insert(c.text.as_str()) {
                v.push(c.text.as_str());
            }
        }
        v
    };
    let projection = match pca_fit_project(table, &tokens) {
        Ok(p) => p,
        Err(EmbeddingError::Degenerate(n)) => {
            // Too few vectors to fit; no synset can reach the threshold rule
            // either, so the points only need to mark what is in vocabulary.
            log::warn!("only {n} candidate tokens have vectors; skipping PCA");
            Projection2D::from_points(tokens.iter().filter(|t| table.contains(t)).map(|t| (*t, [0.0, 0.0])))
        }
        Err(e) => return Err(e.into()),
    };

    let mut lexicon = lex.clone();
    let mut outcomes = Vec::new();
    for (id, candidates) in lex.iter() {
        if candidates.is_empty() {
            continue;
        }
        let outcome = select_lemmas(candidates, &projection, cfg)?;
        let entry = lexicon.candidates_mut(id).expect("synset present in clone");
        for c in entry.iter_mut().filter(|c| !c.status.is_human()) {
            let next = if outcome.kept.contains(&c.text) {
                Status::MachineKept
            } else if outcome.dropped.contains(&c.text) {
                Status::MachineDropped
            } else {
                continue;
            };
            c.set_status(next).expect("machine statuses are reachable from non-human ones");
        }
        outcomes.push(outcome);
    }
    let summary = ScreeningSummary::from_outcomes(&outcomes);
    Ok(ScreeningRun {
        lexicon,
        outcomes,
        summary,
        fitted_tokens: projection.len(),
    })
}
