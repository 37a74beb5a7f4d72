use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Serialize;

use super::EvalError;
use crate::lexicon::LemmaIndex;
use crate::wordnet::{PartOfSpeech, SynsetId, Taxonomy, TaxonomyNode, WordnetDb, WordnetError};

/// Parameters of the depth-and-hyponym information content.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IcParams {
    /// Weight of the hyponym term against the depth term.
    pub k: f64,
    pub pos: PartOfSpeech,
    /// Node count of the taxonomy, virtual root included.
    pub max_nodes: usize,
    pub max_depth: u32,
}

impl IcParams {
    pub fn for_taxonomy(db: &WordnetDb, pos: PartOfSpeech, k: f64) -> Result<Self, EvalError> {
        let tax = db.taxonomy(pos)?;
        let params = Self {
            k,
            pos,
            max_nodes: tax.node_count(),
            max_depth: tax.max_depth(),
        };
        params.validate()?;
        Ok(params)
    }

    /// Both logarithm denominators must be non-zero, so a usable taxonomy
    /// has at least two nodes and depth at least two.
    pub fn validate(&self) -> Result<(), EvalError> {
        if !(0.0..=1.0).contains(&self.k) {
            return Err(EvalError::Invalid(format!("k must lie in [0, 1], got {}", self.k)));
        }
        if self.max_nodes < 2 || self.max_depth < 2 {
            return Err(EvalError::Invalid(format!(
                "information content needs max_nodes >= 2 and max_depth >= 2, got {} and {}",
                self.max_nodes, self.max_depth
            )));
        }
        Ok(())
    }

    /// IC of a node with `hypo` descendants at `depth`.
    pub fn ic(&self, hypo: usize, depth: u32) -> f64 {
        let hypo_term = 1.0 - ((hypo + 1) as f64).ln() / (self.max_nodes as f64).ln();
        let depth_term = (f64::from(depth) + 1.0).ln() / f64::from(self.max_depth).ln();
        self.k * hypo_term + (1.0 - self.k) * depth_term
    }

    fn node_ic(&self, tax: &Taxonomy, slot: usize) -> f64 {
        self.ic(tax.hyponym_count(slot), tax.depth(slot))
    }
}

fn taxonomy_for<'a>(db: &'a WordnetDb, params: &IcParams, ids: &[SynsetId]) -> Result<&'a Taxonomy, EvalError> {
    let tax = db.taxonomy(params.pos)?;
    for id in ids {
        if id.pos() != params.pos {
            return Err(EvalError::Invalid(format!("{id} is not in the {} taxonomy", params.pos)));
        }
        if tax.slot(*id).is_none() {
            return Err(WordnetError::NotFound(*id).into());
        }
    }
    Ok(tax)
}

/// Information content of a synset.
pub fn zhou_ic(db: &WordnetDb, id: SynsetId, params: &IcParams) -> Result<f64, EvalError> {
    let tax = taxonomy_for(db, params, &[id])?;
    Ok(params.node_ic(tax, tax.slot(id).expect("checked")))
}

/// Information content of any taxonomy node, the virtual root included.
pub fn node_ic(db: &WordnetDb, node: TaxonomyNode, params: &IcParams) -> Result<f64, EvalError> {
    let tax = db.taxonomy(params.pos)?;
    let slot = match node {
        TaxonomyNode::VirtualRoot(pos) if pos == params.pos && tax.has_virtual_root() => tax.root(),
        TaxonomyNode::VirtualRoot(pos) => return Err(EvalError::Invalid(format!("no virtual root in the {pos} taxonomy"))),
        TaxonomyNode::Synset(id) => taxonomy_for(db, params, &[id])?.slot(id).expect("checked"),
    };
    Ok(params.node_ic(tax, slot))
}

fn lcs_slot(tax: &Taxonomy, params: &IcParams, a: usize, b: usize) -> Result<usize, EvalError> {
    let above_a: HashSet<usize> = tax.ancestors(a).into_iter().collect();
    let common: HashSet<usize> = tax.ancestors(b).into_iter().filter(|s| above_a.contains(s)).collect();
    let mut best: Option<(usize, f64)> = None;
    for &s in &common {
        // Every node between two common ancestors is itself common, so a
        // common child means `s` is not lowest.
        if tax.children(s).iter().any(|c| common.contains(c)) {
            continue;
        }
        let ic = params.node_ic(tax, s);
        let better = match best {
            None => true,
            Some((t, bic)) => ic > bic || (ic == bic && tax.node(s) < tax.node(t)),
        };
        if better {
            best = Some((s, ic));
        }
    }
    best.map(|(s, _)| s)
        .ok_or_else(|| EvalError::Invalid(format!("{} and {} share no ancestor", tax.node(a), tax.node(b))))
}

/// Among the lowest common ancestors (either node itself included; none has
/// a descendant that is also a common ancestor), the one with the highest
/// information content; ties go to the smaller offset, the virtual root
/// ranking first.
///
/// In a tree this is simply the highest-IC common ancestor. With several
/// hypernyms, shortest-path depth can give an ancestor more IC than its
/// descendant, and restricting to lowest ancestors keeps `lcs(c, c) = c`.
pub fn lcs(db: &WordnetDb, c1: SynsetId, c2: SynsetId, params: &IcParams) -> Result<TaxonomyNode, EvalError> {
    let tax = taxonomy_for(db, params, &[c1, c2])?;
    let s = lcs_slot(tax, params, tax.slot(c1).expect("checked"), tax.slot(c2).expect("checked"))?;
    Ok(tax.node(s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinSim {
    pub value: f64,
    pub lcs: TaxonomyNode,
    /// Both concepts have zero IC; the value is 1 by convention.
    pub degenerate: bool,
}

/// 2·IC(lcs) / (IC(c1) + IC(c2)).
pub fn lin_sim(db: &WordnetDb, c1: SynsetId, c2: SynsetId, params: &IcParams) -> Result<LinSim, EvalError> {
    let tax = taxonomy_for(db, params, &[c1, c2])?;
    let (a, b) = (tax.slot(c1).expect("checked"), tax.slot(c2).expect("checked"));
    let s = lcs_slot(tax, params, a, b)?;
    let denom = params.node_ic(tax, a) + params.node_ic(tax, b);
    let (value, degenerate) = if denom == 0.0 {
        (1.0, true)
    } else {
        (2.0 * params.node_ic(tax, s) / denom, false)
    };
    Ok(LinSim {
        value,
        lcs: tax.node(s),
        degenerate,
    })
}

/// Maps a word to the synsets it can denote.
pub trait SenseLookup {
    fn senses(&self, word: &str) -> Vec<SynsetId>;
}

impl SenseLookup for LemmaIndex {
    fn senses(&self, word: &str) -> Vec<SynsetId> {
        self.synsets(word).to_vec()
    }
}

/// English lookup through the wordnet's own index.
impl SenseLookup for WordnetDb {
    fn senses(&self, word: &str) -> Vec<SynsetId> {
        self.lookup_any(word)
    }
}

/// Highest Lin similarity over all sense pairs of the two words within the
/// parameter's part of speech; `None` when either word has no such sense.
pub fn msim(db: &WordnetDb, lookup: &dyn SenseLookup, w1: &str, w2: &str, params: &IcParams) -> Result<Option<f64>, EvalError> {
    let of = |w: &str| -> Vec<SynsetId> {
        lookup
            .senses(w)
            .into_iter()
            .filter(|id| id.pos() == params.pos && db.contains(*id))
            .collect()
    };
    let (s1, s2) = (of(w1), of(w2));
    let mut best: Option<f64> = None;
    for a in &s1 {
        for b in &s2 {
            let v = lin_sim(db, *a, *b, params)?.value;
            best = Some(best.map_or(v, |m| m.max(v)));
        }
    }
    Ok(best)
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rank correlation: Pearson correlation of the average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    if x.len() != y.len() {
        return Err(EvalError::Invalid(format!(
            "rank correlation of {} against {} values",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(EvalError::Undefined("fewer than two observations"));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(EvalError::Undefined("non-finite value"));
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::Undefined("constant input"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Word pairs with human similarity judgements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordPairSet {
    pub label: String,
    pub pairs: Vec<(String, String, f64)>,
}

impl WordPairSet {
    pub fn new(label: impl Into<String>, pairs: Vec<(String, String, f64)>) -> Result<Self, EvalError> {
        let mut seen = HashSet::new();
        for (a, b, _) in &pairs {
            if !seen.insert((a.clone(), b.clone())) {
                return Err(EvalError::Invalid(format!("duplicate pair {a} / {b}")));
            }
        }
        Ok(Self {
            label: label.into(),
            pairs,
        })
    }

    /// `word1<TAB>word2<TAB>score` lines.
    pub fn parse(label: impl Into<String>, text: &str) -> Result<Self, EvalError> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| EvalError::Parse {
                line: i + 1,
                message: message.to_string(),
            };
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [a, b, score] = cols[..] else {
                return Err(err("expected word1<TAB>word2<TAB>score"));
            };
            if a.is_empty() || b.is_empty() {
                return Err(err("empty word"));
            }
            let score: f64 = score.parse().map_err(|_| err("score is not a number"))?;
            if !score.is_finite() {
                return Err(err("score is not finite"));
            }
            pairs.push((a.to_string(), b.to_string(), score));
        }
        Self::new(label, pairs)
    }

    /// Rejects scores outside `[lo, hi]`.
    pub fn check_scale(&self, lo: f64, hi: f64) -> Result<(), EvalError> {
        match self.pairs.iter().find(|(_, _, s)| *s < lo || *s > hi) {
            Some((a, b, s)) => Err(EvalError::Invalid(format!("score {s} of {a} / {b} outside [{lo}, {hi}]"))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairScore {
    pub word1: String,
    pub word2: String,
    pub human: f64,
    /// `None` when either word had no sense; scored as 0.
    pub msim: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityReport {
    pub label: String,
    pub params: IcParams,
    pub pairs: Vec<PairScore>,
    pub misses: usize,
    /// Over all pairs, misses scored 0. `None` when undefined.
    pub spearman: Option<f64>,
    /// Over covered pairs only.
    pub spearman_covered: Option<f64>,
}

impl SimilarityReport {
    pub fn to_table(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or("undefined".to_string(), |v| format!("{v:.4}"));
        let mut out = String::from("word1\tword2\thuman\tmsim\n");
        for p in &self.pairs {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                p.word1,
                p.word2,
                p.human,
                p.msim.map_or("miss".into(), |v| format!("{v:.6}"))
            );
        }
        let _ = writeln!(
            out,
            "# {}: spearman {} (misses as 0), {} over {} covered pairs; {} misses",
            self.label,
            fmt(self.spearman),
            fmt(self.spearman_covered),
            self.pairs.len() - self.misses,
            self.misses
        );
        out
    }
}

pub fn evaluate_pairs(
    db: &WordnetDb,
    lookup: &dyn SenseLookup,
    set: &WordPairSet,
    params: &IcParams,
) -> Result<SimilarityReport, EvalError> {
    if set.pairs.is_empty() {
        return Err(EvalError::Empty("word pair set"));
    }
    params.validate()?;
    let mut pairs = Vec::with_capacity(set.pairs.len());
    for (a, b, human) in &set.pairs {
        pairs.push(PairScore {
            word1: a.clone(),
            word2: b.clone(),
            human: *human,
            msim: msim(db, lookup, a, b, params)?,
        });
    }
    let misses = pairs.iter().filter(|p| p.msim.is_none()).count();
    let all: Vec<f64> = pairs.iter().map(|p| p.msim.unwrap_or(0.0)).collect();
    let human: Vec<f64> = pairs.iter().map(|p| p.human).collect();
    let covered: Vec<&PairScore> = pairs.iter().filter(|p| p.msim.is_some()).collect();
    let cx: Vec<f64> = covered.iter().map(|p| p.msim.expect("covered")).collect();
    let cy: Vec<f64> = covered.iter().map(|p| p.human).collect();
    Ok(SimilarityReport {
        label: set.label.clone(),
        params: *params,
        misses,
        spearman: spearman(&all, &human).ok(),
        spearman_covered: spearman(&cx, &cy).ok(),
        pairs,
    })
}
