use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::relatedness::{gloss_vector, lemma_vector};
use super::EvalError;
use crate::embedding::{compose, cosine, Compose, EmbeddingTable};
use crate::lexicon::{BilingualLexicon, LemmaIndex};
use crate::text::{Stoplist, Tokenizer};
use crate::wordnet::{SynsetId, WordnetDb};

/// One sentence with an ambiguous target word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WsdInstance {
    pub id: String,
    pub sentence: String,
    pub target: String,
    /// Character (not byte) range of the target in the sentence.
    pub span: (usize, usize),
    pub word_type: String,
    pub gold: String,
}

impl WsdInstance {
    /// An instance whose span is the first occurrence of `target`.
    pub fn locate(
        id: impl Into<String>,
        sentence: &str,
        target: &str,
        word_type: impl Into<String>,
        gold: impl Into<String>,
    ) -> Option<Self> {
        let byte = sentence.find(target)?;
        let start = sentence[..byte].chars().count();
        Some(Self {
            id: id.into(),
            sentence: sentence.to_string(),
            target: target.to_string(),
            span: (start, start + target.chars().count()),
            word_type: word_type.into(),
            gold: gold.into(),
        })
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        let chars: Vec<char> = self.sentence.chars().collect();
        let (s, e) = self.span;
        if s >= e || e > chars.len() || chars[s..e].iter().collect::<String>() != self.target {
            return Err(EvalError::Invalid(format!(
                "instance {}: span {s}..{e} does not cover {:?}",
                self.id, self.target
            )));
        }
        Ok(())
    }

    /// Text before and after the target.
    fn split(&self) -> (String, String) {
        let chars: Vec<char> = self.sentence.chars().collect();
        (chars[..self.span.0].iter().collect(), chars[self.span.1..].iter().collect())
    }

    /// One JSON object per line.
    pub fn parse_jsonl(text: &str) -> Result<Vec<Self>, EvalError> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let inst: Self = serde_json::from_str(line).map_err(|e| EvalError::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            inst.validate().map_err(|e| EvalError::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            out.push(inst);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sense {
    pub id: String,
    pub english_lemma: String,
    pub gloss: String,
}

/// Candidate senses of each target word, in listing order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SenseInventory {
    words: BTreeMap<String, Vec<Sense>>,
}

impl SenseInventory {
    pub fn add(&mut self, word: impl Into<String>, sense: Sense) -> Result<(), EvalError> {
        let word = word.into();
        let senses = self.words.entry(word.clone()).or_default();
        if senses.iter().any(|s| s.id == sense.id) {
            return Err(EvalError::Invalid(format!("sense {} listed twice for {word}", sense.id)));
        }
        senses.push(sense);
        Ok(())
    }

    /// `word<TAB>sense-id<TAB>english-lemma<TAB>gloss` lines.
    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let mut inv = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| EvalError::Parse { line: i + 1, message };
            let cols: Vec<&str> = line.splitn(4, '\t').map(str::trim).collect();
            let [word, id, lemma, gloss] = cols[..] else {
                return Err(err("expected word<TAB>sense-id<TAB>english-lemma<TAB>gloss".into()));
            };
            if word.is_empty() || id.is_empty() {
                return Err(err("empty word or sense id".into()));
            }
            inv.add(
                word,
                Sense {
                    id: id.to_string(),
                    english_lemma: lemma.to_string(),
                    gloss: gloss.to_string(),
                },
            )
            .map_err(|e| err(e.to_string()))?;
        }
        Ok(inv)
    }

    pub fn senses(&self, word: &str) -> Option<&[Sense]> {
        self.words.get(word).map(Vec::as_slice)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// How a candidate sense is turned into a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SenseRepr {
    /// Mean vector of the sense's English gloss tokens.
    Gloss,
    /// Mean vector of the live Chinese lemmas of the sense's synset.
    ChineseLemma,
}

impl FromStr for SenseRepr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gloss" => Ok(Self::Gloss),
            "chinese-lemma" => Ok(Self::ChineseLemma),
            other => Err(format!("unknown sense representation {other:?} (expected gloss or chinese-lemma)")),
        }
    }
}

/// Resources shared by every disambiguation call.
pub struct WsdContext<'a> {
    pub db: &'a WordnetDb,
    pub lexicon: &'a BilingualLexicon,
    pub lemma_index: LemmaIndex,
    pub table: &'a EmbeddingTable,
    pub tokenizer: &'a dyn Tokenizer,
    pub stoplist: &'a Stoplist,
    /// Tokens taken on each side of the target.
    pub window: usize,
    pub sense_repr: SenseRepr,
}

impl<'a> WsdContext<'a> {
    pub fn new(
        db: &'a WordnetDb,
        lexicon: &'a BilingualLexicon,
        table: &'a EmbeddingTable,
        tokenizer: &'a dyn Tokenizer,
        stoplist: &'a Stoplist,
    ) -> Self {
        Self {
            db,
            lexicon,
            lemma_index: lexicon.lemma_index(),
            table,
            tokenizer,
            stoplist,
            window: 2,
            sense_repr: SenseRepr::Gloss,
        }
    }

    fn sense_vector(&self, sense: &Sense) -> Option<Vec<f64>> {
        match self.sense_repr {
            SenseRepr::Gloss => gloss_vector(&sense.gloss, self.table, self.tokenizer, self.stoplist).ok(),
            SenseRepr::ChineseLemma => {
                let id: SynsetId = sense.id.parse().ok()?;
                let vectors: Vec<&[f64]> = self.lexicon.live_lemmas(id).filter_map(|l| lemma_vector(self.table, l)).collect();
                compose(&vectors, Compose::Mean).ok()
            }
        }
    }
}

/// Tokens of the sentence in order, stopwords removed.
pub fn preprocess(sentence: &str, tokenizer: &dyn Tokenizer, stoplist: &Stoplist) -> Vec<String> {
    stoplist.filter(tokenizer.tokenize(sentence))
}

/// Preprocessed tokens with the target kept whole, and its position.
pub fn target_tokens(instance: &WsdInstance, tokenizer: &dyn Tokenizer, stoplist: &Stoplist) -> (Vec<String>, usize) {
    let (before, after) = instance.split();
    let mut tokens = preprocess(&before, tokenizer, stoplist);
    let pos = tokens.len();
    tokens.push(instance.target.clone());
    tokens.extend(preprocess(&after, tokenizer, stoplist));
    (tokens, pos)
}

/// Up to `width` tokens on each side of `target`, the target excluded.
pub fn context_window(tokens: &[String], target: usize, width: usize) -> Vec<String> {
    let lo = target.saturating_sub(width);
    let hi = (target + 1 + width).min(tokens.len());
    tokens[lo..target]
        .iter()
        .chain(&tokens[(target + 1).min(hi)..hi])
        .cloned()
        .collect()
}

/// Sum of the English gloss vectors of every synset the window tokens map
/// to through the lexicon; `None` when nothing contributes.
pub fn context_vector(window: &[String], ctx: &WsdContext<'_>) -> Option<Vec<f64>> {
    let mut parts = Vec::new();
    for token in window {
        for id in ctx.lemma_index.synsets(token) {
            let Some(synset) = ctx.db.get(*id) else { continue };
            if let Ok(v) = gloss_vector(&synset.gloss, ctx.table, ctx.tokenizer, ctx.stoplist) {
                parts.push(v);
            }
        }
    }
    compose(&parts, Compose::Sum).ok()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub sense: String,
    /// The first sense was taken because nothing discriminated.
    pub fallback: bool,
    pub context: Vec<String>,
}

/// Picks the sense whose vector is most cosine-similar to the context
/// vector. Ties go to the earliest listed sense; with no usable context the
/// first listed sense is taken.
pub fn disambiguate(instance: &WsdInstance, inventory: &SenseInventory, ctx: &WsdContext<'_>) -> Result<Prediction, EvalError> {
    let senses = inventory
        .senses(&instance.target)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| EvalError::UnknownTarget(instance.target.clone()))?;
    let (tokens, pos) = target_tokens(instance, ctx.tokenizer, ctx.stoplist);
    let window = context_window(&tokens, pos, ctx.window);
    let first = |context| Prediction {
        sense: senses[0].id.clone(),
        fallback: true,
        context,
    };
    if senses.len() == 1 {
        return Ok(first(window));
    }
    let Some(cv) = context_vector(&window, ctx) else {
        return Ok(first(window));
    };
    let mut best: Option<(usize, f64)> = None;
    for (i, sense) in senses.iter().enumerate() {
        let Some(sv) = ctx.sense_vector(sense) else { continue };
        let c = cosine(&cv, &sv)?;
        if !c.zero_norm && best.is_none_or(|(_, b)| c.value > b) {
            best = Some((i, c.value));
        }
    }
    Ok(match best {
        Some((i, _)) => Prediction {
            sense: senses[i].id.clone(),
            fallback: false,
            context: window,
        },
        None => first(window),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceOutcome {
    pub id: String,
    pub word_type: String,
    pub predicted: String,
    pub gold: String,
    pub correct: bool,
    pub fallback: bool,
}

impl InstanceOutcome {
    pub fn new(instance: &WsdInstance, predicted: String, fallback: bool) -> Self {
        Self {
            id: instance.id.clone(),
            word_type: instance.word_type.clone(),
            correct: predicted == instance.gold,
            predicted,
            gold: instance.gold.clone(),
            fallback,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TypeTally {
    pub m: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WsdResult {
    pub micro: f64,
    pub macro_: f64,
    pub per_type: BTreeMap<String, TypeTally>,
    pub instances: usize,
}

impl WsdResult {
    /// Micro and macro averages from per-word-type (correct, total) tallies.
    /// Types with no instances are left out.
    pub fn from_tallies(tallies: BTreeMap<String, TypeTally>) -> Result<Self, EvalError> {
        let mut per_type = BTreeMap::new();
        for (word, t) in tallies {
            if t.n == 0 {
                log::warn!("word type {word:?} has no instances; excluded from averages");
                continue;
            }
            if t.m > t.n {
                return Err(EvalError::Invalid(format!("word type {word:?} has {} correct of {}", t.m, t.n)));
            }
            per_type.insert(word, t);
        }
        if per_type.is_empty() {
            return Err(EvalError::Empty("WSD outcome set"));
        }
        let (m, n): (usize, usize) = per_type.values().fold((0, 0), |(m, n), t| (m + t.m, n + t.n));
        let macro_ = per_type.values().map(|t| t.m as f64 / t.n as f64).sum::<f64>() / per_type.len() as f64;
        Ok(Self {
            micro: m as f64 / n as f64,
            macro_,
            per_type,
            instances: n,
        })
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("word_type\tcorrect\ttotal\tprecision\n");
        for (w, t) in &self.per_type {
            let _ = writeln!(out, "{w}\t{}\t{}\t{:.4}", t.m, t.n, t.m as f64 / t.n as f64);
        }
        let _ = writeln!(
            out,
            "# micro {:.4}\tmacro {:.4}\tinstances {}",
            self.micro, self.macro_, self.instances
        );
        out
    }
}

/// Micro average Σm/Σn and macro average mean(m/n) over word types.
pub fn score(outcomes: &[InstanceOutcome]) -> Result<WsdResult, EvalError> {
    let mut tallies: BTreeMap<String, TypeTally> = BTreeMap::new();
    for o in outcomes {
        let t = tallies.entry(o.word_type.clone()).or_default();
        t.n += 1;
        if o.correct {
            t.m += 1;
        }
    }
    WsdResult::from_tallies(tallies)
}

/// First-listed-sense predictions.
pub fn baseline(instances: &[WsdInstance], inventory: &SenseInventory) -> Result<Vec<InstanceOutcome>, EvalError> {
    instances
        .iter()
        .map(|inst| {
            let first = inventory
                .senses(&inst.target)
                .and_then(|s| s.first())
                .ok_or_else(|| EvalError::UnknownTarget(inst.target.clone()))?;
            Ok(InstanceOutcome::new(inst, first.id.clone(), true))
        })
        .collect()
}

/// Disambiguates every instance in order.
pub fn run(instances: &[WsdInstance], inventory: &SenseInventory, ctx: &WsdContext<'_>) -> Result<Vec<InstanceOutcome>, EvalError> {
    instances
        .iter()
        .map(|inst| {
            let p = disambiguate(inst, inventory, ctx)?;
            Ok(InstanceOutcome::new(inst, p.sense, p.fallback))
        })
        .collect()
}

/// Instances whose gold sense is not listed for their target.
pub fn unlisted_gold<'i>(instances: &'i [WsdInstance], inventory: &SenseInventory) -> Vec<&'i str> {
    instances
        .iter()
        .filter(|inst| {
            let ids: HashSet<&str> = inventory
                .senses(&inst.target)
                .unwrap_or(&[])
                .iter()
                .map(|s| s.id.as_str())
                .collect();
            !ids.contains(inst.gold.as_str())
        })
        .map(|inst| inst.id.as_str())
        .collect()
}
