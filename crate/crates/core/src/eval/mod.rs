//! Scoring a bilingual wordnet: gloss relatedness, conceptual similarity
//! and word sense disambiguation.

pub mod relatedness;
pub mod semeval;
pub mod similarity;
pub mod wsd;

use crate::embedding::EmbeddingError;
use crate::wordnet::{SynsetId, WordnetError};

pub use relatedness::{evaluate_relatedness, f_score, gloss_vector, GlossStandard, RelatednessReport};
pub use similarity::{
    evaluate_pairs, lcs, lin_sim, msim, node_ic, spearman, zhou_ic, IcParams, LinSim, SenseLookup, SimilarityReport, WordPairSet,
};
pub use wsd::{
    baseline, context_vector, context_window, disambiguate, preprocess, score, InstanceOutcome, Prediction, Sense, SenseInventory,
    SenseRepr, TypeTally, WsdContext, WsdInstance, WsdResult,
};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0} is empty")]
    Empty(&'static str),
    #[error("duplicate synset {0} in gloss standard")]
    DuplicateSynset(SynsetId),
    #[error("{0}")]
    Invalid(String),
    #[error("no in-vocabulary tokens in gloss {0:?}")]
    OovGloss(String),
    #[error("{0:?} is not in the sense inventory")]
    UnknownTarget(String),
    #[error("rank correlation undefined: {0}")]
    Undefined(&'static str),
    #[error(transparent)]
    Wordnet(#[from] WordnetError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}
