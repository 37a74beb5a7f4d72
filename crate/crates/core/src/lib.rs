//! Construction and evaluation of bilingual English–Chinese wordnets.

pub mod config;
pub mod corrections;
pub mod embedding;
pub mod eval;
pub mod lexicon;
pub mod screening;
pub mod text;
pub mod wordnet;
