//! Run configuration read from a `key = value` text file.
//!
//! ```text
//! # comments start with '#'
//! screening.threshold = 0.21
//! screening.min_candidates = 3
//! screening.oov_policy = review        # review | keep | drop
//! similarity.k = 0.5
//! similarity.pos = noun                # noun | verb
//! wsd.window = 2                       # tokens per side
//! wsd.sense_repr = gloss               # gloss | chinese-lemma
//! wordnet.version = 3.0
//! hard.noun+noun.min_chars = 5
//! hard.noun+noun.interior = 的
//! hard.noun+noun.forbid = ·
//! hard.verb+noun+verb+noun.min_chars = 7
//! hard.<name>.enabled = false          # removes a pattern
//! ```
//!
//! Unknown keys are errors. A `hard.<name>.*` key for a new name adds a
//! pattern.

use std::fmt::Write as _;

use serde::Serialize;

use crate::corrections::HardPattern;
use crate::eval::SenseRepr;
use crate::screening::{OovPolicy, ScreeningConfig};
use crate::wordnet::PartOfSpeech;

#[derive(Debug, thiserror::Error)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub screening: ScreeningConfig,
    pub similarity_k: f64,
    pub similarity_pos: PartOfSpeech,
    pub wsd_window: usize,
    pub wsd_sense_repr: SenseRepr,
    pub wordnet_version: String,
    pub hard_patterns: Vec<HardPattern>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            screening: ScreeningConfig::default(),
            similarity_k: 0.5,
            similarity_pos: PartOfSpeech::Noun,
            wsd_window: 2,
            wsd_sense_repr: SenseRepr::Gloss,
            wordnet_version: "3.0".into(),
            hard_patterns: HardPattern::defaults(),
        }
    }
}

fn num<T: std::str::FromStr>(value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("{value:?} is not a valid number"))
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split_once('#').map_or(raw, |(a, _)| a).trim();
            // A lone '#' value such as `interior = #` is not supported; '#'
            // always starts a comment.
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError { line: i + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
            cfg.set(key.trim(), value.trim()).map_err(err)?;
        }
        cfg.validate().map_err(|message| ConfigError { line: 0, message })?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "screening.threshold" => self.screening.threshold = num(value)?,
            "screening.min_candidates" => self.screening.min_candidates = num(value)?,
            "screening.oov_policy" => self.screening.oov_policy = value.parse::<OovPolicy>()?,
            "similarity.k" => self.similarity_k = num(value)?,
            "similarity.pos" => {
                self.similarity_pos = match value {
                    "noun" => PartOfSpeech::Noun,
                    "verb" => PartOfSpeech::Verb,
                    other => return Err(format!("similarity.pos must be noun or verb, got {other:?}")),
                }
            }
            "wsd.window" => self.wsd_window = num(value)?,
            "wsd.sense_repr" => self.wsd_sense_repr = value.parse()?,
            "wordnet.version" => {
                if value.is_empty() {
                    return Err("empty wordnet.version".into());
                }
                self.wordnet_version = value.to_string();
            }
            _ => {
                let Some((name, field)) = key.strip_prefix("hard.").and_then(|k| k.rsplit_once('.')) else {
                    return Err(format!("unknown key {key:?}"));
                };
                if name.is_empty() {
                    return Err(format!("unknown key {key:?}"));
                }
                if field == "enabled" {
                    match value {
                        "false" => self.hard_patterns.retain(|p| p.name != name),
                        "true" => {
                            self.hard_pattern(name);
                        }
                        other => return Err(format!("enabled must be true or false, got {other:?}")),
                    }
                    return Ok(());
                }
                let p = self.hard_pattern(name);
                match field {
                    "min_chars" => p.min_chars = num(value)?,
                    "interior" => p.interior = value.chars().filter(|c| !c.is_whitespace()).collect(),
                    "forbid" => p.forbid = value.chars().filter(|c| !c.is_whitespace()).collect(),
                    _ => return Err(format!("unknown key {key:?}")),
                }
            }
        }
        Ok(())
    }

    fn hard_pattern(&mut self, name: &str) -> &mut HardPattern {
        if let Some(i) = self.hard_patterns.iter().position(|p| p.name == name) {
            return &mut self.hard_patterns[i];
        }
        self.hard_patterns.push(HardPattern {
            name: name.to_string(),
            min_chars: 1,
            interior: Vec::new(),
            forbid: Vec::new(),
        });
        self.hard_patterns.last_mut().expect("just pushed")
    }

    pub fn validate(&self) -> Result<(), String> {
        self.screening.validate().map_err(|e| e.to_string())?;
        if !(0.0..=1.0).contains(&self.similarity_k) {
            return Err(format!("similarity.k must lie in [0, 1], got {}", self.similarity_k));
        }
        Ok(())
    }

    /// Every setting, one `key = value` per line, in a fixed order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let s = &self.screening;
        let _ = writeln!(out, "screening.threshold = {}", s.threshold);
        let _ = writeln!(out, "screening.min_candidates = {}", s.min_candidates);
        let policy = match s.oov_policy {
            OovPolicy::Review => "review",
            OovPolicy::Keep => "keep",
            OovPolicy::Drop => "drop",
        };
        let _ = writeln!(out, "screening.oov_policy = {policy}");
        let _ = writeln!(out, "similarity.k = {}", self.similarity_k);
        let _ = writeln!(out, "similarity.pos = {}", self.similarity_pos);
        let _ = writeln!(out, "wsd.window = {}", self.wsd_window);
        let repr = match self.wsd_sense_repr {
            SenseRepr::Gloss => "gloss",
            SenseRepr::ChineseLemma => "chinese-lemma",
        };
        let _ = writeln!(out, "wsd.sense_repr = {repr}");
        let _ = writeln!(out, "wordnet.version = {}", self.wordnet_version);
        for d in HardPattern::defaults() {
            if !self.hard_patterns.iter().any(|p| p.name == d.name) {
                let _ = writeln!(out, "hard.{}.enabled = false", d.name);
            }
        }
        for p in &self.hard_patterns {
            let _ = writeln!(out, "hard.{}.min_chars = {}", p.name, p.min_chars);
            let _ = writeln!(out, "hard.{}.interior = {}", p.name, p.interior.iter().collect::<String>());
            let _ = writeln!(out, "hard.{}.forbid = {}", p.name, p.forbid.iter().collect::<String>());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip_through_text() {
        let d = Config::default();
        assert_eq!(Config::parse(&d.to_text()).unwrap(), d);
        assert_eq!(Config::parse("").unwrap(), d);
    }

    #[test]
    fn overrides() {
        let c = Config::parse(
            "screening.threshold = 0.3 # looser\nscreening.oov_policy = drop\nsimilarity.pos = verb\nwsd.sense_repr = chinese-lemma\nhard.noun+noun.enabled = false\nhard.long.min_chars = 9\n",
        )
        .unwrap();
        assert_eq!(c.screening.threshold, 0.3);
        assert_eq!(c.screening.oov_policy, OovPolicy::Drop);
        assert_eq!(c.similarity_pos, PartOfSpeech::Verb);
        assert_eq!(c.wsd_sense_repr, SenseRepr::ChineseLemma);
        let names: Vec<&str> = c.hard_patterns.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["verb+noun+verb+noun", "long"]);
        assert_eq!(Config::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn errors() {
        assert_eq!(Config::parse("\nbogus = 1\n").unwrap_err().line, 2);
        assert!(Config::parse("screening.threshold = x").is_err());
        assert!(Config::parse("screening.threshold = -1").is_err());
        assert!(Config::parse("screening.min_candidates = 1").is_err());
        assert!(Config::parse("similarity.pos = adj").is_err());
        assert!(Config::parse("similarity.k = 2").is_err());
        assert!(Config::parse("no equals sign").is_err());
        assert!(Config::parse("hard.x.colour = red").is_err());
    }
}
