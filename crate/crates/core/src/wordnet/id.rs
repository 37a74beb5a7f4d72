use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest offset representable in the 8-digit data-file field.
pub const MAX_OFFSET: u32 = 99_999_999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartOfSpeech {
    Noun,
    Verb,
    Adj,
    Adv,
}

impl PartOfSpeech {
    pub const ALL: [PartOfSpeech; 4] = [Self::Noun, Self::Verb, Self::Adj, Self::Adv];

    /// Letter used in rendered ids and `index.*` lines.
    pub fn letter(self) -> char {
        match self {
            Self::Noun => 'n',
            Self::Verb => 'v',
            Self::Adj => 'a',
            Self::Adv => 'r',
        }
    }

    /// Accepts `s` (adjective satellite) as an adjective.
    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'n' => Some(Self::Noun),
            'v' => Some(Self::Verb),
            'a' | 's' => Some(Self::Adj),
            'r' => Some(Self::Adv),
            _ => None,
        }
    }

    /// Suffix of the `data.*` / `index.*` file names.
    pub fn file_suffix(self) -> &'static str {
        match self {
            Self::Noun => "noun",
            Self::Verb => "verb",
            Self::Adj => "adj",
            Self::Adv => "adv",
        }
    }

    /// Only nouns and verbs carry a hypernym taxonomy.
    pub fn has_taxonomy(self) -> bool {
        matches!(self, Self::Noun | Self::Verb)
    }
}

impl fmt::Display for PartOfSpeech {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_suffix())
    }
}

impl FromStr for PartOfSpeech {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "n" | "noun" => Ok(Self::Noun),
            "v" | "verb" => Ok(Self::Verb),
            "a" | "s" | "adj" | "adjective" => Ok(Self::Adj),
            "r" | "adv" | "adverb" => Ok(Self::Adv),
            other => Err(IdError::Pos(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdError {
    #[error("invalid synset id {0:?}: expected <8-digit offset>-<n|v|a|s|r>")]
    Malformed(String),
    #[error("synset offset {0} exceeds 99999999")]
    Range(u64),
    #[error("unknown part of speech {0:?}")]
    Pos(String),
}

/// A synset identifier: byte offset within `data.<pos>` plus the part of speech.
///
/// Rendered as `08272961-n`. Ordering is by part of speech, then offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SynsetId {
    pos: PartOfSpeech,
    offset: u32,
}

impl SynsetId {
    pub fn new(offset: u32, pos: PartOfSpeech) -> Result<Self, IdError> {
        if offset > MAX_OFFSET {
            return Err(IdError::Range(offset as u64));
        }
        Ok(Self { pos, offset })
    }

    pub fn offset(self) -> u32 {
        self.offset
    }

    pub fn pos(self) -> PartOfSpeech {
        self.pos
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08}-{}", self.offset, self.pos.letter())
    }
}

impl FromStr for SynsetId {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || IdError::Malformed(s.to_string());
        let (digits, pos) = s.trim().split_once('-').ok_or_else(malformed)?;
        if digits.is_empty() || digits.len() > 8 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let mut chars = pos.chars();
        let pos = match (chars.next(), chars.next()) {
            (Some(c), None) => PartOfSpeech::from_letter(c).ok_or_else(malformed)?,
            _ => return Err(malformed()),
        };
        let offset: u32 = digits.parse().map_err(|_| malformed())?;
        SynsetId::new(offset, pos)
    }
}

impl Serialize for SynsetId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SynsetId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn renders_zero_padded() {
        let id = SynsetId::new(8272961, PartOfSpeech::Noun).unwrap();
        assert_eq!(id.to_string(), "08272961-n");
        assert_eq!("08272961-n".parse::<SynsetId>().unwrap(), id);
    }

    #[test]
    fn satellite_parses_as_adjective() {
        let id: SynsetId = "03125643-s".parse().unwrap();
        assert_eq!(id.pos(), PartOfSpeech::Adj);
        assert_eq!(id.to_string(), "03125643-a");
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "123", "abc-n", "000000001-n", "00000001-x", "00000001-nn", "-n"] {
            assert!(bad.parse::<SynsetId>().is_err(), "{bad}");
        }
        assert!(SynsetId::new(100_000_000, PartOfSpeech::Noun).is_err());
    }

    proptest! {
        #[test]
        fn display_parse_roundtrip(offset in 0u32..=MAX_OFFSET, p in 0usize..4) {
            let id = SynsetId::new(offset, PartOfSpeech::ALL[p]).unwrap();
            prop_assert_eq!(id.to_string().parse::<SynsetId>().unwrap(), id);
        }
    }
}
