use serde::{Deserialize, Serialize};

use super::LexiconError;

/// One bilingual dictionary record: an English headword and its Chinese
/// translations, tagged with the dictionary it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictionaryEntry {
    pub english: String,
    pub chinese: Vec<String>,
    pub source: String,
}

/// Parses `english<TAB>chinese1|chinese2|...<TAB>source` lines.
///
/// Blank lines and lines starting with `#` are ignored. Empty translations
/// inside the `|` list are skipped; an entry left with none is an error.
pub fn parse_dictionary(text: &str) -> Result<Vec<DictionaryEntry>, LexiconError> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: &str| LexiconError::Parse {
            line: i + 1,
            message: message.to_string(),
        };
        let mut cols = line.split('\t');
        let (Some(english), Some(chinese), Some(source), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
            return Err(err("expected english<TAB>chinese|...<TAB>source"));
        };
        let english = english.trim();
        if english.is_empty() {
            return Err(err("empty English headword"));
        }
        let chinese: Vec<String> = chinese
            .split('|')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        if chinese.is_empty() {
            return Err(err("no Chinese translation"));
        }
        let source = source.trim();
        if source.is_empty() {
            return Err(err("empty source label"));
        }
        entries.push(DictionaryEntry {
            english: english.to_string(),
            chinese,
            source: source.to_string(),
        });
    }
    Ok(entries)
}
