use serde::{Deserialize, Serialize};

use super::CorrectionError;
use crate::wordnet::PartOfSpeech;

/// Name separator placed between given and family names.
pub const NAME_DOT: char = '·';

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub text: String,
    /// False when there was nothing to join.
    pub changed: bool,
}

/// Joins the segments of a transliterated personal name with `·`.
///
/// The segments must spell the lemma once any existing dots are ignored. A
/// single segment leaves the lemma unchanged.
pub fn normalize_name<S: AsRef<str>>(lemma: &str, segments: &[S]) -> Result<Normalized, CorrectionError> {
    let undotted: String = lemma.chars().filter(|c| *c != NAME_DOT).collect();
    let joined: String = segments.iter().map(AsRef::as_ref).collect();
    if segments.is_empty() || joined != undotted || segments.iter().any(|s| s.as_ref().is_empty()) {
        return Err(CorrectionError::Segmentation {
            lemma: lemma.to_string(),
            segments: segments.iter().map(|s| s.as_ref().to_string()).collect(),
        });
    }
    if segments.len() == 1 {
        return Ok(Normalized {
            text: lemma.to_string(),
            changed: false,
        });
    }
    let text = segments.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(&NAME_DOT.to_string());
    Ok(Normalized {
        changed: text != lemma,
        text,
    })
}

/// Marks bound affixes with `+`: verbs 使X → 使+X and X于 → X+于, adverbs
/// X地 → X+地, adjectives X的 → X+的. Single characters, other parts of
/// speech and already-marked lemmas are returned unchanged.
pub fn mark_affix(lemma: &str, pos: PartOfSpeech) -> String {
    if lemma.chars().count() < 2 {
        return lemma.to_string();
    }
    let mut out = lemma.to_string();
    if pos == PartOfSpeech::Verb && out.starts_with('使') && !out.starts_with("使+") {
        out.insert(out.find('使').expect("prefix") + '使'.len_utf8(), '+');
    }
    let suffix = match pos {
        PartOfSpeech::Verb => Some('于'),
        PartOfSpeech::Adv => Some('地'),
        PartOfSpeech::Adj => Some('的'),
        PartOfSpeech::Noun => None,
    };
    if let Some(suffix) = suffix {
        if let Some(stem) = out.strip_suffix(suffix) {
            if !stem.is_empty() && !stem.ends_with('+') {
                out = format!("{stem}+{suffix}");
            }
        }
    }
    out
}

/// A surface heuristic for translations that are descriptions rather than
/// words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardPattern {
    pub name: String,
    /// Minimum length in characters.
    pub min_chars: usize,
    /// Characters of which at least one must occur strictly inside the lemma.
    #[serde(default)]
    pub interior: Vec<char>,
    /// Characters that rule the pattern out (e.g. the name dot).
    #[serde(default)]
    pub forbid: Vec<char>,
}

impl HardPattern {
    /// The shipped patterns: long lemmas joined by 的 (`noun+noun`) and long
    /// action descriptions (`verb+noun+verb+noun`).
    pub fn defaults() -> Vec<Self> {
        vec![
            Self {
                name: "noun+noun".into(),
                min_chars: 5,
                interior: vec!['的'],
                forbid: vec![NAME_DOT],
            },
            Self {
                name: "verb+noun+verb+noun".into(),
                min_chars: 7,
                interior: Vec::new(),
                forbid: vec![NAME_DOT],
            },
        ]
    }

    pub fn matches(&self, lemma: &str) -> bool {
        let chars: Vec<char> = lemma.chars().collect();
        if chars.len() < self.min_chars || chars.iter().any(|c| self.forbid.contains(c)) {
            return false;
        }
        self.interior.is_empty() || (chars.len() > 2 && chars[1..chars.len() - 1].iter().any(|c| self.interior.contains(c)))
    }
}

/// Name of the first pattern the lemma matches.
pub fn flag_hard_translation<'p>(lemma: &str, patterns: &'p [HardPattern]) -> Option<&'p str> {
    patterns.iter().find(|p| p.matches(lemma)).map(|p| p.name.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn names() {
        let n = normalize_name("亨利路易斯亚伦", &["亨利", "路易", "斯亚伦"]).unwrap();
        assert_eq!(n.text, "亨利·路易·斯亚伦");
        assert!(n.changed);
        let one = normalize_name("亚伦", &["亚伦"]).unwrap();
        assert_eq!(
            one,
            Normalized {
                text: "亚伦".into(),
                changed: false
            }
        );
        let two = normalize_name("汤姆琼斯", &["汤姆", "琼斯"]).unwrap();
        assert_eq!(two.text.matches(NAME_DOT).count(), 1);
        assert!(normalize_name("汤姆琼斯", &["汤姆", "琼"]).is_err());
        assert!(normalize_name::<&str>("汤姆", &[]).is_err());
        let again = normalize_name(&two.text, &["汤姆", "琼斯"]).unwrap();
        assert!(!again.changed);
    }

    #[test]
    fn affixes() {
        assert_eq!(mark_affix("使变硬", PartOfSpeech::Verb), "使+变硬");
        assert_eq!(mark_affix("归功于", PartOfSpeech::Verb), "归功+于");
        assert_eq!(mark_affix("使屈从于", PartOfSpeech::Verb), "使+屈从+于");
        assert_eq!(mark_affix("慢慢地", PartOfSpeech::Adv), "慢慢+地");
        assert_eq!(mark_affix("汤加的", PartOfSpeech::Adj), "汤加+的");
        assert_eq!(mark_affix("汤加的", PartOfSpeech::Noun), "汤加的");
        assert_eq!(mark_affix("的", PartOfSpeech::Adj), "的");
        assert_eq!(mark_affix("快乐", PartOfSpeech::Adj), "快乐");
    }

    #[test]
    fn hard_translations() {
        let p = HardPattern::defaults();
        assert_eq!(flag_hard_translation("用枪击穿膝盖骨", &p), Some("verb+noun+verb+noun"));
        assert_eq!(flag_hard_translation("杂货店的男孩", &p), Some("noun+noun"));
        assert_eq!(flag_hard_translation("队", &p), None);
        assert_eq!(flag_hard_translation("白尼罗河", &p), None);
        assert_eq!(flag_hard_translation("亨利·路易·斯亚伦", &p), None);
        assert_eq!(flag_hard_translation("美丽的", &p), None);
    }

    proptest! {
        #[test]
        fn mark_affix_idempotent(s in "[使于地的+ab]{0,6}", p in 0usize..4) {
            let pos = PartOfSpeech::ALL[p];
            let once = mark_affix(&s, pos);
            prop_assert_eq!(mark_affix(&once, pos), once);
        }
    }
}
