//! Tokenization and stopword filtering for mixed Chinese/English text.

use std::collections::HashSet;

/// Splits text into tokens.
pub trait Tokenizer {
    fn tokenize(&self, text: &str) -> Vec<String>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Han,
    Word,
    Other,
}

fn class(c: char) -> CharClass {
    if is_han(c) {
        CharClass::Han
    } else if c.is_alphanumeric() || c == '_' || c == '\'' {
        CharClass::Word
    } else {
        CharClass::Other
    }
}

pub fn is_han(c: char) -> bool {
    matches!(c,
        '\u{3007}'
        | '\u{3400}'..='\u{4DBF}'
        | '\u{4E00}'..='\u{9FFF}'
        | '\u{F900}'..='\u{FAFF}'
        | '\u{20000}'..='\u{2A6DF}'
        | '\u{2A700}'..='\u{2EBEF}')
}

/// Greedy longest-match segmentation of Han runs against a vocabulary, with
/// single characters as the fallback. Runs of other letters and digits become
/// one lowercased token each; everything else separates tokens.
#[derive(Debug, Clone, Default)]
pub struct LongestMatchTokenizer {
    vocab: HashSet<String>,
    max_chars: usize,
}

impl LongestMatchTokenizer {
    pub fn new<I, S>(vocab: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut t = Self::default();
        for w in vocab {
            t.add(w);
        }
        t
    }

    pub fn add(&mut self, word: impl Into<String>) {
        let word = word.into();
        let n = word.chars().count();
        if n > 1 && word.chars().all(is_han) {
            self.max_chars = self.max_chars.max(n);
            self.vocab.insert(word);
        }
    }

    pub fn vocab_len(&self) -> usize {
        self.vocab.len()
    }

    fn segment_han(&self, run: &[char], out: &mut Vec<String>) {
        let mut i = 0;
        while i < run.len() {
            let longest = (2..=self.max_chars.min(run.len() - i))
                .rev()
                .find(|&len| self.vocab.contains(&run[i..i + len].iter().collect::<String>()))
                .unwrap_or(1);
            out.push(run[i..i + longest].iter().collect());
            i += longest;
        }
    }
}

impl Tokenizer for LongestMatchTokenizer {
    fn tokenize(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let kind = class(chars[i]);
            let start = i;
            while i < chars.len() && class(chars[i]) == kind {
                i += 1;
            }
            match kind {
                CharClass::Han => self.segment_han(&chars[start..i], &mut out),
                CharClass::Word => {
                    let word: String = chars[start..i].iter().collect::<String>().to_lowercase();
                    let word = word.trim_matches('\'');
                    if !word.is_empty() {
                        out.push(word.to_string());
                    }
                }
                CharClass::Other => {}
            }
        }
        out
    }
}

const DEFAULT_STOPWORDS: &[&str] = &[
    // Chinese function words
    "的",
    "了",
    "是",
    "在",
    "和",
    "与",
    "及",
    "或",
    "也",
    "就",
    "都",
    "而",
    "着",
    "过",
    "之",
    "把",
    "被",
    "让",
    "给",
    "对",
    "从",
    "向",
    "以",
    "于",
    "为",
    "这",
    "那",
    "其",
    "此",
    "个",
    "一个",
    "一种",
    "我",
    "你",
    "他",
    "她",
    "它",
    "我们",
    "你们",
    "他们",
    "她们",
    "它们",
    "吗",
    "呢",
    "吧",
    "啊",
    "么",
    "等",
    "所",
    "如",
    "若",
    "则",
    "但",
    "并",
    "且",
    "又",
    "很",
    "更",
    "最",
    "某",
    "各",
    "每",
    "其他",
    "一些",
    "这个",
    "那个",
    "没有",
    "不",
    // English function words, for glosses
    "a",
    "an",
    "the",
    "of",
    "to",
    "in",
    "on",
    "at",
    "by",
    "for",
    "with",
    "from",
    "as",
    "or",
    "and",
    "that",
    "which",
    "who",
    "whom",
    "whose",
    "is",
    "are",
    "was",
    "were",
    "be",
    "been",
    "being",
    "it",
    "its",
    "this",
    "these",
    "those",
    "into",
    "onto",
    "than",
    "such",
    "some",
    "any",
    "something",
    "someone",
    "especially",
    "usually",
    "e.g",
    "etc",
];

/// A set of tokens removed before context and gloss composition.
#[derive(Debug, Clone)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Default for Stoplist {
    fn default() -> Self {
        Self::from_words(DEFAULT_STOPWORDS.iter().copied())
    }
}

impl Stoplist {
    pub fn empty() -> Self {
        Self { words: HashSet::new() }
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            words: words.into_iter().map(Into::into).collect(),
        }
    }

    /// One word per line; `#` starts a comment line.
    pub fn parse(text: &str) -> Self {
        Self::from_words(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string),
        )
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn filter(&self, tokens: Vec<String>) -> Vec<String> {
        tokens.into_iter().filter(|t| !self.contains(t)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn longest_match_then_single_chars() {
        let t = LongestMatchTokenizer::new(["人们", "长长的", "队伍", "长长"]);
        assert_eq!(t.tokenize("人们排起长长的队伍。"), ["人们", "排", "起", "长长的", "队伍"]);
    }

    #[test]
    fn latin_runs_lowercased() {
        let t = LongestMatchTokenizer::default();
        assert_eq!(
            t.tokenize("A group of Soldiers, (e.g. troops)"),
            ["a", "group", "of", "soldiers", "e", "g", "troops"]
        );
        assert_eq!(t.tokenize("用DNA检测"), ["用", "dna", "检", "测"]);
    }

    #[test]
    fn single_char_vocab_ignored() {
        let mut t = LongestMatchTokenizer::default();
        t.add("的");
        t.add("cat");
        assert_eq!(t.vocab_len(), 0);
    }

    #[test]
    fn stoplist_filtering() {
        let s = Stoplist::default();
        assert!(s.filter(vec!["的".into()]).is_empty());
        assert_eq!(s.filter(vec!["the".into(), "army".into()]), ["army"]);
        let custom = Stoplist::parse("# mine\n排\n\n");
        assert_eq!(custom.len(), 1);
        assert!(custom.contains("排"));
    }
}
