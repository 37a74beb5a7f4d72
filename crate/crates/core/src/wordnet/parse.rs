//! Readers and writers for the Princeton WordNet 3.0 `data.<pos>` and
//! `index.<pos>` flat-file grammars.
//!
//! A data line is
//!
//! ```text
//! offset lex_filenum ss_type w_cnt word lex_id [word lex_id...] p_cnt [ptr...] [frames...] | gloss
//! ```
//!
//! where `w_cnt` and `lex_id` are hexadecimal, `p_cnt` is three decimal digits,
//! each pointer is `symbol offset pos source/target`, and verb lines carry
//! `f_cnt + f_num w_num ...` frame records. Lines beginning with two spaces
//! are the license header and are skipped.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use super::id::{PartOfSpeech, SynsetId};
use super::synset::{Lemma, Relation, RelationKind, Synset, VerbFrame};
use super::WordnetError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line} (byte {byte_offset}): {message}")]
pub struct ParseError {
    pub line: usize,
    pub byte_offset: usize,
    pub message: String,
}

/// One `index.<pos>` record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexEntry {
    pub lemma: String,
    pub pos: PartOfSpeech,
    pub pointers: Vec<String>,
    pub tagsense_cnt: u32,
    pub offsets: Vec<u32>,
}

/// Lines of `content` that are not license header lines, with their
/// 1-based line number and byte offset.
fn body_lines(content: &str) -> impl Iterator<Item = (usize, usize, &str)> {
    let mut offset = 0usize;
    content.split_inclusive('\n').enumerate().filter_map(move |(i, raw)| {
        let start = offset;
        offset += raw.len();
        let line = raw.trim_end_matches(['\n', '\r']);
        if line.starts_with("  ") || line.trim().is_empty() {
            None
        } else {
            Some((i + 1, start, line))
        }
    })
}

pub(crate) fn decode_utf8<'a>(bytes: &'a [u8], file: &str) -> Result<&'a str, WordnetError> {
    std::str::from_utf8(bytes).map_err(|e| WordnetError::Encoding {
        file: file.to_string(),
        byte_offset: e.valid_up_to(),
    })
}

struct Fields<'a> {
    inner: std::str::SplitAsciiWhitespace<'a>,
    line: usize,
    byte_offset: usize,
}

impl<'a> Fields<'a> {
    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            byte_offset: self.byte_offset,
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<&'a str, ParseError> {
        self.inner
            .next()
            .ok_or_else(|| self.err(format!("unexpected end of line, expected {what}")))
    }

    fn dec<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, ParseError> {
        let tok = self.next(what)?;
        tok.parse().map_err(|_| self.err(format!("invalid {what} {tok:?}")))
    }

    fn hex(&mut self, what: &str) -> Result<u32, ParseError> {
        let tok = self.next(what)?;
        u32::from_str_radix(tok, 16).map_err(|_| self.err(format!("invalid hex {what} {tok:?}")))
    }

    fn pos(&mut self) -> Result<(PartOfSpeech, char), ParseError> {
        let tok = self.next("part of speech")?;
        let mut chars = tok.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => PartOfSpeech::from_letter(c)
                .map(|p| (p, c))
                .ok_or_else(|| self.err(format!("unknown part of speech {tok:?}"))),
            _ => Err(self.err(format!("unknown part of speech {tok:?}"))),
        }
    }
}

fn parse_data_line(line: &str, line_no: usize, byte_offset: usize, pos: PartOfSpeech) -> Result<Synset, ParseError> {
    let (head, gloss) = match line.split_once('|') {
        Some((h, g)) => (h, g.trim()),
        None => {
            return Err(ParseError {
                line: line_no,
                byte_offset,
                message: "missing '|' gloss separator".into(),
            })
        }
    };
    let mut f = Fields {
        inner: head.split_ascii_whitespace(),
        line: line_no,
        byte_offset,
    };

    let offset_tok = f.next("synset offset")?;
    if offset_tok.len() != 8 || !offset_tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(f.err(format!("synset offset {offset_tok:?} is not 8 digits")));
    }
    let offset: u32 = offset_tok.parse().map_err(|_| f.err("bad offset"))?;
    let lex_filenum: u8 = f.dec("lex_filenum")?;
    let (ss_pos, ss_char) = f.pos()?;
    if ss_pos != pos {
        return Err(f.err(format!("ss_type {ss_char:?} does not belong in data.{}", pos.file_suffix())));
    }
    let id = SynsetId::new(offset, pos).map_err(|e| f.err(e.to_string()))?;

    let w_cnt = f.hex("w_cnt")?;
    if w_cnt == 0 {
        return Err(f.err("synset has no lemmas"));
    }
    let mut lemmas = Vec::with_capacity(w_cnt as usize);
    for _ in 0..w_cnt {
        let raw = f.next("word")?;
        let lex_id = f.hex("lex_id")?;
        let (word, marker) = split_marker(raw);
        lemmas.push(Lemma {
            word: word.to_string(),
            lex_id: u8::try_from(lex_id).map_err(|_| f.err("lex_id out of range"))?,
            marker: marker.map(str::to_string),
        });
    }

    let p_cnt: usize = f.dec("p_cnt")?;
    let mut relations = Vec::with_capacity(p_cnt);
    for _ in 0..p_cnt {
        let symbol = f.next("pointer symbol")?;
        let target_tok = f.next("pointer offset")?;
        let target_off: u32 = target_tok
            .parse()
            .map_err(|_| f.err(format!("invalid pointer offset {target_tok:?}")))?;
        let (target_pos, _) = f.pos()?;
        let words = f.hex("source/target")?;
        relations.push(Relation {
            kind: RelationKind::from_symbol(symbol),
            target: SynsetId::new(target_off, target_pos).map_err(|e| f.err(e.to_string()))?,
            words: u16::try_from(words).map_err(|_| f.err("source/target out of range"))?,
        });
    }

    let mut frames = Vec::new();
    if pos == PartOfSpeech::Verb {
        let f_cnt: usize = f.dec("f_cnt")?;
        for _ in 0..f_cnt {
            let plus = f.next("frame marker")?;
            if plus != "+" {
                return Err(f.err(format!("expected '+' before frame, found {plus:?}")));
            }
            let frame: u8 = f.dec("f_num")?;
            let word = f.hex("w_num")?;
            frames.push(VerbFrame {
                frame,
                word: u8::try_from(word).map_err(|_| f.err("w_num out of range"))?,
            });
        }
    }

    if let Some(extra) = f.inner.next() {
        return Err(f.err(format!("unexpected trailing field {extra:?} before gloss")));
    }
    if gloss.is_empty() {
        return Err(f.err("empty gloss"));
    }

    Ok(Synset {
        id,
        lex_filenum,
        satellite: ss_char == 's',
        lemmas,
        relations,
        frames,
        gloss: gloss.to_string(),
    })
}

/// Splits an adjective marker such as `(ip)` off a data-file word.
fn split_marker(raw: &str) -> (&str, Option<&str>) {
    if let Some(stripped) = raw.strip_suffix(')') {
        if let Some(open) = stripped.rfind('(') {
            let marker = &stripped[open + 1..];
            if matches!(marker, "a" | "p" | "ip") && open > 0 {
                return (&stripped[..open], Some(marker));
            }
        }
    }
    (raw, None)
}

/// Parses one `data.<pos>` file.
///
/// Relation targets in the same part of speech must resolve within the file;
/// cross-POS targets are checked when the whole database is linked.
pub fn parse_data_file(content: &[u8], pos: PartOfSpeech) -> Result<Vec<Synset>, WordnetError> {
    let file = format!("data.{}", pos.file_suffix());
    let text = decode_utf8(content, &file)?;
    let mut synsets = Vec::new();
    let mut seen = HashSet::new();
    for (line_no, byte_offset, line) in body_lines(text) {
        let synset = parse_data_line(line, line_no, byte_offset, pos).map_err(|source| WordnetError::Parse {
            file: file.clone(),
            source,
        })?;
        if !seen.insert(synset.id) {
            return Err(WordnetError::Parse {
                file: file.clone(),
                source: ParseError {
                    line: line_no,
                    byte_offset,
                    message: format!("duplicate synset {}", synset.id),
                },
            });
        }
        synsets.push(synset);
    }

    let unresolved: BTreeSet<(SynsetId, SynsetId)> = synsets
        .iter()
        .flat_map(|s| s.relations.iter().map(move |r| (s.id, r.target)))
        .filter(|(_, t)| t.pos() == pos && !seen.contains(t))
        .collect();
    if !unresolved.is_empty() {
        return Err(WordnetError::Link {
            unresolved: unresolved.into_iter().collect(),
        });
    }
    Ok(synsets)
}

/// Renders a synset as a `data.<pos>` line (without trailing newline).
pub fn write_data_line(s: &Synset) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "{:08} {:02} {} {:02x}",
        s.id.offset(),
        s.lex_filenum,
        s.ss_type(),
        s.lemmas.len()
    );
    for l in &s.lemmas {
        match &l.marker {
            Some(m) => {
                let _ = write!(out, " {}({}) {:x}", l.word, m, l.lex_id);
            }
            None => {
                let _ = write!(out, " {} {:x}", l.word, l.lex_id);
            }
        }
    }
    let _ = write!(out, " {:03}", s.relations.len());
    for r in &s.relations {
        let _ = write!(
            out,
            " {} {:08} {} {:04x}",
            r.kind.symbol(),
            r.target.offset(),
            r.target.pos().letter(),
            r.words
        );
    }
    if s.id.pos() == PartOfSpeech::Verb {
        let _ = write!(out, " {:02}", s.frames.len());
        for fr in &s.frames {
            let _ = write!(out, " + {:02} {:02x}", fr.frame, fr.word);
        }
    }
    let _ = write!(out, " | {}  ", s.gloss);
    out
}

/// Renders a complete data file body, one line per synset.
pub fn write_data_file<'a>(synsets: impl IntoIterator<Item = &'a Synset>) -> String {
    let mut out = String::new();
    for s in synsets {
        out.push_str(&write_data_line(s));
        out.push('\n');
    }
    out
}

fn parse_index_line(line: &str, line_no: usize, byte_offset: usize, pos: PartOfSpeech) -> Result<IndexEntry, ParseError> {
    let mut f = Fields {
        inner: line.split_ascii_whitespace(),
        line: line_no,
        byte_offset,
    };
    let lemma = f.next("lemma")?.to_string();
    let (entry_pos, _) = f.pos()?;
    if entry_pos != pos {
        return Err(f.err(format!("entry for {lemma:?} has the wrong part of speech")));
    }
    let synset_cnt: usize = f.dec("synset_cnt")?;
    let p_cnt: usize = f.dec("p_cnt")?;
    let mut pointers = Vec::with_capacity(p_cnt);
    for _ in 0..p_cnt {
        pointers.push(f.next("pointer symbol")?.to_string());
    }
    let sense_cnt: usize = f.dec("sense_cnt")?;
    if sense_cnt != synset_cnt {
        return Err(f.err(format!("sense_cnt {sense_cnt} differs from synset_cnt {synset_cnt}")));
    }
    let tagsense_cnt: u32 = f.dec("tagsense_cnt")?;
    let mut offsets = Vec::with_capacity(synset_cnt);
    for _ in 0..synset_cnt {
        offsets.push(f.dec("synset offset")?);
    }
    if let Some(extra) = f.inner.next() {
        return Err(f.err(format!("unexpected trailing field {extra:?}")));
    }
    Ok(IndexEntry {
        lemma,
        pos,
        pointers,
        tagsense_cnt,
        offsets,
    })
}

pub fn parse_index_file(content: &[u8], pos: PartOfSpeech) -> Result<Vec<IndexEntry>, WordnetError> {
    let file = format!("index.{}", pos.file_suffix());
    let text = decode_utf8(content, &file)?;
    body_lines(text)
        .map(|(line_no, byte_offset, line)| {
            parse_index_line(line, line_no, byte_offset, pos).map_err(|source| WordnetError::Parse {
                file: file.clone(),
                source,
            })
        })
        .collect()
}

pub fn write_index_line(e: &IndexEntry) -> String {
    let mut out = String::new();
    let _ = write!(out, "{} {} {} {}", e.lemma, e.pos.letter(), e.offsets.len(), e.pointers.len());
    for p in &e.pointers {
        let _ = write!(out, " {p}");
    }
    let _ = write!(out, " {} {}", e.offsets.len(), e.tagsense_cnt);
    for o in &e.offsets {
        let _ = write!(out, " {o:08}");
    }
    out.push_str("  ");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "  1 This software and database is being provided to you, the LICENSEE, by  \n  2 Princeton University under the following license.  \n";

    #[test]
    fn parses_instance_line() {
        let body = format!(
            "{HEADER}09478678 15 n 01 White_Nile 0 001 @i 09411430 n 0000 | the part of the Nile between Lake Albert and Khartoum  \n09411430 17 n 01 river 0 001 ~i 09478678 n 0000 | a large natural stream of water  \n"
        );
        let synsets = parse_data_file(body.as_bytes(), PartOfSpeech::Noun).unwrap();
        assert_eq!(synsets.len(), 2);
        let nile = &synsets[0];
        assert_eq!(nile.id.to_string(), "09478678-n");
        assert_eq!(nile.lemma_words().collect::<Vec<_>>(), ["White_Nile"]);
        assert_eq!(nile.gloss, "the part of the Nile between Lake Albert and Khartoum");
        assert_eq!(nile.relations[0].kind, RelationKind::InstanceHypernym);
    }

    #[test]
    fn header_only_is_empty() {
        assert!(parse_data_file(HEADER.as_bytes(), PartOfSpeech::Noun).unwrap().is_empty());
        assert!(parse_data_file(b"", PartOfSpeech::Verb).unwrap().is_empty());
    }

    #[test]
    fn malformed_line_reports_position() {
        let body = format!("{HEADER}00001740 03 n 01 entity 0 000 | fine  \n00001930 03 n zz thing 0 000 | broken\n");
        match parse_data_file(body.as_bytes(), PartOfSpeech::Noun) {
            Err(WordnetError::Parse { source, .. }) => {
                assert_eq!(source.line, 4);
                assert_eq!(source.byte_offset, HEADER.len() + "00001740 03 n 01 entity 0 000 | fine  \n".len());
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn dangling_targets_are_all_listed() {
        let body = "00001740 03 n 01 entity 0 002 ~ 00000011 n 0000 ~ 00000012 n 0000 | root  \n";
        match parse_data_file(body.as_bytes(), PartOfSpeech::Noun) {
            Err(WordnetError::Link { unresolved }) => {
                let targets: Vec<String> = unresolved.iter().map(|(_, t)| t.to_string()).collect();
                assert_eq!(targets, ["00000011-n", "00000012-n"]);
            }
            other => panic!("expected link error, got {other:?}"),
        }
    }

    #[test]
    fn verb_frames_and_adjective_markers() {
        let verb = "00469382 30 v 02 wear 1 wear_down 0 000 02 + 01 00 + 08 01 | deteriorate through use or stress  \n";
        let s = &parse_data_file(verb.as_bytes(), PartOfSpeech::Verb).unwrap()[0];
        assert_eq!(s.frames, vec![VerbFrame { frame: 1, word: 0 }, VerbFrame { frame: 8, word: 1 }]);
        assert_eq!(s.lemmas[0].lex_id, 1);
        assert_eq!(write_data_line(s).trim_end(), verb.trim_end());

        let adj = "01530581 00 s 01 galore(ip) 0 000 | existing in abundance  \n";
        let s = &parse_data_file(adj.as_bytes(), PartOfSpeech::Adj).unwrap()[0];
        assert!(s.satellite);
        assert_eq!(s.lemmas[0].word, "galore");
        assert_eq!(s.lemmas[0].marker.as_deref(), Some("ip"));
        assert_eq!(write_data_line(s).trim_end(), adj.trim_end());
    }

    #[test]
    fn wrong_file_pos_rejected() {
        let body = "00001740 03 n 01 entity 0 000 | root  \n";
        assert!(parse_data_file(body.as_bytes(), PartOfSpeech::Verb).is_err());
    }

    #[test]
    fn rejects_non_utf8() {
        let bytes = b"00001740 03 n 01 \xff 0 000 | root\n";
        assert!(matches!(
            parse_data_file(bytes, PartOfSpeech::Noun),
            Err(WordnetError::Encoding { .. })
        ));
    }

    #[test]
    fn index_line_roundtrip() {
        let line = "white_nile n 1 1 @i 1 0 09478678  ";
        let e = &parse_index_file(line.as_bytes(), PartOfSpeech::Noun).unwrap()[0];
        assert_eq!(e.lemma, "white_nile");
        assert_eq!(e.offsets, vec![9478678]);
        assert_eq!(write_index_line(e), line);
    }
}
