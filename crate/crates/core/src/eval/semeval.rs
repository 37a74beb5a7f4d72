//! Importer for lexical-sample WSD data laid out as `<lexelt>` /
//! `<instance>` / `<context>` XML with a `<head>` target, plus a key file of
//! `lexelt instance-id sense-id` lines.

use std::collections::HashMap;

use regex::Regex;

use super::wsd::WsdInstance;
use super::EvalError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Imported {
    pub instances: Vec<WsdInstance>,
    /// Instance ids with no key entry; they are not imported.
    pub unkeyed: Vec<String>,
}

/// Parses the key file into instance id → first listed sense.
pub fn parse_key(text: &str) -> Result<HashMap<String, String>, EvalError> {
    let mut keys = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let cols: Vec<&str> = line.split_whitespace().collect();
        match cols.len() {
            0 => {}
            1 | 2 => {
                return Err(EvalError::Parse {
                    line: i + 1,
                    message: "expected lexelt instance-id sense-id".into(),
                })
            }
            _ => {
                keys.entry(cols[1].to_string()).or_insert_with(|| cols[2].to_string());
            }
        }
    }
    Ok(keys)
}

fn unescape(s: &str) -> String {
    s.replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&apos;", "'")
        .replace("&amp;", "&")
}

fn strip_tags(s: &str, tag: &Regex) -> String {
    unescape(&tag.replace_all(s, "")).chars().filter(|c| !c.is_whitespace()).collect()
}

pub fn import(xml: &str, key: &str) -> Result<Imported, EvalError> {
    let keys = parse_key(key)?;
    let lexelt = Regex::new(r#"(?s)<lexelt\b[^>]*\bitem\s*=\s*"([^"]*)"[^>]*>(.*?)</lexelt>"#).expect("valid regex");
    let instance = Regex::new(r#"(?s)<instance\b[^>]*\bid\s*=\s*"([^"]*)"[^>]*>(.*?)</instance>"#).expect("valid regex");
    let context = Regex::new(r"(?s)<context\b[^>]*>(.*?)</context>").expect("valid regex");
    let head = Regex::new(r"(?s)<head\b[^>]*>(.*?)</head>").expect("valid regex");
    let tag = Regex::new(r"<[^>]*>").expect("valid regex");

    let mut out = Imported {
        instances: Vec::new(),
        unkeyed: Vec::new(),
    };
    for lx in lexelt.captures_iter(xml) {
        let item = unescape(&lx[1]);
        for inst in instance.captures_iter(&lx[2]) {
            let id = unescape(&inst[1]);
            let ctx = context
                .captures(&inst[2])
                .ok_or_else(|| EvalError::Invalid(format!("instance {id} has no <context>")))?;
            let body = &ctx[1];
            let h = head
                .captures(body)
                .ok_or_else(|| EvalError::Invalid(format!("instance {id} has no <head>")))?;
            let whole = h.get(0).expect("match");
            let before = strip_tags(&body[..whole.start()], &tag);
            let target = strip_tags(&h[1], &tag);
            let after = strip_tags(&body[whole.end()..], &tag);
            if target.is_empty() {
                return Err(EvalError::Invalid(format!("instance {id} has an empty <head>")));
            }
            let Some(gold) = keys.get(&id) else {
                out.unkeyed.push(id);
                continue;
            };
            let start = before.chars().count();
            out.instances.push(WsdInstance {
                id,
                sentence: format!("{before}{target}{after}"),
                span: (start, start + target.chars().count()),
                target,
                word_type: item.clone(),
                gold: gold.clone(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const XML: &str = r#"<corpus lang="chinese">
<lexelt item="队伍" pos="n">
<instance id="队伍.1" docsrc="x">
<answer instance="队伍.1" senseid="s1"/>
<context>
人们 排起 长长的 <head>队伍</head> 。
</context>
</instance>
<instance id="队伍.2">
<context>他 参加 了 <head>队伍</head> &amp; 训练</context>
</instance>
</lexelt>
</corpus>"#;

    #[test]
    fn imports_keyed_instances() {
        let got = import(XML, "队伍 队伍.1 s2 s3\n").unwrap();
        assert_eq!(got.instances.len(), 1);
        let i = &got.instances[0];
        assert_eq!(i.sentence, "人们排起长长的队伍。");
        assert_eq!(i.span, (7, 9));
        assert_eq!(i.gold, "s2");
        assert_eq!(i.word_type, "队伍");
        i.validate().unwrap();
        assert_eq!(got.unkeyed, ["队伍.2"]);

        let both = import(XML, "队伍 队伍.1 s1\n队伍 队伍.2 s1\n").unwrap();
        assert_eq!(both.instances[1].sentence, "他参加了队伍&训练");
    }

    #[test]
    fn rejects_broken_input() {
        assert!(parse_key("only two\n").is_err());
        let no_head = r#"<lexelt item="a"><instance id="1"><context>abc</context></instance></lexelt>"#;
        assert!(import(no_head, "a 1 s\n").is_err());
    }
}
