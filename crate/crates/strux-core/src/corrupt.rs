//! Syntax fault injection for the three checkable formats, plus the
//! checkers that locate the injected fault. The corrupted text and the
//! stored answer always come from the same checker run, so the ground truth
//! is what a careful reader of the broken document would conclude.

use std::sync::LazyLock;

use regex::Regex;

use crate::error::{Error, Result};
use crate::render::Language;
use crate::rng::DetRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntaxErrorKind {
    MissingClosingBrace,
    MissingKeyBeforeColon,
    MissingEndTag,
    #[serde(rename = "none")]
    NoError,
}

impl SyntaxErrorKind {
    /// Short phrase used in answers; the clean kind has none.
    pub fn phrase(self) -> Option<&'static str> {
        match self {
            SyntaxErrorKind::MissingClosingBrace => Some("Missing ending curly brace"),
            SyntaxErrorKind::MissingKeyBeforeColon => Some("Missing key before colon"),
            SyntaxErrorKind::MissingEndTag => Some("Missing ending tag"),
            SyntaxErrorKind::NoError => None,
        }
    }
}

/// Verdict of a syntax check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxFinding {
    pub has_error: bool,
    pub kind: SyntaxErrorKind,
    /// Line the fault is pinned to: the opening line of the unclosed
    /// construct, or the line with the missing key.
    pub locus: Option<usize>,
    pub description: String,
}

impl SyntaxFinding {
    pub fn clean() -> Self {
        Self {
            has_error: false,
            kind: SyntaxErrorKind::NoError,
            locus: None,
            description: "No error".into(),
        }
    }

    pub fn fault(kind: SyntaxErrorKind, locus: usize) -> Self {
        Self {
            has_error: true,
            kind,
            locus: Some(locus),
            description: kind.phrase().expect("fault kinds carry a phrase").into(),
        }
    }
}

/// Check a document of one of the three checkable formats.
pub fn check_syntax(text: &str, lang: Language) -> Result<SyntaxFinding> {
    match lang {
        Language::Json => Ok(check_json(text)),
        Language::Yaml => Ok(check_yaml(text)),
        Language::Xml => Ok(check_xml(text)),
        other => Err(Error::UnsupportedLanguage(other)),
    }
}

/// Brace scan. Identifiers never contain braces, so a character walk is
/// exact. An unclosed object is reported at its opening line; when a
/// deleted brace lets an outer close absorb an inner one, the outermost
/// still-open object is what a reader finds unclosed.
fn check_json(text: &str) -> SyntaxFinding {
    let mut stack: Vec<usize> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for b in line.bytes() {
            match b {
                b'{' => stack.push(i + 1),
                b'}' => {
                    if stack.pop().is_none() {
                        return SyntaxFinding::fault(
                            SyntaxErrorKind::MissingClosingBrace,
                            i + 1,
                        );
                    }
                }
                _ => {}
            }
        }
    }
    match stack.last() {
        Some(&line) => SyntaxFinding::fault(SyntaxErrorKind::MissingClosingBrace, line),
        None => SyntaxFinding::clean(),
    }
}

/// Every well-formed line carries a key before its first colon; a line whose
/// text (after indentation and an optional `- ` marker) starts with a colon
/// lost its key.
fn check_yaml(text: &str) -> SyntaxFinding {
    for (i, raw) in text.lines().enumerate() {
        let rest = raw.trim_start_matches('\t');
        let rest = rest.strip_prefix("- ").unwrap_or(rest);
        if rest.starts_with(':') {
            return SyntaxFinding::fault(SyntaxErrorKind::MissingKeyBeforeColon, i + 1);
        }
    }
    SyntaxFinding::clean()
}

static LOOSE_OPEN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"^\t*<([A-Z]+)(?: [A-Z]+="[a-z]+")*>$"#).unwrap());
static LOOSE_CLOSE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\t*</([A-Z]+)>$").unwrap());

/// Tag-stack scan; content lines are ignored. An element closed by some
/// outer tag, or still open at the end, is reported at its opening line.
fn check_xml(text: &str) -> SyntaxFinding {
    let mut stack: Vec<(usize, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(caps) = LOOSE_OPEN.captures(line) {
            stack.push((i + 1, caps[1].to_string()));
        } else if let Some(caps) = LOOSE_CLOSE.captures(line) {
            match stack.last() {
                Some((open_line, tag)) if *tag != caps[1] => {
                    return SyntaxFinding::fault(SyntaxErrorKind::MissingEndTag, *open_line);
                }
                Some(_) => {
                    stack.pop();
                }
                None => {
                    return SyntaxFinding::fault(SyntaxErrorKind::MissingEndTag, i + 1);
                }
            }
        }
    }
    match stack.last() {
        Some((open_line, _)) => SyntaxFinding::fault(SyntaxErrorKind::MissingEndTag, *open_line),
        None => SyntaxFinding::clean(),
    }
}

/// With probability `p_clean` return the text untouched; otherwise delete
/// one syntax element chosen uniformly among the eligible sites and return
/// the checker's finding for the damaged text.
pub fn corrupt(
    text: &str,
    lang: Language,
    p_clean: f64,
    rng: &mut DetRng,
) -> Result<(String, SyntaxFinding)> {
    if !matches!(lang, Language::Json | Language::Yaml | Language::Xml) {
        return Err(Error::UnsupportedLanguage(lang));
    }
    if rng.chance(p_clean) {
        let finding = check_syntax(text, lang)?;
        debug_assert!(!finding.has_error, "clean input expected");
        return Ok((text.to_string(), SyntaxFinding::clean()));
    }
    let damaged = match lang {
        Language::Json => {
            let sites: Vec<usize> =
                text.bytes().enumerate().filter(|(_, b)| *b == b'}').map(|(i, _)| i).collect();
            if sites.is_empty() {
                return Err(Error::NotCorruptible(lang));
            }
            let at = *rng.choose(&sites);
            let mut s = String::with_capacity(text.len() - 1);
            s.push_str(&text[..at]);
            s.push_str(&text[at + 1..]);
            s
        }
        Language::Yaml => {
            let lines: Vec<&str> = text.lines().collect();
            if lines.is_empty() {
                return Err(Error::NotCorruptible(lang));
            }
            let at = rng.index(lines.len());
            let out: Vec<String> = lines
                .iter()
                .enumerate()
                .map(|(i, raw)| {
                    if i != at {
                        return raw.to_string();
                    }
                    let tabs = raw.bytes().take_while(|&b| b == b'\t').count();
                    let rest = &raw[tabs..];
                    let (marker, rest) = match rest.strip_prefix("- ") {
                        Some(r) => ("- ", r),
                        None => ("", rest),
                    };
                    let colon = rest.find(':').expect("every line carries a colon");
                    format!("{}{marker}{}", &raw[..tabs], &rest[colon..])
                })
                .collect();
            out.join("\n")
        }
        Language::Xml => {
            let lines: Vec<&str> = text.lines().collect();
            let sites: Vec<usize> = lines
                .iter()
                .enumerate()
                .filter(|(_, l)| LOOSE_CLOSE.is_match(l))
                .map(|(i, _)| i)
                .collect();
            if sites.is_empty() {
                return Err(Error::NotCorruptible(lang));
            }
            let at = *rng.choose(&sites);
            lines
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != at)
                .map(|(_, l)| *l)
                .collect::<Vec<_>>()
                .join("\n")
        }
        _ => unreachable!("checked above"),
    };
    let finding = check_syntax(&damaged, lang)?;
    assert!(finding.has_error, "injected fault must be detected");
    Ok((damaged, finding))
}
