//! Grammar validators: the line grammars compiled to checkers, independent
//! of the renderers and parsers. `validate(text, lang)` answers one question
//! only: does this text conform to the language's surface grammar.

use std::sync::LazyLock;

use regex::Regex;

use super::{Language, XML_DECLARATION};
use crate::error::{Error, Result};

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::Grammar { line, message: message.into() }
}

/// Validate a rendered reference document against its language grammar.
pub fn validate(text: &str, lang: Language) -> Result<()> {
    match lang {
        Language::Tree => validate_tree(text),
        Language::Tabular => validate_tabular(text),
        Language::Json => validate_json(text),
        Language::Yaml => validate_yaml(text),
        Language::Xml => validate_xml(text),
        Language::Markdown | Language::Latex | Language::Org => validate_markup(text, lang),
    }
}

static EDGE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[a-z]+->[a-z]+$").unwrap());

fn validate_tree(text: &str) -> Result<()> {
    let mut count = 0;
    for (i, line) in text.lines().enumerate() {
        if !EDGE.is_match(line) {
            return Err(bad(i + 1, format!("not an edge line: {line:?}")));
        }
        count += 1;
    }
    if count == 0 {
        return Err(bad(1, "edge list needs at least one edge"));
    }
    Ok(())
}

static HEADLINE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[A-Z][a-z]*(,[A-Z][a-z]*)*$").unwrap());
static SUBLINE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[A-Za-z0-9]+(,[A-Za-z0-9]+)*$").unwrap());

fn validate_tabular(text: &str) -> Result<()> {
    let blocks: Vec<&str> = text.split("\n\n").collect();
    if blocks.len() > 2 {
        return Err(bad(1, format!("expected at most 2 tables, found {}", blocks.len())));
    }
    let mut line_no = 1;
    for block in blocks {
        let mut lines = block.lines();
        match lines.next() {
            Some(h) if HEADLINE.is_match(h) => {}
            other => return Err(bad(line_no, format!("not a header line: {other:?}"))),
        }
        line_no += 1;
        let mut rows = 0;
        for line in lines {
            if !SUBLINE.is_match(line) {
                return Err(bad(line_no, format!("not a data line: {line:?}")));
            }
            rows += 1;
            line_no += 1;
        }
        if rows == 0 {
            return Err(bad(line_no, "table needs at least one data row"));
        }
        line_no += 1;
    }
    Ok(())
}

static J_ID: LazyLock<Regex> = LazyLock::new(|| Regex::new(r#"^"id":"[a-z]+",$"#).unwrap());
static J_PAIR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"^"[A-Z]+":"[a-z]+"(,?)$"#).unwrap());

fn validate_json(text: &str) -> Result<()> {
    #[derive(Debug, PartialEq)]
    enum Expect {
        Open,
        Id,
        Subs,
        Pairs,
        End,
    }
    let mut expect = Expect::Open;
    let mut depth = 0usize;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        match expect {
            Expect::Open => {
                if line != "{" {
                    return Err(bad(n, format!("expected `{{`, found {line:?}")));
                }
                depth += 1;
                expect = Expect::Id;
            }
            Expect::Id => {
                if !J_ID.is_match(line) {
                    return Err(bad(n, format!("expected id field, found {line:?}")));
                }
                expect = Expect::Subs;
            }
            Expect::Subs => match line {
                "\"subs\":[]," => expect = Expect::Pairs,
                "\"subs\":[{" => {
                    depth += 1;
                    expect = Expect::Id;
                }
                _ => return Err(bad(n, format!("expected subs field, found {line:?}"))),
            },
            Expect::Pairs => {
                if let Some(caps) = J_PAIR.captures(line) {
                    if &caps[1] == "" {
                        expect = Expect::End;
                    }
                } else {
                    return Err(bad(n, format!("expected key/value field, found {line:?}")));
                }
            }
            Expect::End => {
                if depth == 0 {
                    return Err(bad(n, "content after document end"));
                }
                match line {
                    "}" => {
                        depth -= 1;
                        if depth != 0 {
                            return Err(bad(n, "bare close inside a list"));
                        }
                        // Stay in End; any further line errors above.
                    }
                    "}," => {
                        depth -= 1;
                        if depth == 0 {
                            return Err(bad(n, "sibling close at document level"));
                        }
                        expect = Expect::Open;
                    }
                    "}]," => {
                        depth -= 1;
                        if depth == 0 {
                            return Err(bad(n, "list close at document level"));
                        }
                        expect = Expect::Pairs;
                    }
                    _ => return Err(bad(n, format!("expected object close, found {line:?}"))),
                }
            }
        }
    }
    if expect != Expect::End || depth != 0 {
        return Err(bad(text.lines().count().max(1), "document ended early"));
    }
    Ok(())
}

static Y_DASH_ID: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^- id:[a-z]+$").unwrap());
static Y_ROOT_ID: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^id:[a-z]+$").unwrap());
static Y_PAIR: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[A-Z]+:[a-z]+$").unwrap());

fn validate_yaml(text: &str) -> Result<()> {
    // Stage of the innermost open node.
    #[derive(Debug, Clone, Copy, PartialEq)]
    enum Stage {
        AfterId,
        WantChild,
        HasChild,
        Pairs(u32),
    }
    struct Frame {
        level: usize,
        stage: Stage,
    }
    fn finish(f: &Frame, line: usize) -> Result<()> {
        match f.stage {
            Stage::Pairs(n) if n > 0 => Ok(()),
            _ => Err(bad(line, "node ended before subs and pairs were complete")),
        }
    }

    let mut stack: Vec<Frame> = Vec::new();
    let mut total = 0;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        total = n;
        let tabs = raw.bytes().take_while(|&b| b == b'\t').count();
        let rest = &raw[tabs..];

        if Y_ROOT_ID.is_match(rest) {
            if n != 1 || tabs != 0 {
                return Err(bad(n, "bare id line only opens the document"));
            }
            stack.push(Frame { level: 0, stage: Stage::AfterId });
        } else if Y_DASH_ID.is_match(rest) {
            if tabs == 0 {
                return Err(bad(n, "list item at the root level"));
            }
            while stack.last().is_some_and(|f| f.level > tabs - 1) {
                finish(&stack.pop().expect("checked"), n)?;
            }
            let parent = stack.last_mut().ok_or_else(|| bad(n, "list item before the root"))?;
            if parent.level != tabs - 1 {
                return Err(bad(n, "list item skips a level"));
            }
            match parent.stage {
                Stage::WantChild | Stage::HasChild => parent.stage = Stage::HasChild,
                _ => return Err(bad(n, "list item outside an open subs field")),
            }
            stack.push(Frame { level: tabs, stage: Stage::AfterId });
        } else if rest == "subs:" || rest == "subs:[]" {
            while stack.last().is_some_and(|f| f.level > tabs) {
                finish(&stack.pop().expect("checked"), n)?;
            }
            let frame = stack.last_mut().ok_or_else(|| bad(n, "field before the root"))?;
            if frame.level != tabs || frame.stage != Stage::AfterId {
                return Err(bad(n, "subs field out of place"));
            }
            frame.stage = if rest == "subs:" { Stage::WantChild } else { Stage::Pairs(0) };
        } else if Y_PAIR.is_match(rest) {
            while stack.last().is_some_and(|f| f.level > tabs) {
                finish(&stack.pop().expect("checked"), n)?;
            }
            let frame = stack.last_mut().ok_or_else(|| bad(n, "field before the root"))?;
            if frame.level != tabs {
                return Err(bad(n, "misindented pair line"));
            }
            frame.stage = match frame.stage {
                Stage::HasChild => Stage::Pairs(1),
                Stage::Pairs(k) => Stage::Pairs(k + 1),
                Stage::WantChild => return Err(bad(n, "open subs field with no items")),
                Stage::AfterId => return Err(bad(n, "pair before the subs field")),
            };
        } else {
            return Err(bad(n, format!("unrecognized line {raw:?}")));
        }
    }
    if stack.is_empty() {
        return Err(bad(1, "empty document"));
    }
    while let Some(f) = stack.pop() {
        finish(&f, total)?;
    }
    Ok(())
}

static X_OPEN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"^(\t*)<([A-Z]+)( [A-Z]+="[a-z]+")+>$"#).unwrap());
static X_CLOSE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(\t*)</([A-Z]+)>$").unwrap());
static X_CONTENT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[a-z \t]*$").unwrap());

fn validate_xml(text: &str) -> Result<()> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first == XML_DECLARATION => {}
        _ => return Err(bad(1, "missing declaration line")),
    }
    struct Frame {
        tag: String,
        content_seen: bool,
    }
    let mut stack: Vec<Frame> = Vec::new();
    let mut closed_root = false;
    for (i, line) in lines {
        let n = i + 1;
        if closed_root {
            return Err(bad(n, "content after the root element closed"));
        }
        if let Some(caps) = X_OPEN.captures(line) {
            if caps[1].len() != stack.len() {
                return Err(bad(n, "open tag indented off its depth"));
            }
            if stack.last().is_some_and(|f| f.content_seen) {
                return Err(bad(n, "child element after content"));
            }
            stack.push(Frame { tag: caps[2].to_string(), content_seen: false });
        } else if let Some(caps) = X_CLOSE.captures(line) {
            let frame = stack.pop().ok_or_else(|| bad(n, "close tag without open tag"))?;
            if caps[1].len() != stack.len() {
                return Err(bad(n, "close tag indented off its depth"));
            }
            if frame.tag != &caps[2] {
                return Err(bad(n, format!("tag {} closed by {}", frame.tag, &caps[2])));
            }
            if stack.is_empty() {
                closed_root = true;
            }
        } else if X_CONTENT.is_match(line) {
            match stack.last_mut() {
                Some(frame) => frame.content_seen = true,
                None => return Err(bad(n, "content outside any element")),
            }
        } else {
            return Err(bad(n, format!("unrecognized line {line:?}")));
        }
    }
    if !stack.is_empty() {
        return Err(bad(text.lines().count(), "unclosed element at end of document"));
    }
    if !closed_root {
        return Err(bad(1, "no root element"));
    }
    Ok(())
}

struct MarkupGrammar {
    heading: &'static LazyLock<Regex>,
    content: &'static LazyLock<Regex>,
}

static MD_HEADING: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^#{1,3} [a-z]+$").unwrap());
static MD_CONTENT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"^(?:[a-z]| |\*\*[a-z ]+\*\*|!\[alt\]\([a-z]+\.(?:png|jpg|jpeg|gif) "hover text"\))+$"#)
        .unwrap()
});
static ORG_HEADING: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\*{1,3} [a-z]+$").unwrap());
static ORG_CONTENT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(?:[a-z]| |\*[a-z ]+\*|\[\[[a-z]+\.(?:png|jpg|jpeg|gif)\]\])+$").unwrap()
});
static TEX_HEADING: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\\(?:section|subsection|subsubsection)\{[a-z]+\}$").unwrap());
static TEX_CONTENT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"^(?:[a-z]| |\\textbf\{[a-z ]+\}|\\includegraphics\[width=0\.5\\textwidth\]\{[a-z]+\.(?:png|jpg|jpeg|gif)\})+$",
    )
    .unwrap()
});

fn validate_markup(text: &str, lang: Language) -> Result<()> {
    let grammar = match lang {
        Language::Markdown => MarkupGrammar { heading: &MD_HEADING, content: &MD_CONTENT },
        Language::Org => MarkupGrammar { heading: &ORG_HEADING, content: &ORG_CONTENT },
        Language::Latex => MarkupGrammar { heading: &TEX_HEADING, content: &TEX_CONTENT },
        other => return Err(Error::UnsupportedLanguage(other)),
    };
    let lines: Vec<&str> = text.lines().collect();
    if lines.is_empty() {
        return Err(bad(1, "empty document"));
    }
    if lines.len() % 2 != 0 {
        return Err(bad(lines.len(), "heading without a content line"));
    }
    for (i, line) in lines.iter().enumerate() {
        let n = i + 1;
        if i % 2 == 0 {
            if !grammar.heading.is_match(line) {
                return Err(bad(n, format!("not a heading line: {line:?}")));
            }
        } else if !grammar.content.is_match(line) {
            return Err(bad(n, format!("not a content line: {line:?}")));
        }
    }
    Ok(())
}
