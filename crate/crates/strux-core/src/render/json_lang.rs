//! The JSON object format: fields in the fixed order id, subs, pairs, one
//! field per line, children inline in the subs list, no indentation.

use std::sync::LazyLock;

use regex::Regex;

use crate::error::{Error, Result};
use crate::tree::StructNode;

/// Render a node and everything below it. Every node needs at least one
/// key/value pair; the format has no spelling for a pairless object.
pub fn render_json(root: &StructNode) -> Result<String> {
    if root.pairs.is_empty() {
        return Err(Error::NotGenerable(format!(
            "node {:?} has no pairs, the object format requires one",
            root.id
        )));
    }
    let subs = if root.children.is_empty() {
        "[]".to_string()
    } else {
        let blocks: Result<Vec<String>> = root.children.iter().map(render_json).collect();
        format!("[{}]", blocks?.join(",\n"))
    };
    let pair_lines: Vec<String> =
        root.pairs.iter().map(|(k, v)| format!("\"{k}\":\"{v}\"")).collect();
    Ok(format!("{{\n\"id\":\"{}\",\n\"subs\":{},\n{}\n}}", root.id, subs, pair_lines.join(",\n")))
}

static ID_LINE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"^"id":"([a-z]+)",$"#).unwrap());
static PAIR_LINE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"^"([A-Z]+)":"([a-z]+)"(,?)$"#).unwrap());

/// How a node body ended: the bare root close, a sibling follows, or the
/// enclosing subs list closed.
enum Close {
    Root,
    Sibling,
    EndOfSubs,
}

struct Cursor<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self) -> Result<&'a str> {
        let line = self.lines.get(self.pos).copied().ok_or(Error::Parse {
            line: self.pos + 1,
            message: "unexpected end of document".into(),
        })?;
        self.pos += 1;
        Ok(line)
    }

    fn here(&self) -> usize {
        self.pos + 1
    }
}

/// Parse a rendered object document back into a tree.
pub fn parse_json(text: &str) -> Result<StructNode> {
    let mut cur = Cursor { lines: text.lines().collect(), pos: 0 };
    let first = cur.next()?;
    if first != "{" {
        return Err(Error::Parse { line: 1, message: format!("expected `{{`, found {first:?}") });
    }
    let (root, close) = parse_body(&mut cur)?;
    if !matches!(close, Close::Root) {
        return Err(Error::Parse { line: cur.here() - 1, message: "stray list close".into() });
    }
    if cur.pos != cur.lines.len() {
        return Err(Error::Parse { line: cur.here(), message: "trailing content".into() });
    }
    Ok(root)
}

fn parse_body(cur: &mut Cursor) -> Result<(StructNode, Close)> {
    let id_line = cur.next()?;
    let id = ID_LINE
        .captures(id_line)
        .ok_or(Error::Parse {
            line: cur.here() - 1,
            message: format!("expected id field, found {id_line:?}"),
        })?
        .get(1)
        .unwrap()
        .as_str()
        .to_string();

    let subs_line = cur.next()?;
    let mut children = Vec::new();
    if subs_line != "\"subs\":[]," {
        if subs_line != "\"subs\":[{" {
            return Err(Error::Parse {
                line: cur.here() - 1,
                message: format!("expected subs field, found {subs_line:?}"),
            });
        }
        loop {
            let (child, close) = parse_body(cur)?;
            children.push(child);
            match close {
                Close::EndOfSubs => break,
                Close::Sibling => {
                    let open = cur.next()?;
                    if open != "{" {
                        return Err(Error::Parse {
                            line: cur.here() - 1,
                            message: format!("expected `{{` for next sibling, found {open:?}"),
                        });
                    }
                }
                Close::Root => {
                    return Err(Error::Parse {
                        line: cur.here() - 1,
                        message: "object list closed without `]`".into(),
                    })
                }
            }
        }
    }

    let mut pairs = Vec::new();
    loop {
        let line = cur.next()?;
        if let Some(caps) = PAIR_LINE.captures(line) {
            pairs.push((caps[1].to_string(), caps[2].to_string()));
            if &caps[3] == "," {
                continue;
            }
            // Last pair seen; the close line follows.
            let close_line = cur.next()?;
            let close = match close_line {
                "}" => Close::Root,
                "}," => Close::Sibling,
                "}]," => Close::EndOfSubs,
                other => {
                    return Err(Error::Parse {
                        line: cur.here() - 1,
                        message: format!("expected object close, found {other:?}"),
                    })
                }
            };
            return Ok((StructNode { id, pairs, children }, close));
        }
        return Err(Error::Parse {
            line: cur.here() - 1,
            message: format!("expected key/value field, found {line:?}"),
        });
    }
}
