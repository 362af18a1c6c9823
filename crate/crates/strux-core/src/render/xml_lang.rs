//! The XML format: a declaration line, uppercase tags carrying the node
//! pairs as attributes, children before content, one tab per depth level.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;

use crate::error::{Error, Result};
use crate::tree::{preorder, StructNode};

/// Fixed first line of every document.
pub const XML_DECLARATION: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>";

/// Bijective base-26 suffix: 0 is empty, then A..Z, AA..
fn suffix(mut n: usize) -> String {
    let mut out = Vec::new();
    while n > 0 {
        n -= 1;
        out.push(b'A' + (n % 26) as u8);
        n /= 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

/// Tag names per node id. A node is tagged with its first pair key; ties are
/// broken in preorder by appending A, B, .. so tags are unique document-wide.
pub fn xml_tags(root: &StructNode) -> Result<BTreeMap<String, String>> {
    let mut used = std::collections::HashSet::new();
    let mut tags = BTreeMap::new();
    for n in preorder(root) {
        let Some((base, _)) = n.pairs.first() else {
            return Err(Error::NotGenerable(format!(
                "node {:?} has no pairs, the tag format requires one",
                n.id
            )));
        };
        let mut i = 0;
        let tag = loop {
            let candidate = format!("{base}{}", suffix(i));
            if used.insert(candidate.clone()) {
                break candidate;
            }
            i += 1;
        };
        tags.insert(n.id.clone(), tag);
    }
    Ok(tags)
}

/// Append the element lines for one node at the given depth: open tag with
/// attributes, child blocks, content line, close tag.
pub(crate) fn block_lines(
    n: &StructNode,
    depth: usize,
    tags: &BTreeMap<String, String>,
    lines: &mut Vec<String>,
) {
    let tabs = "\t".repeat(depth);
    let attrs: String =
        n.pairs.iter().map(|(k, v)| format!(" {k}=\"{v}\"")).collect::<Vec<_>>().concat();
    lines.push(format!("{tabs}<{}{attrs}>", tags[&n.id]));
    for c in &n.children {
        block_lines(c, depth + 1, tags, lines);
    }
    lines.push(format!("{tabs}{}", n.id));
    lines.push(format!("{tabs}</{}>", tags[&n.id]));
}

/// Render the tree as an XML document.
pub fn render_xml(root: &StructNode) -> Result<String> {
    let tags = xml_tags(root)?;
    let mut lines = vec![XML_DECLARATION.to_string()];
    block_lines(root, 0, &tags, &mut lines);
    Ok(lines.join("\n"))
}

static OPEN_TAG: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"^\t*<([A-Z]+)((?: [A-Z]+="[a-z]+")*)>$"#).unwrap());
static ATTR: LazyLock<Regex> = LazyLock::new(|| Regex::new(r#"([A-Z]+)="([a-z]+)""#).unwrap());
static CLOSE_TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\t*</([A-Z]+)>$").unwrap());
static CONTENT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[\t ]*([a-z]+)?[\t ]*$").unwrap());

/// Parse a rendered XML document back into a tree. Strict: tags must nest,
/// children must precede the content line, every element carries exactly one
/// content token which becomes the node id.
pub fn parse_xml(text: &str) -> Result<StructNode> {
    struct Frame {
        pairs: Vec<(String, String)>,
        children: Vec<StructNode>,
        tag: String,
        content: Vec<String>,
    }

    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first == XML_DECLARATION => {}
        _ => {
            return Err(Error::Parse { line: 1, message: "missing declaration line".into() });
        }
    }

    let mut stack: Vec<Frame> = Vec::new();
    let mut root: Option<StructNode> = None;
    for (i, line) in lines {
        let line_no = i + 1;
        if root.is_some() {
            return Err(Error::Parse { line: line_no, message: "content after root close".into() });
        }
        if let Some(caps) = OPEN_TAG.captures(line) {
            if let Some(top) = stack.last() {
                if !top.content.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "child element after content".into(),
                    });
                }
            }
            let pairs = ATTR
                .captures_iter(caps.get(2).map_or("", |m| m.as_str()))
                .map(|a| (a[1].to_string(), a[2].to_string()))
                .collect();
            stack.push(Frame {
                pairs,
                children: Vec::new(),
                tag: caps[1].to_string(),
                content: Vec::new(),
            });
        } else if let Some(caps) = CLOSE_TAG.captures(line) {
            let frame = stack.pop().ok_or(Error::Parse {
                line: line_no,
                message: "close tag without open tag".into(),
            })?;
            if frame.tag != &caps[1] {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("close tag {} does not match open tag {}", &caps[1], frame.tag),
                });
            }
            if frame.content.len() != 1 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "element {} carries {} content tokens, expected 1",
                        frame.tag,
                        frame.content.len()
                    ),
                });
            }
            let node = StructNode {
                id: frame.content.into_iter().next().expect("checked length"),
                pairs: frame.pairs,
                children: frame.children,
            };
            match stack.last_mut() {
                Some(parent) => parent.children.push(node),
                None => root = Some(node),
            }
        } else if let Some(caps) = CONTENT.captures(line) {
            let top = stack.last_mut().ok_or(Error::Parse {
                line: line_no,
                message: "content outside any element".into(),
            })?;
            if let Some(tok) = caps.get(1) {
                top.content.push(tok.as_str().to_string());
            }
        } else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("unrecognized line {line:?}"),
            });
        }
    }
    if !stack.is_empty() {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: format!("unclosed element {}", stack.last().expect("non-empty").tag),
        });
    }
    root.ok_or(Error::Parse { line: 1, message: "no root element".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::node;

    #[test]
    fn leaf_shape_is_exact() {
        let t = node("x", &[("KEY", "val"), ("OTHER", "w")], vec![]);
        assert_eq!(
            render_xml(&t).unwrap(),
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<KEY KEY=\"val\" OTHER=\"w\">\nx\n</KEY>"
        );
    }

    #[test]
    fn nested_shape_is_exact() {
        let t = node("root", &[("AB", "cd")], vec![node("kid", &[("EF", "gh")], vec![])]);
        let expected = concat!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
            "<AB AB=\"cd\">\n\t<EF EF=\"gh\">\n\tkid\n\t</EF>\nroot\n</AB>"
        );
        assert_eq!(render_xml(&t).unwrap(), expected);
    }

    #[test]
    fn colliding_tags_get_suffixes() {
        let t = node(
            "root",
            &[("K", "a")],
            vec![node("one", &[("K", "b")], vec![]), node("two", &[("K", "c")], vec![])],
        );
        let tags = xml_tags(&t).unwrap();
        assert_eq!(tags["root"], "K");
        assert_eq!(tags["one"], "KA");
        assert_eq!(tags["two"], "KB");
    }

    #[test]
    fn suffix_sequence_is_bijective_base26() {
        assert_eq!(suffix(0), "");
        assert_eq!(suffix(1), "A");
        assert_eq!(suffix(26), "Z");
        assert_eq!(suffix(27), "AA");
        assert_eq!(suffix(52), "AZ");
        assert_eq!(suffix(53), "BA");
    }

    #[test]
    fn round_trip_nested() {
        let t = node(
            "root",
            &[("A", "b"), ("C", "d")],
            vec![
                node("one", &[("A", "x")], vec![node("deep", &[("Q", "r")], vec![])]),
                node("two", &[("A", "y")], vec![]),
            ],
        );
        let text = render_xml(&t).unwrap();
        assert_eq!(parse_xml(&text).unwrap(), t);
    }

    #[test]
    fn pairless_node_is_inexpressible() {
        assert!(matches!(render_xml(&node("x", &[], vec![])), Err(Error::NotGenerable(_))));
    }

    #[test]
    fn parse_rejects_malformed_documents() {
        let decl = XML_DECLARATION;
        assert!(parse_xml("").is_err(), "empty");
        assert!(parse_xml("<A X=\"y\">\na\n</A>").is_err(), "missing declaration");
        assert!(parse_xml(&format!("{decl}\n<A X=\"y\">\na\n</B>")).is_err(), "tag mismatch");
        assert!(parse_xml(&format!("{decl}\n<A X=\"y\">\na")).is_err(), "unclosed element");
        assert!(parse_xml(&format!("{decl}\n<A X=\"y\">\n</A>")).is_err(), "no content token");
        assert!(
            parse_xml(&format!("{decl}\n<A X=\"y\">\na\nb\n</A>")).is_err(),
            "two content tokens"
        );
        assert!(
            parse_xml(&format!("{decl}\n<A X=\"y\">\na\n</A>\n<B Z=\"w\">\nb\n</B>")).is_err(),
            "second root"
        );
        assert!(
            parse_xml(&format!("{decl}\n<A X=\"y\">\na\n<B Z=\"w\">\nb\n</B>\n</A>")).is_err(),
            "child after content"
        );
        assert!(parse_xml(&format!("{decl}\n<a x=\"y\">\na\n</a>")).is_err(), "lowercase tag");
    }
}
