//! The YAML-flavored format: `- ` list items indented one tab per depth
//! level, fields in the fixed order id, subs, pairs, no space after colons.

use std::sync::LazyLock;

use regex::Regex;

use crate::error::{Error, Result};
use crate::tree::StructNode;

/// Render a node and everything below it. As with the object format, every
/// node needs at least one pair.
pub fn render_yaml(root: &StructNode) -> Result<String> {
    let mut lines = Vec::new();
    fn walk(n: &StructNode, level: usize, lines: &mut Vec<String>) -> Result<()> {
        if n.pairs.is_empty() {
            return Err(Error::NotGenerable(format!(
                "node {:?} has no pairs, the list format requires one",
                n.id
            )));
        }
        let tabs = "\t".repeat(level);
        if level == 0 {
            lines.push(format!("id:{}", n.id));
        } else {
            lines.push(format!("{tabs}- id:{}", n.id));
        }
        if n.children.is_empty() {
            lines.push(format!("{tabs}subs:[]"));
        } else {
            lines.push(format!("{tabs}subs:"));
            for c in &n.children {
                walk(c, level + 1, lines)?;
            }
        }
        for (k, v) in &n.pairs {
            lines.push(format!("{tabs}{k}:{v}"));
        }
        Ok(())
    }
    walk(root, 0, &mut lines)?;
    Ok(lines.join("\n"))
}

static YAML_ID: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(- )?id:([a-z]+)$").unwrap());
static YAML_PAIR: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^([A-Z]+):([a-z]+)$").unwrap());

/// Parse a rendered list document back into a tree.
pub fn parse_yaml(text: &str) -> Result<StructNode> {
    struct Frame {
        node: StructNode,
        level: usize,
        // subs handling: None until seen, Some(true) for an open child list,
        // Some(false) for the empty list.
        subs_open: Option<bool>,
    }

    let mut stack: Vec<Frame> = Vec::new();

    fn close_down_to(stack: &mut Vec<Frame>, level: usize, line: usize) -> Result<()> {
        while stack.len() > level + 1 {
            let done = stack.pop().expect("stack is non-empty");
            if done.node.pairs.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: format!("node {:?} ended without pairs", done.node.id),
                });
            }
            if done.subs_open.is_none() {
                return Err(Error::Parse {
                    line,
                    message: format!("node {:?} ended without a subs field", done.node.id),
                });
            }
            if done.subs_open == Some(true) && done.node.children.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: format!("node {:?} opened subs but listed none", done.node.id),
                });
            }
            stack.last_mut().expect("parent frame").node.children.push(done.node);
        }
        Ok(())
    }

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let tabs = raw.bytes().take_while(|&b| b == b'\t').count();
        let rest = &raw[tabs..];
        if rest.starts_with('\t') || rest.is_empty() {
            return Err(Error::Parse { line: line_no, message: "blank or misindented line".into() });
        }

        if let Some(caps) = YAML_ID.captures(rest) {
            let dashed = caps.get(1).is_some();
            let id = caps[2].to_string();
            let node = StructNode { id, pairs: Vec::new(), children: Vec::new() };
            if !dashed {
                if tabs != 0 || !stack.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "bare id line is only valid at the document root".into(),
                    });
                }
                stack.push(Frame { node, level: 0, subs_open: None });
            } else {
                if tabs == 0 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "list item at root level".into(),
                    });
                }
                close_down_to(&mut stack, tabs - 1, line_no)?;
                let parent = stack.last().ok_or(Error::Parse {
                    line: line_no,
                    message: "list item before the root line".into(),
                })?;
                if parent.level != tabs - 1 || parent.subs_open != Some(true) {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "list item does not match an open subs field".into(),
                    });
                }
                stack.push(Frame { node, level: tabs, subs_open: None });
            }
            continue;
        }

        // Field lines attach to the frame at exactly this level.
        close_down_to(&mut stack, tabs, line_no)?;
        let frame = stack.last_mut().ok_or(Error::Parse {
            line: line_no,
            message: "field line before the root line".into(),
        })?;
        if frame.level != tabs {
            return Err(Error::Parse { line: line_no, message: "misindented field line".into() });
        }

        if rest == "subs:" || rest == "subs:[]" {
            if frame.subs_open.is_some() {
                return Err(Error::Parse { line: line_no, message: "second subs field".into() });
            }
            if !frame.node.pairs.is_empty() {
                return Err(Error::Parse { line: line_no, message: "subs after pairs".into() });
            }
            frame.subs_open = Some(rest == "subs:");
        } else if let Some(caps) = YAML_PAIR.captures(rest) {
            if frame.subs_open.is_none() {
                return Err(Error::Parse { line: line_no, message: "pair before subs".into() });
            }
            if frame.subs_open == Some(true) && frame.node.children.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "open subs field with no list items".into(),
                });
            }
            frame.node.pairs.push((caps[1].to_string(), caps[2].to_string()));
        } else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("unrecognized line {raw:?}"),
            });
        }
    }

    close_down_to(&mut stack, 0, text.lines().count())?;
    let root = stack.pop().ok_or(Error::Parse { line: 1, message: "empty document".into() })?;
    if root.node.pairs.is_empty() {
        return Err(Error::Parse { line: 1, message: "root has no pairs".into() });
    }
    if root.subs_open.is_none() {
        return Err(Error::Parse { line: 1, message: "root has no subs field".into() });
    }
    if root.subs_open == Some(true) && root.node.children.is_empty() {
        return Err(Error::Parse { line: 1, message: "root opened subs but listed none".into() });
    }
    Ok(root.node)
}
