//! The edge-list format: one `parent->child` line per edge.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::tree::StructNode;

/// Render the tree as an edge list in depth-first discovery order. Pairs do
/// not appear in this format. A lone node has no edge and cannot be
/// expressed, which callers treat as a signal to redraw the document.
pub fn render_tree(root: &StructNode) -> Result<String> {
    let mut lines = Vec::new();
    fn walk(n: &StructNode, lines: &mut Vec<String>) {
        for c in &n.children {
            lines.push(format!("{}->{}", n.id, c.id));
            walk(c, lines);
        }
    }
    walk(root, &mut lines);
    if lines.is_empty() {
        return Err(Error::NotGenerable("edge list needs at least one edge".into()));
    }
    Ok(lines.join("\n"))
}

/// Parse an edge list back into a tree. The document must describe exactly
/// one rooted tree: one node without a parent, no node with two parents, no
/// cycles, everything reachable from the root.
pub fn parse_tree(text: &str) -> Result<StructNode> {
    let mut children: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut parent_of: BTreeMap<String, String> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();

    let remember = |id: &str, order: &mut Vec<String>| {
        if !order.iter().any(|x| x == id) {
            order.push(id.to_string());
        }
    };

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let Some((parent, child)) = line.split_once("->") else {
            return Err(Error::Parse { line: line_no, message: format!("not an edge: {line:?}") });
        };
        let ok = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_lowercase());
        if !ok(parent) || !ok(child) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("identifiers must be lowercase words: {line:?}"),
            });
        }
        if parent_of.contains_key(child) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("node {child:?} has two parents"),
            });
        }
        parent_of.insert(child.to_string(), parent.to_string());
        children.entry(parent.to_string()).or_default().push(child.to_string());
        children.entry(child.to_string()).or_default();
        remember(parent, &mut order);
        remember(child, &mut order);
    }
    if order.is_empty() {
        return Err(Error::Parse { line: 1, message: "empty edge list".into() });
    }

    let roots: Vec<&String> = order.iter().filter(|id| !parent_of.contains_key(*id)).collect();
    if roots.len() != 1 {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected one root, found {}", roots.len()),
        });
    }
    let root_id = roots[0].clone();

    fn build(
        id: &str,
        children: &BTreeMap<String, Vec<String>>,
        seen: &mut usize,
    ) -> StructNode {
        *seen += 1;
        StructNode {
            id: id.to_string(),
            pairs: Vec::new(),
            children: children[id].iter().map(|c| build(c, children, seen)).collect(),
        }
    }
    let mut seen = 0;
    let root = build(&root_id, &children, &mut seen);
    if seen != order.len() {
        return Err(Error::Parse {
            line: 1,
            message: "edge list is not a single connected tree".into(),
        });
    }
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::node;

    #[test]
    fn single_edge_matches_grammar_example() {
        let t = node("a", &[], vec![node("b", &[], vec![])]);
        assert_eq!(render_tree(&t).unwrap(), "a->b");
    }

    #[test]
    fn edges_come_out_in_discovery_order() {
        let t = node(
            "root",
            &[],
            vec![
                node("left", &[], vec![node("deep", &[], vec![])]),
                node("right", &[], vec![]),
            ],
        );
        assert_eq!(render_tree(&t).unwrap(), "root->left\nleft->deep\nroot->right");
    }

    #[test]
    fn lone_node_is_inexpressible() {
        let t = node("only", &[], vec![]);
        assert!(matches!(render_tree(&t), Err(Error::NotGenerable(_))));
    }

    #[test]
    fn parse_rebuilds_a_chain() {
        let parsed = parse_tree("a->b\nb->c").unwrap();
        assert_eq!(parsed, node("a", &[], vec![node("b", &[], vec![node("c", &[], vec![])])]));
    }

    #[test]
    fn round_trip_small_tree() {
        let t = node(
            "r",
            &[],
            vec![node("a", &[], vec![node("x", &[], vec![])]), node("b", &[], vec![])],
        );
        let text = render_tree(&t).unwrap();
        assert_eq!(parse_tree(&text).unwrap(), t);
    }

    #[test]
    fn parse_rejects_malformed_text() {
        assert!(parse_tree("").is_err());
        assert!(parse_tree("a-b").is_err(), "missing arrow");
        assert!(parse_tree("a->B").is_err(), "uppercase id");
        assert!(parse_tree("a->b\nc->b").is_err(), "two parents");
        assert!(parse_tree("a->b\nc->d").is_err(), "two roots");
        assert!(parse_tree("a->b\nb->a").is_err(), "cycle has no root");
        assert!(parse_tree("a->a").is_err(), "self edge");
        assert!(parse_tree("a->b\nb->c\nc->b").is_err(), "duplicate parent in cycle");
    }
}
