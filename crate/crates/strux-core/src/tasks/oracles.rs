//! Procedural oracles: one exact, total answer procedure per question type.
//! Everything here is a pure function of the document model.

use crate::error::{Error, Result};
use crate::render::{xml_tags, MarkupDoc, Section};
use crate::tabular::{Table, TableSet};
use crate::tree::{stats_of, StructNode};

/// Height of the tree: edges on the longest root-to-leaf path.
pub fn tree_height(root: &StructNode) -> u32 {
    stats_of(root).height
}

/// Depth of the named node; the root has depth 0.
pub fn node_depth(root: &StructNode, id: &str) -> Result<u32> {
    fn walk(n: &StructNode, id: &str, depth: u32) -> Option<u32> {
        if n.id == id {
            return Some(depth);
        }
        n.children.iter().find_map(|c| walk(c, id, depth + 1))
    }
    walk(root, id, 0).ok_or_else(|| Error::UnknownId(id.to_string()))
}

/// Ids on the path from the root to the named node, both ends included.
pub fn path_walk(root: &StructNode, id: &str) -> Result<Vec<String>> {
    fn walk(n: &StructNode, id: &str, trail: &mut Vec<String>) -> bool {
        trail.push(n.id.clone());
        if n.id == id {
            return true;
        }
        for c in &n.children {
            if walk(c, id, trail) {
                return true;
            }
        }
        trail.pop();
        false
    }
    let mut trail = Vec::new();
    if walk(root, id, &mut trail) {
        Ok(trail)
    } else {
        Err(Error::UnknownId(id.to_string()))
    }
}

/// The subtree rooted at the named node.
pub fn find_node<'a>(root: &'a StructNode, id: &str) -> Result<&'a StructNode> {
    fn walk<'a>(n: &'a StructNode, id: &str) -> Option<&'a StructNode> {
        if n.id == id {
            return Some(n);
        }
        n.children.iter().find_map(|c| walk(c, id))
    }
    walk(root, id).ok_or_else(|| Error::UnknownId(id.to_string()))
}

/// Id of the first child of the outermost object.
pub fn first_sub_id(root: &StructNode) -> Result<String> {
    root.children
        .first()
        .map(|c| c.id.clone())
        .ok_or_else(|| Error::NotGenerable("outermost object has an empty subs list".into()))
}

/// Every pair in the document in preorder: the child-index path from the
/// root to the owning node, the key, and the value.
pub fn value_sites(root: &StructNode) -> Vec<(Vec<usize>, String, String)> {
    let mut out = Vec::new();
    fn walk(n: &StructNode, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, String, String)>) {
        for (k, v) in &n.pairs {
            out.push((path.clone(), k.clone(), v.clone()));
        }
        for (i, c) in n.children.iter().enumerate() {
            path.push(i);
            walk(c, path, out);
            path.pop();
        }
    }
    walk(root, &mut Vec::new(), &mut out);
    out
}

/// Bracketed access path from the outermost object to the pair holding the
/// given value, e.g. `["subs"][0]["KEY"]`.
pub fn path_to_value(root: &StructNode, value: &str) -> Result<String> {
    let sites = value_sites(root);
    let (path, key, _) = sites
        .iter()
        .find(|(_, _, v)| v == value)
        .ok_or_else(|| Error::UnknownValue(value.to_string()))?;
    Ok(format_value_path(path, key))
}

pub fn format_value_path(path: &[usize], key: &str) -> String {
    let mut s = String::new();
    for i in path {
        s.push_str(&format!("[\"subs\"][{i}]"));
    }
    s.push_str(&format!("[\"{key}\"]"));
    s
}

/// Every most deeply nested object: the nodes whose subs list is empty, in
/// document order.
pub fn deepest_nodes(root: &StructNode) -> Vec<&StructNode> {
    let mut out = Vec::new();
    fn walk<'a>(n: &'a StructNode, out: &mut Vec<&'a StructNode>) {
        if n.children.is_empty() {
            out.push(n);
        }
        for c in &n.children {
            walk(c, out);
        }
    }
    walk(root, &mut out);
    out
}

/// Text between the named node's start and end tags, trimmed: its child
/// blocks followed by its own content line.
pub fn xml_inner_text(root: &StructNode, id: &str) -> Result<String> {
    let tags = xml_tags(root)?;
    fn locate<'a>(n: &'a StructNode, id: &str, depth: usize) -> Option<(&'a StructNode, usize)> {
        if n.id == id {
            return Some((n, depth));
        }
        n.children.iter().find_map(|c| locate(c, id, depth + 1))
    }
    let (node, depth) =
        locate(root, id, 0).ok_or_else(|| Error::UnknownId(id.to_string()))?;
    let mut lines = Vec::new();
    for c in &node.children {
        crate::render::xml_lang::block_lines(c, depth + 1, &tags, &mut lines);
    }
    lines.push(format!("{}{}", "\t".repeat(depth), node.id));
    Ok(lines.join("\n").trim().to_string())
}

/// Tag of the element carrying an attribute with the given value.
pub fn xml_tag_of_value(root: &StructNode, value: &str) -> Result<String> {
    let tags = xml_tags(root)?;
    fn walk<'a>(n: &'a StructNode, value: &str) -> Option<&'a StructNode> {
        if n.pairs.iter().any(|(_, v)| v == value) {
            return Some(n);
        }
        n.children.iter().find_map(|c| walk(c, value))
    }
    let node = walk(root, value).ok_or_else(|| Error::UnknownValue(value.to_string()))?;
    Ok(tags[&node.id].clone())
}

/// All bold spans in document order.
pub fn bold_texts(doc: &MarkupDoc) -> Vec<String> {
    doc.sections.iter().flat_map(|s| s.bold_spans.iter().cloned()).collect()
}

/// All image file names in document order.
pub fn image_files(doc: &MarkupDoc) -> Vec<String> {
    doc.sections.iter().flat_map(|s| s.images.iter().cloned()).collect()
}

/// Positional reference to a section: the i-th top section, then optionally
/// the j-th stage-2 section under it, then the k-th stage-3 under that.
/// All components are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectionRef {
    pub i: usize,
    pub j: Option<usize>,
    pub k: Option<usize>,
}

/// Coordinates of every section, in document order. Counters restart when a
/// shallower heading passes by, mirroring how a reader scans the file.
pub fn section_coords(doc: &MarkupDoc) -> Vec<SectionRef> {
    let mut out = Vec::with_capacity(doc.sections.len());
    let (mut c1, mut c2, mut c3) = (0usize, 0usize, 0usize);
    for s in &doc.sections {
        match s.level {
            1 => {
                c1 += 1;
                c2 = 0;
                c3 = 0;
                out.push(SectionRef { i: c1, j: None, k: None });
            }
            2 => {
                c2 += 1;
                c3 = 0;
                out.push(SectionRef { i: c1, j: Some(c2), k: None });
            }
            _ => {
                c3 += 1;
                out.push(SectionRef { i: c1, j: Some(c2), k: Some(c3) });
            }
        }
    }
    out
}

/// Resolve a positional reference back to its section.
pub fn section_by_coords(doc: &MarkupDoc, want: SectionRef) -> Result<&Section> {
    let coords = section_coords(doc);
    coords
        .iter()
        .position(|c| *c == want)
        .map(|idx| &doc.sections[idx])
        .ok_or_else(|| Error::UnknownSection(format!("{want:?}")))
}

/// Cell of the record with the given Name under the given column, searching
/// whichever table carries that column.
pub fn field_lookup(set: &TableSet, key: &str, column: &str) -> Result<String> {
    for table in &set.tables {
        let Some(col) = table.col_index(column) else { continue };
        let name_col = table
            .col_index("Name")
            .ok_or_else(|| Error::Config("table has no Name column".into()))?;
        return table
            .rows
            .iter()
            .find(|r| r[name_col] == key)
            .map(|r| r[col].clone())
            .ok_or_else(|| Error::UnknownId(key.to_string()));
    }
    Err(Error::UnknownId(format!("column {column}")))
}

/// Rows with Salary strictly greater than the threshold.
pub fn count_salary_above(table: &Table, threshold: u64) -> Result<usize> {
    let col = table
        .col_index("Salary")
        .ok_or_else(|| Error::Config("table has no Salary column".into()))?;
    let mut count = 0;
    for row in &table.rows {
        let v: u64 = row[col]
            .parse()
            .map_err(|_| Error::Config(format!("non-numeric salary {:?}", row[col])))?;
        if v > threshold {
            count += 1;
        }
    }
    Ok(count)
}

/// Rows with the given Gender.
pub fn count_gender(table: &Table, gender: &str) -> Result<usize> {
    let col = table
        .col_index("Gender")
        .ok_or_else(|| Error::Config("table has no Gender column".into()))?;
    Ok(table.rows.iter().filter(|r| r[col] == gender).count())
}

/// Join both tables on Name; count people in the given city whose Height is
/// strictly greater than the threshold.
pub fn join_count(set: &TableSet, city: &str, min_height: u64) -> Result<usize> {
    let a = set.primary();
    let b = set
        .secondary()
        .ok_or_else(|| Error::NotGenerable("join needs the second table".into()))?;
    let a_name = a.col_index("Name").ok_or_else(|| Error::Config("no Name column".into()))?;
    let a_city = a.col_index("City").ok_or_else(|| Error::Config("no City column".into()))?;
    let b_name = b.col_index("Name").ok_or_else(|| Error::Config("no Name column".into()))?;
    let b_height =
        b.col_index("Height").ok_or_else(|| Error::Config("no Height column".into()))?;
    let mut count = 0;
    for row in &a.rows {
        if row[a_city] != city {
            continue;
        }
        let height_row = b
            .rows
            .iter()
            .find(|r| r[b_name] == row[a_name])
            .ok_or_else(|| Error::UnknownId(row[a_name].clone()))?;
        let h: u64 = height_row[b_height]
            .parse()
            .map_err(|_| Error::Config(format!("non-numeric height {:?}", height_row[b_height])))?;
        if h > min_height {
            count += 1;
        }
    }
    Ok(count)
}

/// Distinct cities in first-appearance order.
pub fn cities_present(table: &Table) -> Result<Vec<String>> {
    let col = table.col_index("City").ok_or_else(|| Error::Config("no City column".into()))?;
    let mut out: Vec<String> = Vec::new();
    for row in &table.rows {
        if !out.contains(&row[col]) {
            out.push(row[col].clone());
        }
    }
    Ok(out)
}
