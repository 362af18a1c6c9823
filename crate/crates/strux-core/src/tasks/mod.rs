//! The task catalog: 29 question types over 8 formats, each backed by a
//! procedural oracle so every sample ships with an exact ground truth.

pub mod hints;
pub mod oracles;

use serde::{Deserialize, Serialize};
use std::sync::LazyLock;

use crate::corrupt::SyntaxFinding;
use crate::error::{Error, Result};
use crate::render::{render_content_line, render_structure, Language, MarkupDoc};
use crate::rng::DetRng;
use crate::tabular::{TableSet, GENDERS};
use crate::tree::{preorder, StructNode};

/// Reasoning family a task belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskCategory {
    TextRetrieval,
    PathCompose,
    PathWalk,
    Syntax,
    Statistics,
    Join,
    TreeHeight,
    NodeDepth,
}

impl TaskCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskCategory::TextRetrieval => "text_retrieval",
            TaskCategory::PathCompose => "path_compose",
            TaskCategory::PathWalk => "path_walk",
            TaskCategory::Syntax => "syntax",
            TaskCategory::Statistics => "statistics",
            TaskCategory::Join => "join",
            TaskCategory::TreeHeight => "tree_height",
            TaskCategory::NodeDepth => "node_depth",
        }
    }
}

/// Which answer procedure drives the task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    FieldLookup,
    CountSalaryAbove,
    CountGender,
    JoinCount,
    TreeHeight,
    NodeDepth,
    PathWalk,
    FindObjectById,
    FirstSubId,
    SyntaxCheck,
    PathToValue,
    DeepestObjects,
    XmlTagContent,
    XmlTagOfAttrValue,
    BoldTexts,
    SectionContent,
    ImageFiles,
}

/// One entry in the task catalog.
#[derive(Debug, Clone, Copy)]
pub struct TaskSpec {
    pub task_id: &'static str,
    pub language: Language,
    pub category: TaskCategory,
    pub oracle: OracleKind,
    pub hint: &'static str,
}

macro_rules! task {
    ($id:literal, $lang:ident, $cat:ident, $oracle:ident, $hint:path) => {
        TaskSpec {
            task_id: $id,
            language: Language::$lang,
            category: TaskCategory::$cat,
            oracle: OracleKind::$oracle,
            hint: $hint,
        }
    };
}

/// All 29 tasks, grouped by format.
pub static REGISTRY: LazyLock<Vec<TaskSpec>> = LazyLock::new(|| {
    use hints::*;
    vec![
        task!("tabular.field_lookup", Tabular, TextRetrieval, FieldLookup, TABULAR_FIELD_LOOKUP),
        task!(
            "tabular.count_salary_above",
            Tabular,
            Statistics,
            CountSalaryAbove,
            TABULAR_COUNT_SALARY_ABOVE
        ),
        task!("tabular.count_gender", Tabular, Statistics, CountGender, TABULAR_COUNT_GENDER),
        task!("tabular.join", Tabular, Join, JoinCount, TABULAR_JOIN),
        task!("tree.height", Tree, TreeHeight, TreeHeight, TREE_HEIGHT),
        task!("tree.node_depth", Tree, NodeDepth, NodeDepth, TREE_NODE_DEPTH),
        task!("tree.path_walk", Tree, PathWalk, PathWalk, TREE_PATH_WALK),
        task!(
            "json.find_object_by_id",
            Json,
            TextRetrieval,
            FindObjectById,
            JSON_FIND_OBJECT_BY_ID
        ),
        task!("json.first_sub_id", Json, TextRetrieval, FirstSubId, JSON_FIRST_SUB_ID),
        task!("json.syntax", Json, Syntax, SyntaxCheck, JSON_SYNTAX),
        task!("json.path_to_value", Json, PathCompose, PathToValue, JSON_PATH_TO_VALUE),
        task!("json.deepest_objects", Json, TextRetrieval, DeepestObjects, JSON_DEEPEST_OBJECTS),
        task!(
            "yaml.find_object_by_id",
            Yaml,
            TextRetrieval,
            FindObjectById,
            YAML_FIND_OBJECT_BY_ID
        ),
        task!("yaml.first_sub_id", Yaml, TextRetrieval, FirstSubId, YAML_FIRST_SUB_ID),
        task!("yaml.syntax", Yaml, Syntax, SyntaxCheck, YAML_SYNTAX),
        task!("yaml.path_to_value", Yaml, PathCompose, PathToValue, YAML_PATH_TO_VALUE),
        task!("yaml.deepest_objects", Yaml, TextRetrieval, DeepestObjects, YAML_DEEPEST_OBJECTS),
        task!("xml.tag_content", Xml, TextRetrieval, XmlTagContent, XML_TAG_CONTENT),
        task!(
            "xml.tag_of_attr_value",
            Xml,
            TextRetrieval,
            XmlTagOfAttrValue,
            XML_TAG_OF_ATTR_VALUE
        ),
        task!("xml.syntax", Xml, Syntax, SyntaxCheck, XML_SYNTAX),
        task!("markdown.bold_texts", Markdown, TextRetrieval, BoldTexts, MARKDOWN_BOLD_TEXTS),
        task!(
            "markdown.section_content",
            Markdown,
            TextRetrieval,
            SectionContent,
            MARKDOWN_SECTION_CONTENT
        ),
        task!("markdown.image_files", Markdown, TextRetrieval, ImageFiles, MARKDOWN_IMAGE_FILES),
        task!("latex.bold_texts", Latex, TextRetrieval, BoldTexts, LATEX_BOLD_TEXTS),
        task!(
            "latex.section_content",
            Latex,
            TextRetrieval,
            SectionContent,
            LATEX_SECTION_CONTENT
        ),
        task!("latex.image_files", Latex, TextRetrieval, ImageFiles, LATEX_IMAGE_FILES),
        task!("org.bold_texts", Org, TextRetrieval, BoldTexts, ORG_BOLD_TEXTS),
        task!("org.section_content", Org, TextRetrieval, SectionContent, ORG_SECTION_CONTENT),
        task!("org.image_files", Org, TextRetrieval, ImageFiles, ORG_IMAGE_FILES),
    ]
});

pub fn all_tasks() -> &'static [TaskSpec] {
    &REGISTRY
}

pub fn find_task(task_id: &str) -> Result<&'static TaskSpec> {
    REGISTRY
        .iter()
        .find(|t| t.task_id == task_id)
        .ok_or_else(|| Error::Config(format!("unknown task id {task_id:?}")))
}

pub fn tasks_for(language: Language) -> Vec<&'static TaskSpec> {
    REGISTRY.iter().filter(|t| t.language == language).collect()
}

/// Human-facing format label used in question prose.
pub fn format_label(lang: Language) -> &'static str {
    match lang {
        Language::Tree => "edge list",
        Language::Tabular => "CSV",
        Language::Json => "JSON",
        Language::Yaml => "YAML",
        Language::Xml => "XML",
        Language::Markdown => "Markdown",
        Language::Latex => "LaTeX",
        Language::Org => "Org",
    }
}

/// The document model a question is asked about.
#[derive(Debug, Clone)]
pub enum DocBody {
    Tree(StructNode),
    Markup(MarkupDoc),
    Tables(TableSet),
}

/// A rendered document plus its model. For syntax tasks `fault` records what
/// the corruption pass did to `reference`; the body stays the clean model.
#[derive(Debug, Clone)]
pub struct DocContext {
    pub language: Language,
    pub reference: String,
    pub body: DocBody,
    pub fault: Option<SyntaxFinding>,
}

impl DocContext {
    pub fn tree(language: Language, root: StructNode) -> Result<Self> {
        let reference = render_structure(&root, language)?;
        Ok(DocContext { language, reference, body: DocBody::Tree(root), fault: None })
    }

    pub fn tables(set: TableSet) -> Self {
        let reference = crate::tabular::render_tableset(&set);
        DocContext {
            language: Language::Tabular,
            reference,
            body: DocBody::Tables(set),
            fault: None,
        }
    }

    fn tree_body(&self) -> Result<&StructNode> {
        match &self.body {
            DocBody::Tree(t) => Ok(t),
            _ => Err(Error::Config("task needs a tree-shaped document".into())),
        }
    }

    fn tables_body(&self) -> Result<&TableSet> {
        match &self.body {
            DocBody::Tables(t) => Ok(t),
            _ => Err(Error::Config("task needs a tabular document".into())),
        }
    }

    fn markup_body(&self) -> Result<MarkupDoc> {
        match &self.body {
            DocBody::Tree(t) => Ok(crate::render::derive_markup(t)),
            DocBody::Markup(d) => Ok(d.clone()),
            _ => Err(Error::Config("task needs a markup document".into())),
        }
    }
}

/// A fully instantiated question with its ground truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Qa {
    pub question: String,
    pub requirement: String,
    pub answer: String,
    /// Alternative surface forms that also count as exact matches.
    pub answer_aliases: Vec<String>,
}

/// English ordinal: 1st, 2nd, 3rd, 4th, .., 11th, 12th, 13th, 21st, ..
pub fn ordinal(n: usize) -> String {
    let suffix = match (n % 10, n % 100) {
        (_, 11..=13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    };
    format!("{n}{suffix}")
}

const REQ_INTEGER: &str = "Answer with a single integer.";
const THRESHOLD_RETRIES: u64 = 16;

/// Instantiate a task against a document: draw question parameters from the
/// qa stream, run the oracle, assemble the canonical answer. Errors with
/// NotGenerable when the document cannot host the task, in which case the
/// caller re-rolls the whole sample under the next attempt seed.
pub fn instantiate(spec: &TaskSpec, ctx: &DocContext, rng: &mut DetRng) -> Result<Qa> {
    if ctx.fault.is_some() && spec.oracle != OracleKind::SyntaxCheck {
        return Err(Error::Config("corrupted document given to a non-syntax task".into()));
    }
    match spec.oracle {
        OracleKind::FieldLookup => field_lookup_qa(ctx, rng),
        OracleKind::CountSalaryAbove => count_salary_qa(ctx, rng),
        OracleKind::CountGender => count_gender_qa(ctx, rng),
        OracleKind::JoinCount => join_qa(ctx, rng),
        OracleKind::TreeHeight => {
            let h = oracles::tree_height(ctx.tree_body()?);
            Ok(Qa {
                question: "What is the height of the tree described by this edge list?"
                    .to_string(),
                requirement:
                    "The height is the number of edges on the longest downward path from the \
                     root; a single node has height 0. Answer with a single integer."
                        .to_string(),
                answer: h.to_string(),
                answer_aliases: vec![],
            })
        }
        OracleKind::NodeDepth => {
            let root = ctx.tree_body()?;
            let ids: Vec<&str> = preorder(root).iter().map(|n| n.id.as_str()).collect();
            let id = *rng.choose(&ids);
            let d = oracles::node_depth(root, id)?;
            Ok(Qa {
                question: format!("What is the depth of node '{id}'?"),
                requirement: "The root has depth 0. Answer with a single integer.".to_string(),
                answer: d.to_string(),
                answer_aliases: vec![],
            })
        }
        OracleKind::PathWalk => {
            let root = ctx.tree_body()?;
            let ids: Vec<&str> = preorder(root).iter().map(|n| n.id.as_str()).collect();
            let id = *rng.choose(&ids);
            let path = oracles::path_walk(root, id)?;
            Ok(Qa {
                question: format!("What is the path from the root to node '{id}'?"),
                requirement: "List the node ids from the root to the target, joined by '->', \
                              for example a->b->c."
                    .to_string(),
                answer: path.join("->"),
                answer_aliases: vec![path.join(" -> ")],
            })
        }
        OracleKind::FindObjectById => {
            let root = ctx.tree_body()?;
            let ids: Vec<&str> = preorder(root).iter().map(|n| n.id.as_str()).collect();
            let id = *rng.choose(&ids);
            let target = oracles::find_node(root, id)?;
            let answer = render_structure(target, ctx.language)?;
            Ok(Qa {
                question: format!("Find the object whose id is '{id}'."),
                requirement: "Output that object in full, including everything nested inside \
                              it, formatted as a document of its own."
                    .to_string(),
                answer,
                answer_aliases: vec![],
            })
        }
        OracleKind::FirstSubId => {
            let id = oracles::first_sub_id(ctx.tree_body()?)?;
            Ok(Qa {
                question: "What is the id of the first object in the outermost object's subs \
                           list?"
                    .to_string(),
                requirement: "Answer with the id and nothing else.".to_string(),
                answer: id,
                answer_aliases: vec![],
            })
        }
        OracleKind::SyntaxCheck => syntax_qa(ctx),
        OracleKind::PathToValue => {
            let root = ctx.tree_body()?;
            let sites = oracles::value_sites(root);
            if sites.is_empty() {
                return Err(Error::NotGenerable("document carries no values".into()));
            }
            let (path, key, value) = rng.choose(&sites).clone();
            let answer = oracles::format_value_path(&path, &key);
            Ok(Qa {
                question: format!(
                    "What is the access path to the value '{value}', starting from the \
                     outermost object?"
                ),
                requirement: "Write the path as bracketed steps, descending with [\"subs\"] \
                              and the child index and ending with the field name, for example \
                              [\"subs\"][0][\"KEY\"]."
                    .to_string(),
                answer: answer.clone(),
                answer_aliases: vec![answer.replace('"', "'")],
            })
        }
        OracleKind::DeepestObjects => {
            let root = ctx.tree_body()?;
            let blocks: Vec<String> = oracles::deepest_nodes(root)
                .into_iter()
                .map(|n| render_structure(n, ctx.language))
                .collect::<Result<_>>()?;
            Ok(Qa {
                question: "Which objects are the most deeply nested, that is, have an empty \
                           subs list?"
                    .to_string(),
                requirement: "Output every such object in document order, each formatted as a \
                              document of its own."
                    .to_string(),
                answer: blocks.join("\n"),
                answer_aliases: vec![blocks.join("\n\n")],
            })
        }
        OracleKind::XmlTagContent => {
            let root = ctx.tree_body()?;
            let tags = crate::render::xml_tags(root)?;
            let ids: Vec<&str> = preorder(root).iter().map(|n| n.id.as_str()).collect();
            let id = *rng.choose(&ids);
            let tag = tags[id].clone();
            let answer = oracles::xml_inner_text(root, id)?;
            Ok(Qa {
                question: format!("What is the content of the <{tag}> element?"),
                requirement: "Output everything between the start tag and the end tag, \
                              trimmed of leading and trailing whitespace."
                    .to_string(),
                answer,
                answer_aliases: vec![],
            })
        }
        OracleKind::XmlTagOfAttrValue => {
            let root = ctx.tree_body()?;
            let sites = oracles::value_sites(root);
            if sites.is_empty() {
                return Err(Error::NotGenerable("document carries no values".into()));
            }
            let (_, _, value) = rng.choose(&sites).clone();
            let tag = oracles::xml_tag_of_value(root, &value)?;
            Ok(Qa {
                question: format!("Which tag carries an attribute with the value \"{value}\"?"),
                requirement: "Answer with the tag name only.".to_string(),
                answer: tag.clone(),
                answer_aliases: vec![format!("<{tag}>")],
            })
        }
        OracleKind::BoldTexts => {
            let doc = ctx.markup_body()?;
            let bolds = oracles::bold_texts(&doc);
            if bolds.is_empty() {
                return Err(Error::NotGenerable("document has no bold spans".into()));
            }
            Ok(Qa {
                question: "What are all the bold texts in this document?".to_string(),
                requirement: "List each bold text on its own line, in document order, without \
                              the surrounding markup."
                    .to_string(),
                answer: bolds.join("\n"),
                answer_aliases: vec![bolds.join(", ")],
            })
        }
        OracleKind::SectionContent => {
            let doc = ctx.markup_body()?;
            if doc.sections.is_empty() {
                return Err(Error::NotGenerable("document has no sections".into()));
            }
            let idx = rng.index(doc.sections.len());
            let coords = oracles::section_coords(&doc)[idx];
            let section = &doc.sections[idx];
            let answer = render_content_line(section, ctx.language)?;
            let question = match (coords.j, coords.k) {
                (None, _) => {
                    format!("What is the content of the {} section?", ordinal(coords.i))
                }
                (Some(j), None) => format!(
                    "What is the content of the {} subsection under the {} section?",
                    ordinal(j),
                    ordinal(coords.i)
                ),
                (Some(j), Some(k)) => format!(
                    "What is the content of the {} subsubsection under the {} subsection of \
                     the {} section?",
                    ordinal(k),
                    ordinal(j),
                    ordinal(coords.i)
                ),
            };
            Ok(Qa {
                question,
                requirement: "Output that section's content line exactly as it appears, \
                              without the heading line."
                    .to_string(),
                answer,
                answer_aliases: vec![],
            })
        }
        OracleKind::ImageFiles => {
            let doc = ctx.markup_body()?;
            let files = oracles::image_files(&doc);
            if files.is_empty() {
                return Err(Error::NotGenerable("document references no image files".into()));
            }
            Ok(Qa {
                question: "Which image files does this document reference?".to_string(),
                requirement: "List each file name on its own line, in document order."
                    .to_string(),
                answer: files.join("\n"),
                answer_aliases: vec![files.join(", ")],
            })
        }
    }
}

fn field_lookup_qa(ctx: &DocContext, rng: &mut DetRng) -> Result<Qa> {
    let set = ctx.tables_body()?;
    let mut columns: Vec<&str> = Vec::new();
    for table in &set.tables {
        columns.extend(table.columns.iter().map(String::as_str).filter(|c| *c != "Name"));
    }
    if columns.is_empty() {
        return Err(Error::NotGenerable("no non-key columns to ask about".into()));
    }
    let column = *rng.choose(&columns);
    let primary = set.primary();
    let name_col = primary.col_index("Name").ok_or_else(|| Error::Config("no Name".into()))?;
    let names: Vec<&str> = primary.rows.iter().map(|r| r[name_col].as_str()).collect();
    let name = *rng.choose(&names);
    let answer = oracles::field_lookup(set, name, column)?;
    Ok(Qa {
        question: format!("What is the {column} of the record whose Name is '{name}'?"),
        requirement: "Answer with the exact cell value and nothing else.".to_string(),
        answer,
        answer_aliases: vec![],
    })
}

/// Draw a threshold strictly inside [lo, hi] when the range allows one.
fn interior_threshold(rng: &mut DetRng, lo: u64, hi: u64) -> u64 {
    if hi - lo >= 2 {
        rng.range_u64(lo + 1, hi - 1)
    } else {
        lo
    }
}

fn count_salary_qa(ctx: &DocContext, rng: &mut DetRng) -> Result<Qa> {
    let set = ctx.tables_body()?;
    let table = set.primary();
    let col = table.col_index("Salary").ok_or_else(|| Error::Config("no Salary".into()))?;
    let salaries: Vec<u64> = table
        .rows
        .iter()
        .map(|r| r[col].parse().map_err(|_| Error::Config("non-numeric salary".into())))
        .collect::<Result<_>>()?;
    let (lo, hi) = (
        *salaries.iter().min().expect("tables have rows"),
        *salaries.iter().max().expect("tables have rows"),
    );
    let mut t = lo;
    let mut count = 0;
    for _ in 0..THRESHOLD_RETRIES {
        t = interior_threshold(rng, lo, hi);
        count = oracles::count_salary_above(table, t)?;
        if count > 0 && count < table.rows.len() {
            break;
        }
    }
    Ok(Qa {
        question: format!("How many records have a Salary strictly greater than {t}?"),
        requirement: REQ_INTEGER.to_string(),
        answer: count.to_string(),
        answer_aliases: vec![],
    })
}

fn count_gender_qa(ctx: &DocContext, rng: &mut DetRng) -> Result<Qa> {
    let set = ctx.tables_body()?;
    let gender = *rng.choose(&GENDERS);
    let count = oracles::count_gender(set.primary(), gender)?;
    Ok(Qa {
        question: format!("How many records have Gender equal to '{gender}'?"),
        requirement: REQ_INTEGER.to_string(),
        answer: count.to_string(),
        answer_aliases: vec![],
    })
}

fn join_qa(ctx: &DocContext, rng: &mut DetRng) -> Result<Qa> {
    let set = ctx.tables_body()?;
    let cities = oracles::cities_present(set.primary())?;
    let city = rng.choose(&cities).clone();
    let b = set.secondary().ok_or_else(|| Error::NotGenerable("join needs two tables".into()))?;
    let a = set.primary();
    let a_name = a.col_index("Name").ok_or_else(|| Error::Config("no Name".into()))?;
    let a_city = a.col_index("City").ok_or_else(|| Error::Config("no City".into()))?;
    let b_name = b.col_index("Name").ok_or_else(|| Error::Config("no Name".into()))?;
    let b_height = b.col_index("Height").ok_or_else(|| Error::Config("no Height".into()))?;
    let mut heights: Vec<u64> = Vec::new();
    for row in &a.rows {
        if row[a_city] != city {
            continue;
        }
        let hrow = b
            .rows
            .iter()
            .find(|r| r[b_name] == row[a_name])
            .ok_or_else(|| Error::UnknownId(row[a_name].clone()))?;
        heights
            .push(hrow[b_height].parse().map_err(|_| Error::Config("non-numeric height".into()))?);
    }
    let (lo, hi) = (
        *heights.iter().min().expect("city drawn from present cities"),
        *heights.iter().max().expect("city drawn from present cities"),
    );
    let mut t = lo;
    let mut count = 0;
    for _ in 0..THRESHOLD_RETRIES {
        t = interior_threshold(rng, lo, hi);
        count = oracles::join_count(set, &city, t)?;
        if count > 0 && count < heights.len() {
            break;
        }
    }
    Ok(Qa {
        question: format!(
            "Joining the two tables on Name: how many people living in {city} have a Height \
             strictly greater than {t}?"
        ),
        requirement: REQ_INTEGER.to_string(),
        answer: count.to_string(),
        answer_aliases: vec![],
    })
}

fn syntax_qa(ctx: &DocContext) -> Result<Qa> {
    let finding = ctx
        .fault
        .as_ref()
        .ok_or_else(|| Error::Config("syntax task needs a corruption verdict".into()))?;
    let label = format_label(ctx.language);
    let question = format!("Does this {label} document contain a syntax error, and if so, what is it?");
    let requirement = "Answer 'No error.' if the document is well formed; otherwise name the \
                       error and the line it occurs on, for example 'Missing key before colon \
                       at line 4.'"
        .to_string();
    let (answer, answer_aliases) = if finding.has_error {
        let locus = finding
            .locus
            .ok_or_else(|| Error::Config("fault verdict without a locus".into()))?;
        let phrase = &finding.description;
        (
            format!("{phrase} at line {locus}."),
            vec![format!("{phrase} at line {locus}"), phrase.clone(), format!("{phrase}.")],
        )
    } else {
        ("No error.".to_string(), vec!["No error".to_string(), "no error".to_string()])
    };
    Ok(Qa { question, requirement, answer, answer_aliases })
}
