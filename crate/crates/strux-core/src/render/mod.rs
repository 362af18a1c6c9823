//! Rendering, parsing and grammar validation for the eight document languages.

pub mod json_lang;
pub mod markup;
pub mod tree_lang;
pub mod validate;
pub mod xml_lang;
pub mod yaml_lang;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::StructNode;

pub use markup::{render_content_line, IMAGE_SUFFIXES};
pub use validate::validate;
pub use xml_lang::{xml_tags, XML_DECLARATION};

/// The eight concrete text formats a document can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Language {
    Tree,
    Tabular,
    Json,
    Yaml,
    Xml,
    Markdown,
    Latex,
    Org,
}

impl Language {
    pub const ALL: [Language; 8] = [
        Language::Tree,
        Language::Tabular,
        Language::Json,
        Language::Yaml,
        Language::Xml,
        Language::Markdown,
        Language::Latex,
        Language::Org,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Language::Tree => "tree",
            Language::Tabular => "tabular",
            Language::Json => "json",
            Language::Yaml => "yaml",
            Language::Xml => "xml",
            Language::Markdown => "markdown",
            Language::Latex => "latex",
            Language::Org => "org",
        }
    }

    /// Parse a language label. `sql` is accepted as an alias for the tabular
    /// format since that question family grew out of SQL-style tables.
    pub fn parse(label: &str) -> Option<Language> {
        match label.trim().to_ascii_lowercase().as_str() {
            "tree" => Some(Language::Tree),
            "tabular" | "sql" | "csv" => Some(Language::Tabular),
            "json" => Some(Language::Json),
            "yaml" => Some(Language::Yaml),
            "xml" => Some(Language::Xml),
            "markdown" | "md" => Some(Language::Markdown),
            "latex" | "tex" => Some(Language::Latex),
            "org" => Some(Language::Org),
            _ => None,
        }
    }
}

impl std::fmt::Display for Language {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One heading plus its content line in a markup document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    /// Heading stage, 1 through 3.
    pub level: u8,
    pub title: String,
    /// Plain words, single-space separated.
    pub content: String,
    pub bold_spans: Vec<String>,
    /// Image file names in order of appearance.
    pub images: Vec<String>,
}

/// The document model behind the three markup languages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct MarkupDoc {
    pub sections: Vec<Section>,
}

/// Flatten a structure tree into sections. Depth maps to heading level,
/// capped at stage 3; the first pair becomes a bold span of its lowercased
/// key and value; the second pair's value becomes an image file whose suffix
/// is picked by value length.
pub fn derive_markup(root: &StructNode) -> MarkupDoc {
    let mut sections = Vec::new();
    fn walk(n: &StructNode, depth: u32, sections: &mut Vec<Section>) {
        let level = (depth + 1).min(3) as u8;
        let content = if n.pairs.is_empty() {
            n.id.clone()
        } else {
            n.pairs.iter().map(|(_, v)| v.as_str()).collect::<Vec<_>>().join(" ")
        };
        let bold_spans = match n.pairs.first() {
            Some((k, v)) => vec![format!("{} {v}", k.to_lowercase())],
            None => Vec::new(),
        };
        let images = match n.pairs.get(1) {
            Some((_, v)) => vec![format!("{v}.{}", IMAGE_SUFFIXES[v.len() % 4])],
            None => Vec::new(),
        };
        sections.push(Section { level, title: n.id.clone(), content, bold_spans, images });
        for c in &n.children {
            walk(c, depth + 1, sections);
        }
    }
    walk(root, 0, &mut sections);
    MarkupDoc { sections }
}

/// Render a structure tree in any non-tabular language. The markup languages
/// go through [`derive_markup`] first.
pub fn render_structure(root: &StructNode, lang: Language) -> Result<String> {
    match lang {
        Language::Tree => tree_lang::render_tree(root),
        Language::Json => json_lang::render_json(root),
        Language::Yaml => yaml_lang::render_yaml(root),
        Language::Xml => xml_lang::render_xml(root),
        Language::Markdown | Language::Latex | Language::Org => {
            markup::render_markup(&derive_markup(root), lang)
        }
        Language::Tabular => Err(Error::UnsupportedLanguage(lang)),
    }
}

/// Parse a rendered document back into a structure tree. Markup renderings
/// flatten depth away, so only the four tree-backed languages parse here.
pub fn parse_structure(text: &str, lang: Language) -> Result<StructNode> {
    match lang {
        Language::Tree => tree_lang::parse_tree(text),
        Language::Json => json_lang::parse_json(text),
        Language::Yaml => yaml_lang::parse_yaml(text),
        Language::Xml => xml_lang::parse_xml(text),
        _ => Err(Error::UnsupportedLanguage(lang)),
    }
}

/// Render a markup document.
pub fn render_markup(doc: &MarkupDoc, lang: Language) -> Result<String> {
    markup::render_markup(doc, lang)
}

/// Parse a markup document.
pub fn parse_markup(text: &str, lang: Language) -> Result<MarkupDoc> {
    markup::parse_markup(text, lang)
}
