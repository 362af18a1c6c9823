//! The three heading/content formats: Markdown, LaTeX and Org.
//!
//! A markup document is a flat list of sections, each rendered as a heading
//! line followed by one content line holding plain words, bold spans and
//! image references in that order.

use std::sync::LazyLock;

use regex::Regex;

use super::{Language, MarkupDoc, Section};
use crate::error::{Error, Result};

/// Allowed image suffixes, selection order matters for derivation.
pub const IMAGE_SUFFIXES: [&str; 4] = ["png", "jpg", "jpeg", "gif"];

fn heading(lang: Language, level: u8, title: &str) -> String {
    match lang {
        Language::Markdown => format!("{} {title}", "#".repeat(level as usize)),
        Language::Org => format!("{} {title}", "*".repeat(level as usize)),
        Language::Latex => {
            let cmd = match level {
                1 => "section",
                2 => "subsection",
                _ => "subsubsection",
            };
            format!("\\{cmd}{{{title}}}")
        }
        _ => unreachable!("not a markup language"),
    }
}

fn bold(lang: Language, span: &str) -> String {
    match lang {
        Language::Markdown => format!("**{span}**"),
        Language::Org => format!("*{span}*"),
        Language::Latex => format!("\\textbf{{{span}}}"),
        _ => unreachable!("not a markup language"),
    }
}

fn image(lang: Language, file: &str) -> String {
    match lang {
        Language::Markdown => format!("![alt]({file} \"hover text\")"),
        Language::Org => format!("[[{file}]]"),
        Language::Latex => format!("\\includegraphics[width=0.5\\textwidth]{{{file}}}"),
        _ => unreachable!("not a markup language"),
    }
}

/// Render one section's content line: plain words, then bold spans, then
/// images, space separated.
pub fn render_content_line(section: &Section, lang: Language) -> Result<String> {
    let mut parts = Vec::new();
    if !section.content.is_empty() {
        parts.push(section.content.clone());
    }
    for span in &section.bold_spans {
        parts.push(bold(lang, span));
    }
    for file in &section.images {
        parts.push(image(lang, file));
    }
    if parts.is_empty() {
        return Err(Error::NotGenerable(format!(
            "section {:?} has no content to render",
            section.title
        )));
    }
    Ok(parts.join(" "))
}

/// Render the whole document for one of the three markup languages.
pub fn render_markup(doc: &MarkupDoc, lang: Language) -> Result<String> {
    if !matches!(lang, Language::Markdown | Language::Latex | Language::Org) {
        return Err(Error::UnsupportedLanguage(lang));
    }
    if doc.sections.is_empty() {
        return Err(Error::NotGenerable("markup document has no sections".into()));
    }
    let mut lines = Vec::with_capacity(doc.sections.len() * 2);
    for s in &doc.sections {
        if !(1..=3).contains(&s.level) {
            return Err(Error::Config(format!("section level {} out of range 1..=3", s.level)));
        }
        lines.push(heading(lang, s.level, &s.title));
        lines.push(render_content_line(s, lang)?);
    }
    Ok(lines.join("\n"))
}

struct MarkupPatterns {
    heading: Regex,
    markup: Regex,
}

static MD: LazyLock<MarkupPatterns> = LazyLock::new(|| MarkupPatterns {
    heading: Regex::new(r"^(#{1,3}) ([a-z]+)$").unwrap(),
    markup: Regex::new(
        r#"\*\*([a-z ]+)\*\*|!\[alt\]\(([a-z]+\.(?:png|jpg|jpeg|gif)) "hover text"\)"#,
    )
    .unwrap(),
});
static ORG: LazyLock<MarkupPatterns> = LazyLock::new(|| MarkupPatterns {
    heading: Regex::new(r"^(\*{1,3}) ([a-z]+)$").unwrap(),
    markup: Regex::new(r"\*([a-z ]+)\*|\[\[([a-z]+\.(?:png|jpg|jpeg|gif))\]\]").unwrap(),
});
static TEX: LazyLock<MarkupPatterns> = LazyLock::new(|| MarkupPatterns {
    heading: Regex::new(r"^\\(section|subsection|subsubsection)\{([a-z]+)\}$").unwrap(),
    markup: Regex::new(
        r"\\textbf\{([a-z ]+)\}|\\includegraphics\[width=0\.5\\textwidth\]\{([a-z]+\.(?:png|jpg|jpeg|gif))\}",
    )
    .unwrap(),
});

fn patterns(lang: Language) -> Result<&'static MarkupPatterns> {
    match lang {
        Language::Markdown => Ok(&MD),
        Language::Org => Ok(&ORG),
        Language::Latex => Ok(&TEX),
        other => Err(Error::UnsupportedLanguage(other)),
    }
}

fn heading_level(lang: Language, marker: &str) -> u8 {
    match lang {
        Language::Markdown | Language::Org => marker.len() as u8,
        Language::Latex => match marker {
            "section" => 1,
            "subsection" => 2,
            _ => 3,
        },
        _ => unreachable!("not a markup language"),
    }
}

/// Parse a rendered markup document. Plain text is whitespace-normalized, so
/// round trips are exact for documents in canonical form. Section levels must
/// start at 1 and step up by at most one.
pub fn parse_markup(text: &str, lang: Language) -> Result<MarkupDoc> {
    let pats = patterns(lang)?;
    let lines: Vec<&str> = text.lines().collect();
    if lines.is_empty() || lines.len() % 2 != 0 {
        return Err(Error::Parse {
            line: lines.len().max(1),
            message: "document must alternate heading and content lines".into(),
        });
    }
    let mut sections = Vec::new();
    let mut prev_level = 0u8;
    for (i, pair) in lines.chunks(2).enumerate() {
        let heading_no = i * 2 + 1;
        let caps = pats.heading.captures(pair[0]).ok_or(Error::Parse {
            line: heading_no,
            message: format!("expected a heading line, found {:?}", pair[0]),
        })?;
        let level = heading_level(lang, &caps[1]);
        if level > prev_level + 1 || (i == 0 && level != 1) {
            return Err(Error::Parse {
                line: heading_no,
                message: format!("section level jumps from {prev_level} to {level}"),
            });
        }
        prev_level = level;
        let title = caps[2].to_string();

        let content_line = pair[1];
        let mut bold_spans = Vec::new();
        let mut images = Vec::new();
        let mut plain = String::new();
        let mut last = 0;
        for m in pats.markup.captures_iter(content_line) {
            let whole = m.get(0).expect("match exists");
            plain.push_str(&content_line[last..whole.start()]);
            last = whole.end();
            if let Some(span) = m.get(1) {
                bold_spans.push(span.as_str().to_string());
            } else {
                images.push(m.get(2).expect("image capture").as_str().to_string());
            }
        }
        plain.push_str(&content_line[last..]);
        let content = plain.split_whitespace().collect::<Vec<_>>().join(" ");
        if !content.bytes().all(|b| b == b' ' || b.is_ascii_lowercase()) {
            return Err(Error::Parse {
                line: heading_no + 1,
                message: format!("content line carries stray markup: {content_line:?}"),
            });
        }
        if content.is_empty() && bold_spans.is_empty() && images.is_empty() {
            return Err(Error::Parse {
                line: heading_no + 1,
                message: "empty content line".into(),
            });
        }
        sections.push(Section { level, title, content, bold_spans, images });
    }
    Ok(MarkupDoc { sections })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sec(level: u8, title: &str, content: &str, bolds: &[&str], images: &[&str]) -> Section {
        Section {
            level,
            title: title.into(),
            content: content.into(),
            bold_spans: bolds.iter().map(|s| s.to_string()).collect(),
            images: images.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn demo_doc() -> MarkupDoc {
        MarkupDoc {
            sections: vec![
                sec(1, "intro", "small cat", &["big dog"], &["dog.gif"]),
                sec(2, "detail", "plain words here", &[], &["cat.png"]),
                sec(2, "more", "tail end", &["late span"], &[]),
            ],
        }
    }

    #[test]
    fn markdown_shape_is_exact() {
        let text = render_markup(&demo_doc(), Language::Markdown).unwrap();
        let expected = concat!(
            "# intro\n",
            "small cat **big dog** ![alt](dog.gif \"hover text\")\n",
            "## detail\n",
            "plain words here ![alt](cat.png \"hover text\")\n",
            "## more\n",
            "tail end **late span**"
        );
        assert_eq!(text, expected);
    }

    #[test]
    fn org_shape_is_exact() {
        let text = render_markup(&demo_doc(), Language::Org).unwrap();
        let expected = concat!(
            "* intro\n",
            "small cat *big dog* [[dog.gif]]\n",
            "** detail\n",
            "plain words here [[cat.png]]\n",
            "** more\n",
            "tail end *late span*"
        );
        assert_eq!(text, expected);
    }

    #[test]
    fn latex_shape_is_exact() {
        let text = render_markup(&demo_doc(), Language::Latex).unwrap();
        let expected = concat!(
            "\\section{intro}\n",
            "small cat \\textbf{big dog} \\includegraphics[width=0.5\\textwidth]{dog.gif}\n",
            "\\subsection{detail}\n",
            "plain words here \\includegraphics[width=0.5\\textwidth]{cat.png}\n",
            "\\subsection{more}\n",
            "tail end \\textbf{late span}"
        );
        assert_eq!(text, expected);
    }

    #[test]
    fn round_trip_all_three() {
        for lang in [Language::Markdown, Language::Latex, Language::Org] {
            let text = render_markup(&demo_doc(), lang).unwrap();
            assert_eq!(parse_markup(&text, lang).unwrap(), demo_doc(), "{lang}");
        }
    }

    #[test]
    fn deep_levels_render_third_stage_markers() {
        let doc = MarkupDoc {
            sections: vec![
                sec(1, "a", "x", &[], &[]),
                sec(2, "b", "y", &[], &[]),
                sec(3, "c", "z", &[], &[]),
            ],
        };
        assert!(render_markup(&doc, Language::Markdown).unwrap().contains("\n### c\n"));
        assert!(render_markup(&doc, Language::Org).unwrap().contains("\n*** c\n"));
        assert!(render_markup(&doc, Language::Latex).unwrap().contains("\\subsubsection{c}\n"));
    }

    #[test]
    fn bad_documents_are_rejected() {
        let empty = MarkupDoc { sections: vec![] };
        assert!(render_markup(&empty, Language::Markdown).is_err());
        let bad_level = MarkupDoc { sections: vec![sec(4, "a", "x", &[], &[])] };
        assert!(render_markup(&bad_level, Language::Markdown).is_err());
        let hollow = MarkupDoc { sections: vec![sec(1, "a", "", &[], &[])] };
        assert!(render_markup(&hollow, Language::Markdown).is_err());
        assert!(render_markup(&demo_doc(), Language::Json).is_err());
    }

    #[test]
    fn parse_rejects_malformed_documents() {
        assert!(parse_markup("", Language::Markdown).is_err());
        assert!(parse_markup("# a", Language::Markdown).is_err(), "odd line count");
        assert!(parse_markup("plain\n# a", Language::Markdown).is_err(), "heading second");
        assert!(parse_markup("## a\nx", Language::Markdown).is_err(), "starts at level 2");
        assert!(parse_markup("# a\nx\n### b\ny", Language::Markdown).is_err(), "level jump");
        assert!(parse_markup("# a\nx [bracket", Language::Markdown).is_err(), "stray markup");
        assert!(parse_markup("# a\n**unclosed", Language::Markdown).is_err());
    }

    #[test]
    fn org_bold_does_not_swallow_headings() {
        // A second section whose heading uses two stars must not be read as
        // a bold span; headings are matched before content extraction.
        let doc = MarkupDoc {
            sections: vec![sec(1, "a", "x", &["y z"], &[]), sec(2, "b", "w", &[], &[])],
        };
        let text = render_markup(&doc, Language::Org).unwrap();
        assert_eq!(parse_markup(&text, Language::Org).unwrap(), doc);
    }
}
