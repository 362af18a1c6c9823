//! Prompt assembly: six regimes over a versioned template file.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::dataset::Sample;
use crate::error::{Error, Result};
use crate::rng::{stable_hash, DetRng};

/// The six prompt regimes. Shot counts must be at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromptMode {
    Naive,
    SelfCot,
    PsCot,
    WithHint,
    FewShot(usize),
    SimpleFewShot(usize),
}

impl PromptMode {
    /// Parses a mode name; `shots` applies to the two shot modes only.
    pub fn from_flags(name: &str, shots: usize) -> Result<Self> {
        match name {
            "naive" => Ok(PromptMode::Naive),
            "self_cot" => Ok(PromptMode::SelfCot),
            "ps_cot" => Ok(PromptMode::PsCot),
            "with_hint" => Ok(PromptMode::WithHint),
            "few_shot" => Ok(PromptMode::FewShot(shots)),
            "simple_few_shot" => Ok(PromptMode::SimpleFewShot(shots)),
            other => Err(Error::Config(format!("unknown prompt mode {other:?}"))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            PromptMode::Naive => "naive".into(),
            PromptMode::SelfCot => "self_cot".into(),
            PromptMode::PsCot => "ps_cot".into(),
            PromptMode::WithHint => "with_hint".into(),
            PromptMode::FewShot(k) => format!("few_shot({k})"),
            PromptMode::SimpleFewShot(k) => format!("simple_few_shot({k})"),
        }
    }

    pub fn needs_demos(&self) -> bool {
        matches!(self, PromptMode::FewShot(_) | PromptMode::SimpleFewShot(_))
    }
}

/// Parsed template file. Six required sections; see templates/prompts.txt
/// for the format.
#[derive(Debug, Clone)]
pub struct PromptTemplates {
    pub base: String,
    pub self_cot: String,
    pub ps_cot: String,
    pub hint: String,
    pub demos: String,
    pub demo: String,
}

const SECTION_NAMES: [&str; 6] = ["base", "self_cot", "ps_cot", "hint", "demos", "demo"];

impl PromptTemplates {
    /// The templates shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(include_str!("../templates/prompts.txt"))
            .expect("embedded template file parses")
    }

    /// Parses the sectioned template format. Every section is required;
    /// unknown section names are rejected to catch typos.
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        let mut current: Option<&str> = None;
        for line in text.lines() {
            if line.starts_with(";;") {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                if !SECTION_NAMES.contains(&name) {
                    return Err(Error::Template(format!("unknown section [{name}]")));
                }
                if sections.insert(name, Vec::new()).is_some() {
                    return Err(Error::Template(format!("duplicate section [{name}]")));
                }
                current = Some(name);
                continue;
            }
            match current {
                Some(name) => sections.get_mut(name).unwrap().push(line),
                None if line.trim().is_empty() => {}
                None => {
                    return Err(Error::Template(format!(
                        "text before the first section header: {line:?}"
                    )))
                }
            }
        }
        let body = |name: &str| -> Result<String> {
            let lines = sections
                .get(name)
                .ok_or_else(|| Error::Template(format!("missing section [{name}]")))?;
            let joined = lines.join("\n");
            let trimmed = joined.trim_matches('\n');
            if trimmed.is_empty() {
                return Err(Error::Template(format!("empty section [{name}]")));
            }
            Ok(trimmed.to_string())
        };
        Ok(PromptTemplates {
            base: body("base")?,
            self_cot: body("self_cot")?,
            ps_cot: body("ps_cot")?,
            hint: body("hint")?,
            demos: body("demos")?,
            demo: body("demo")?,
        })
    }
}

/// Single-pass `{name}` substitution. Inserted values are never rescanned,
/// so braces inside them stay literal. Unknown placeholder names are
/// template errors.
fn fill(template: &str, values: &[(&str, &str)]) -> Result<String> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = after
            .find('}')
            .ok_or_else(|| Error::Template("unclosed placeholder".to_string()))?;
        let name = &after[..close];
        let value = values
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::Template(format!("unknown placeholder {{{name}}}")))?;
        out.push_str(value);
        rest = &after[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

fn render_demo(templates: &PromptTemplates, demo: &Sample) -> Result<String> {
    fill(
        &templates.demo,
        &[
            ("reference", demo.reference.as_str()),
            ("question", demo.question.as_str()),
            ("answer", demo.answer.as_str()),
        ],
    )
}

/// Demo pool entries sharing the target's sample id are leakage and reject
/// the whole call; a pool smaller than k rejects likewise.
fn select_demos<'a>(
    sample: &Sample,
    pool: &'a [Sample],
    k: usize,
    random_draw: bool,
) -> Result<Vec<&'a Sample>> {
    if k == 0 {
        return Err(Error::Config("shot count must be at least 1".to_string()));
    }
    if pool.iter().any(|d| d.id == sample.id) {
        return Err(Error::DemoPool(format!(
            "demo pool contains the target sample {:?}",
            sample.id
        )));
    }
    if pool.len() < k {
        return Err(Error::DemoPool(format!(
            "demo pool has {} samples, need {k}",
            pool.len()
        )));
    }
    let mut chosen: Vec<&Sample> = if random_draw {
        let mut rng = DetRng::from_seed(stable_hash(&[sample.id.as_bytes()]));
        let mut idx: Vec<usize> = (0..pool.len()).collect();
        for i in 0..k {
            let j = i + rng.index(idx.len() - i);
            idx.swap(i, j);
        }
        idx[..k].iter().map(|&i| &pool[i]).collect()
    } else {
        let mut by_len: Vec<&Sample> = pool.iter().collect();
        by_len.sort_by(|a, b| {
            (a.meta.reference_chars, &a.id).cmp(&(b.meta.reference_chars, &b.id))
        });
        by_len.truncate(k);
        by_len
    };
    chosen.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(chosen)
}

/// Assembles the prompt for one sample. Pure in (sample, mode, pool order,
/// templates); the reference text is carried into the prompt verbatim.
pub fn assemble(
    sample: &Sample,
    mode: &PromptMode,
    demo_pool: &[Sample],
    templates: &PromptTemplates,
) -> Result<String> {
    let base = fill(
        &templates.base,
        &[
            ("reference", sample.reference.as_str()),
            ("question", sample.question.as_str()),
            ("requirement", sample.requirement.as_str()),
        ],
    )?;
    match mode {
        PromptMode::Naive => Ok(base),
        PromptMode::SelfCot => Ok(format!("{base}\n\n{}", templates.self_cot)),
        PromptMode::PsCot => Ok(format!("{base}\n\n{}", templates.ps_cot)),
        PromptMode::WithHint => {
            let block = fill(&templates.hint, &[("hint", sample.hint.as_str())])?;
            Ok(format!("{base}\n\n{block}"))
        }
        PromptMode::FewShot(k) | PromptMode::SimpleFewShot(k) => {
            let random = matches!(mode, PromptMode::FewShot(_));
            let chosen = select_demos(sample, demo_pool, *k, random)?;
            let rendered: Vec<String> = chosen
                .iter()
                .map(|d| render_demo(templates, d))
                .collect::<Result<_>>()?;
            let block = fill(&templates.demos, &[("demos", rendered.join("\n\n").as_str())])?;
            Ok(format!("{block}\n\n{base}"))
        }
    }
}

/// One assembled prompt, ready for the runner.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PromptRecord {
    pub sample_id: String,
    pub mode: String,
    pub prompt: String,
}

/// Assembles the whole suite under one mode.
pub fn assemble_all(
    samples: &[Sample],
    mode: &PromptMode,
    demo_pool: &[Sample],
    templates: &PromptTemplates,
) -> Result<Vec<PromptRecord>> {
    samples
        .iter()
        .map(|s| {
            Ok(PromptRecord {
                sample_id: s.id.clone(),
                mode: mode.label(),
                prompt: assemble(s, mode, demo_pool, templates)?,
            })
        })
        .collect()
}

/// Writes prompt records as JSON lines.
pub fn write_prompts<W: Write>(mut w: W, records: &[PromptRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads prompt records from JSON lines; blank lines are skipped.
pub fn read_prompts<R: BufRead>(r: R) -> Result<Vec<PromptRecord>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: PromptRecord =
            serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
                line: i + 1,
                message: e.to_string(),
            })?;
        out.push(record);
    }
    Ok(out)
}
