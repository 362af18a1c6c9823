//! Sample assembly, suite generation, persistence, statistics and the audit
//! that re-derives every stored answer from its reference.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corrupt::{check_syntax, corrupt};
use crate::error::{Error, Result};
use crate::render::{parse_markup, parse_structure, Language};
use crate::rng::{derive_seed, stable_hash, DetRng};
use crate::tabular::{generate_tables, parse_tableset, TabularConfig};
use crate::tasks::{
    all_tasks, find_task, format_label, instantiate, DocBody, DocContext, OracleKind, Qa,
    TaskCategory, TaskSpec,
};
use crate::tree::{generate_structure, stats_of, GenConfig};

/// Document re-rolls per sample before giving up.
pub const MAX_SAMPLE_ATTEMPTS: u32 = 64;

/// Share of syntax-task documents left uncorrupted.
pub const DEFAULT_P_CLEAN: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    Standard,
    Hard,
}

impl Difficulty {
    pub fn as_str(self) -> &'static str {
        match self {
            Difficulty::Standard => "standard",
            Difficulty::Hard => "hard",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Difficulty::Standard),
            "hard" => Ok(Difficulty::Hard),
            other => Err(Error::Config(format!("unknown difficulty {other:?}"))),
        }
    }
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Structural bounds for one difficulty level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifficultyProfile {
    pub max_depth: u32,
    pub max_width: u32,
    pub row_count_range: (usize, usize),
}

impl DifficultyProfile {
    pub fn standard() -> Self {
        DifficultyProfile { max_depth: 3, max_width: 3, row_count_range: (4, 8) }
    }

    pub fn hard() -> Self {
        DifficultyProfile { max_depth: 5, max_width: 5, row_count_range: (10, 16) }
    }

    /// Componentwise dominance, used to keep hard at least as large as
    /// standard in every knob.
    pub fn dominates(&self, other: &DifficultyProfile) -> bool {
        self.max_depth >= other.max_depth
            && self.max_width >= other.max_width
            && self.row_count_range.0 >= other.row_count_range.0
            && self.row_count_range.1 >= other.row_count_range.1
    }
}

/// Full recipe for one suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite_seed: u64,
    pub per_task_count: u32,
    pub difficulty: Difficulty,
    pub profile: DifficultyProfile,
    pub p_clean: f64,
    /// Keep only these formats; None keeps all 8.
    pub languages: Option<Vec<Language>>,
    /// Keep only these task ids; None keeps all 29.
    pub tasks: Option<Vec<String>>,
}

impl SuiteConfig {
    /// The standard test preset: 29 tasks x 128 samples = 3,712.
    pub fn preset_test(suite_seed: u64) -> Self {
        SuiteConfig {
            suite_seed,
            per_task_count: 128,
            difficulty: Difficulty::Standard,
            profile: DifficultyProfile::standard(),
            p_clean: DEFAULT_P_CLEAN,
            languages: None,
            tasks: None,
        }
    }

    /// The hard preset: 29 tasks x 72 samples = 2,088.
    pub fn preset_test_hard(suite_seed: u64) -> Self {
        SuiteConfig {
            suite_seed,
            per_task_count: 72,
            difficulty: Difficulty::Hard,
            profile: DifficultyProfile::hard(),
            p_clean: DEFAULT_P_CLEAN,
            languages: None,
            tasks: None,
        }
    }

    pub fn preset(name: &str, suite_seed: u64) -> Result<Self> {
        match name {
            "test" => Ok(SuiteConfig::preset_test(suite_seed)),
            "test-hard" => Ok(SuiteConfig::preset_test_hard(suite_seed)),
            other => Err(Error::Config(format!("unknown preset {other:?}"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.per_task_count == 0 {
            return Err(Error::Config("per_task_count must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p_clean) {
            return Err(Error::Config(format!("p_clean {} outside [0, 1]", self.p_clean)));
        }
        if self.profile.max_width == 0 {
            return Err(Error::Config("max_width must be at least 1".into()));
        }
        if self.profile.row_count_range.0 < 1
            || self.profile.row_count_range.0 > self.profile.row_count_range.1
        {
            return Err(Error::Config("row_count_range must be an ordered range from 1".into()));
        }
        if self.difficulty == Difficulty::Hard
            && !self.profile.dominates(&DifficultyProfile::standard())
        {
            return Err(Error::Config(
                "hard profile must dominate the standard profile componentwise".into(),
            ));
        }
        if let Some(tasks) = &self.tasks {
            for t in tasks {
                find_task(t)?;
            }
        }
        Ok(())
    }

    /// Tasks surviving the language and id filters, in id order.
    pub fn selected_tasks(&self) -> Vec<&'static TaskSpec> {
        let mut specs: Vec<&'static TaskSpec> = all_tasks()
            .iter()
            .filter(|t| {
                self.languages.as_ref().map_or(true, |langs| langs.contains(&t.language))
            })
            .filter(|t| {
                self.tasks.as_ref().map_or(true, |ids| ids.iter().any(|i| i == t.task_id))
            })
            .collect();
        specs.sort_by_key(|t| t.task_id);
        specs
    }
}

/// Everything recorded about one sample beyond its four main fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleMeta {
    pub language: Language,
    pub task_id: String,
    pub category: TaskCategory,
    pub difficulty: Difficulty,
    /// The attempt seed that produced the sample; all three rng streams
    /// (doc, corrupt, qa) derive from it.
    pub seed: u64,
    pub node_count: u32,
    pub reference_chars: usize,
    pub depth: u32,
    pub width: u32,
}

/// One benchmark record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sample {
    pub id: String,
    pub reference: String,
    pub question: String,
    pub requirement: String,
    pub answer: String,
    pub answer_aliases: Vec<String>,
    pub hint: String,
    pub meta: SampleMeta,
}

/// Per-sample seed: a stable hash of everything that addresses the sample,
/// plus the attempt counter so re-rolls explore fresh documents.
pub fn attempt_seed(
    suite_seed: u64,
    task_id: &str,
    difficulty: Difficulty,
    index: u32,
    attempt: u32,
) -> u64 {
    stable_hash(&[
        &suite_seed.to_le_bytes(),
        task_id.as_bytes(),
        difficulty.as_str().as_bytes(),
        &u64::from(index).to_le_bytes(),
        &u64::from(attempt).to_le_bytes(),
    ])
}

/// Build the document context for one attempt. The body is re-parsed from
/// the rendered reference so answers depend only on what the sample stores.
fn build_context(spec: &TaskSpec, config: &SuiteConfig, seed: u64) -> Result<DocContext> {
    let doc_seed = derive_seed(seed, "doc");
    if spec.language == Language::Tabular {
        let set = generate_tables(&TabularConfig {
            seed: doc_seed,
            row_count_range: config.profile.row_count_range,
            two_tables: true,
        })?;
        let reference = crate::tabular::render_tableset(&set);
        let body = DocBody::Tables(parse_tableset(&reference)?);
        return Ok(DocContext { language: spec.language, reference, body, fault: None });
    }

    let root = generate_structure(&GenConfig {
        seed: doc_seed,
        max_depth: config.profile.max_depth,
        max_width: config.profile.max_width,
        ..GenConfig::default()
    })?;
    let reference = crate::render::render_structure(&root, spec.language)?;
    let body = match spec.language {
        Language::Markdown | Language::Latex | Language::Org => {
            DocBody::Markup(parse_markup(&reference, spec.language)?)
        }
        _ => DocBody::Tree(parse_structure(&reference, spec.language)?),
    };
    Ok(DocContext { language: spec.language, reference, body, fault: None })
}

/// Structural metadata of the context body. Corrupted references keep the
/// clean document's numbers, since the damage is a single deletion.
fn body_shape(ctx: &DocContext) -> (u32, u32, u32) {
    match &ctx.body {
        DocBody::Tree(root) => {
            let s = stats_of(root);
            (s.node_count, s.height, s.max_observed_width)
        }
        DocBody::Markup(doc) => {
            let depth = doc.sections.iter().map(|s| u32::from(s.level)).max().unwrap_or(0);
            (doc.sections.len() as u32, depth.saturating_sub(1), doc.sections.len() as u32)
        }
        DocBody::Tables(set) => {
            let rows: usize = set.tables.iter().map(|t| t.rows.len()).sum();
            let widest = set.tables.iter().map(|t| t.rows.len()).max().unwrap_or(0);
            (rows as u32, 1, widest as u32)
        }
    }
}

fn try_sample(spec: &TaskSpec, config: &SuiteConfig, index: u32, seed: u64) -> Result<Sample> {
    let mut ctx = build_context(spec, config, seed)?;
    let (node_count, depth, width) = body_shape(&ctx);

    if spec.oracle == OracleKind::SyntaxCheck {
        let mut crng = DetRng::from_seed(derive_seed(seed, "corrupt"));
        let (text, finding) = corrupt(&ctx.reference, spec.language, config.p_clean, &mut crng)?;
        ctx.reference = text;
        ctx.fault = Some(finding);
    }

    let mut qrng = DetRng::from_seed(derive_seed(seed, "qa"));
    let qa = instantiate(spec, &ctx, &mut qrng)?;

    let reference_chars = ctx.reference.chars().count();
    Ok(Sample {
        id: format!("{}/{}/{}", spec.task_id, config.difficulty.as_str(), index),
        reference: ctx.reference,
        question: qa.question,
        requirement: qa.requirement,
        answer: qa.answer,
        answer_aliases: qa.answer_aliases,
        hint: spec.hint.to_string(),
        meta: SampleMeta {
            language: spec.language,
            task_id: spec.task_id.to_string(),
            category: spec.category,
            difficulty: config.difficulty,
            seed,
            node_count,
            reference_chars,
            depth,
            width,
        },
    })
}

/// Generate one sample, re-rolling the document under fresh attempt seeds
/// whenever the draw cannot host the task.
pub fn generate_sample(spec: &TaskSpec, config: &SuiteConfig, index: u32) -> Result<Sample> {
    for attempt in 0..MAX_SAMPLE_ATTEMPTS {
        let seed = attempt_seed(config.suite_seed, spec.task_id, config.difficulty, index, attempt);
        match try_sample(spec, config, index, seed) {
            Ok(sample) => return Ok(sample),
            Err(
                Error::NotGenerable(_) | Error::NotCorruptible(_) | Error::IdSpaceExhausted { .. },
            ) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Ungenerable { task: spec.task_id.to_string(), attempts: MAX_SAMPLE_ATTEMPTS })
}

/// Generate the whole suite, ordered by (task_id, index).
pub fn generate_suite(config: &SuiteConfig) -> Result<Vec<Sample>> {
    config.validate()?;
    let specs = config.selected_tasks();
    let mut out = Vec::with_capacity(specs.len() * config.per_task_count as usize);
    for spec in specs {
        for index in 0..config.per_task_count {
            out.push(generate_sample(spec, config, index)?);
        }
    }
    Ok(out)
}

/// Write samples as line-delimited records.
pub fn write_suite(samples: &[Sample], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    for s in samples {
        serde_json::to_writer(&mut w, s)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Read a suite back; errors carry the 1-based line number.
pub fn read_suite(path: &Path) -> Result<Vec<Sample>> {
    let file = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let sample: Sample = serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(sample);
    }
    Ok(out)
}

/// Re-derive the answer a stored sample should carry, from its reference and
/// its recorded qa stream.
fn rederive(sample: &Sample) -> Result<Qa> {
    let spec = find_task(&sample.meta.task_id)?;
    let ctx = if spec.oracle == OracleKind::SyntaxCheck {
        let finding = check_syntax(&sample.reference, spec.language)?;
        // The body is unused by syntax tasks; a placeholder keeps the
        // context total.
        DocContext {
            language: spec.language,
            reference: sample.reference.clone(),
            body: DocBody::Tree(crate::tree::StructNode {
                id: "x".into(),
                pairs: vec![],
                children: vec![],
            }),
            fault: Some(finding),
        }
    } else {
        let body = match spec.language {
            Language::Tabular => DocBody::Tables(parse_tableset(&sample.reference)?),
            Language::Markdown | Language::Latex | Language::Org => {
                DocBody::Markup(parse_markup(&sample.reference, spec.language)?)
            }
            _ => DocBody::Tree(parse_structure(&sample.reference, spec.language)?),
        };
        DocContext {
            language: spec.language,
            reference: sample.reference.clone(),
            body,
            fault: None,
        }
    };
    let mut qrng = DetRng::from_seed(derive_seed(sample.meta.seed, "qa"));
    instantiate(spec, &ctx, &mut qrng)
}

/// One audit discrepancy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditMismatch {
    pub sample_id: String,
    pub field: String,
    pub expected: String,
    pub got: String,
}

/// Outcome of auditing a suite.
#[derive(Debug, Clone, Default, Serialize)]
pub struct AuditReport {
    pub checked: usize,
    pub mismatches: Vec<AuditMismatch>,
}

impl AuditReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Re-derive every sample's question and answer from its stored reference
/// and compare against what the suite claims.
pub fn audit_suite(samples: &[Sample]) -> AuditReport {
    let mut report = AuditReport { checked: samples.len(), mismatches: Vec::new() };
    let mut push = |id: &str, field: &str, expected: String, got: String| {
        report.mismatches.push(AuditMismatch {
            sample_id: id.to_string(),
            field: field.to_string(),
            expected,
            got,
        });
    };
    for s in samples {
        match rederive(s) {
            Ok(qa) => {
                if qa.question != s.question {
                    push(&s.id, "question", qa.question, s.question.clone());
                } else if qa.answer != s.answer {
                    push(&s.id, "answer", qa.answer, s.answer.clone());
                } else if qa.requirement != s.requirement {
                    push(&s.id, "requirement", qa.requirement, s.requirement.clone());
                } else if qa.answer_aliases != s.answer_aliases {
                    push(
                        &s.id,
                        "answer_aliases",
                        qa.answer_aliases.join(" | "),
                        s.answer_aliases.join(" | "),
                    );
                }
            }
            Err(e) => push(&s.id, "reference", "a derivable document".into(), e.to_string()),
        }
    }
    report
}

/// Statistics key: one row per (language, task, difficulty).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct StatsKey {
    pub language: Language,
    pub task_id: String,
    pub difficulty: Difficulty,
}

/// Aggregated line for one key.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StatLine {
    pub count: usize,
    pub mean_chars: f64,
    pub min_chars: usize,
    pub max_chars: usize,
    pub mean_nodes: f64,
    pub mean_depth: f64,
    pub mean_width: f64,
}

pub fn suite_stats(samples: &[Sample]) -> BTreeMap<StatsKey, StatLine> {
    let mut acc: BTreeMap<StatsKey, Vec<&SampleMeta>> = BTreeMap::new();
    for s in samples {
        let key = StatsKey {
            language: s.meta.language,
            task_id: s.meta.task_id.clone(),
            difficulty: s.meta.difficulty,
        };
        acc.entry(key).or_default().push(&s.meta);
    }
    acc.into_iter()
        .map(|(key, metas)| {
            let n = metas.len();
            let mean = |f: &dyn Fn(&SampleMeta) -> f64| {
                metas.iter().map(|m| f(m)).sum::<f64>() / n as f64
            };
            let line = StatLine {
                count: n,
                mean_chars: mean(&|m| m.reference_chars as f64),
                min_chars: metas.iter().map(|m| m.reference_chars).min().unwrap_or(0),
                max_chars: metas.iter().map(|m| m.reference_chars).max().unwrap_or(0),
                mean_nodes: mean(&|m| f64::from(m.node_count)),
                mean_depth: mean(&|m| f64::from(m.depth)),
                mean_width: mean(&|m| f64::from(m.width)),
            };
            (key, line)
        })
        .collect()
}

/// Render the stats map as an aligned text table.
pub fn render_stats_table(stats: &BTreeMap<StatsKey, StatLine>) -> String {
    let mut rows = vec![vec![
        "language".to_string(),
        "task".to_string(),
        "difficulty".to_string(),
        "count".to_string(),
        "chars(mean)".to_string(),
        "chars(min)".to_string(),
        "chars(max)".to_string(),
        "nodes(mean)".to_string(),
        "depth(mean)".to_string(),
        "width(mean)".to_string(),
    ]];
    for (key, line) in stats {
        rows.push(vec![
            format_label(key.language).to_string(),
            key.task_id.clone(),
            key.difficulty.to_string(),
            line.count.to_string(),
            format!("{:.1}", line.mean_chars),
            line.min_chars.to_string(),
            line.max_chars.to_string(),
            format!("{:.1}", line.mean_nodes),
            format!("{:.1}", line.mean_depth),
            format!("{:.1}", line.mean_width),
        ]);
    }
    align_rows(&rows)
}

/// Left-align a rectangular row set into fixed-width columns.
pub fn align_rows(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0usize; cols];
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    rows.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(i, cell)| format!("{cell:<width$}", width = widths[i]))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        })
        .collect::<Vec<_>>()
        .join("\n")
}
