//! Response scoring: Exact Match, character-level RougeL with the 0.75
//! floor, BLEU, and run-level aggregation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dataset::{Difficulty, Sample};
use crate::error::{Error, Result};
use crate::render::Language;

/// Inputs beyond this many characters are truncated before the LCS; answers
/// are short, so this only guards against adversarial responses.
const LCS_INPUT_LIMIT: usize = 20_000;

/// RougeL floor: scores strictly below this collapse to 0.
pub const ROUGE_FLOOR: f64 = 0.75;

/// 1 iff the whitespace-trimmed prediction equals the gold answer or any
/// alias exactly.
pub fn exact_match(pred: &str, gold: &str, aliases: &[String]) -> bool {
    let p = pred.trim();
    p == gold || aliases.iter().any(|a| a == p)
}

fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    // Two-row dynamic program, O(min(|a|,|b|)) memory.
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut prev = vec![0usize; short.len() + 1];
    let mut cur = vec![0usize; short.len() + 1];
    for x in long {
        for (j, y) in short.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

fn truncated_chars(s: &str) -> Vec<char> {
    let mut chars: Vec<char> = s.chars().take(LCS_INPUT_LIMIT + 1).collect();
    if chars.len() > LCS_INPUT_LIMIT {
        log::warn!("scoring input truncated to {LCS_INPUT_LIMIT} characters");
        chars.truncate(LCS_INPUT_LIMIT);
    }
    chars
}

fn lcs_f1(lcs: usize, plen: usize, glen: usize) -> f64 {
    if plen == 0 && glen == 0 {
        return 1.0;
    }
    if plen == 0 || glen == 0 {
        return 0.0;
    }
    let p = lcs as f64 / plen as f64;
    let r = lcs as f64 / glen as f64;
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// LCS F-measure over character sequences.
pub fn rouge_l(pred: &str, gold: &str) -> f64 {
    let p = truncated_chars(pred);
    let g = truncated_chars(gold);
    lcs_f1(lcs_len(&p, &g), p.len(), g.len())
}

/// LCS F-measure over whitespace tokens, for comparability with word-level
/// tooling. Off the scoring path unless explicitly requested.
pub fn rouge_l_words(pred: &str, gold: &str) -> f64 {
    let p: Vec<&str> = pred.split_whitespace().collect();
    let g: Vec<&str> = gold.split_whitespace().collect();
    lcs_f1(lcs_len(&p, &g), p.len(), g.len())
}

/// RougeL with scores below the floor collapsed to 0; the boundary itself
/// is kept.
pub fn rouge_l_floored(pred: &str, gold: &str) -> f64 {
    let r = rouge_l(pred, gold);
    if r < ROUGE_FLOOR {
        0.0
    } else {
        r
    }
}

/// Sentence-level BLEU over whitespace tokens: n-gram precisions for
/// n=1..4 under add-one smoothing, geometric mean, brevity penalty.
pub fn bleu(pred: &str, gold: &str) -> f64 {
    let p: Vec<&str> = pred.split_whitespace().collect();
    let g: Vec<&str> = gold.split_whitespace().collect();
    if p.is_empty() && g.is_empty() {
        return 1.0;
    }
    if p.is_empty() || g.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=4usize {
        let candidates = p.len().saturating_sub(n - 1);
        let mut gold_counts: BTreeMap<&[&str], usize> = BTreeMap::new();
        if g.len() >= n {
            for w in g.windows(n) {
                *gold_counts.entry(w).or_insert(0) += 1;
            }
        }
        let mut matched = 0usize;
        if p.len() >= n {
            for w in p.windows(n) {
                if let Some(c) = gold_counts.get_mut(w) {
                    if *c > 0 {
                        *c -= 1;
                        matched += 1;
                    }
                }
            }
        }
        log_sum += (((matched + 1) as f64) / ((candidates + 1) as f64)).ln() / 4.0;
    }
    let bp = if p.len() >= g.len() {
        1.0
    } else {
        (1.0 - g.len() as f64 / p.len() as f64).exp()
    };
    bp * log_sum.exp()
}

/// Per-sample metric row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleScore {
    pub sample_id: String,
    pub exact: f64,
    pub rouge_l: f64,
    pub rouge_l_floored: f64,
    pub bleu: f64,
    /// True when no response was provided; all metrics are 0.
    pub missing: bool,
}

/// Arithmetic means over one aggregation key.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MetricMeans {
    pub count: usize,
    pub exact: f64,
    pub rouge_l: f64,
    pub rouge_l_floored: f64,
    pub bleu: f64,
}

/// The scored run: per-sample rows plus means keyed by language, task,
/// difficulty and overall.
#[derive(Debug, Clone, Serialize)]
pub struct ScoreReport {
    pub per_sample: Vec<SampleScore>,
    pub by_language: BTreeMap<Language, MetricMeans>,
    pub by_task: BTreeMap<String, MetricMeans>,
    pub by_difficulty: BTreeMap<Difficulty, MetricMeans>,
    pub overall: MetricMeans,
}

/// Scoring knobs.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScoreOptions {
    /// Use whitespace-token RougeL instead of the character-level default.
    pub token_level_rouge: bool,
}

/// Score each sample against the best of its canonical answer and aliases,
/// so an alias hit earns full credit on every metric. Missing responses
/// score 0 across the board and stay counted.
pub fn score_run(
    samples: &[Sample],
    responses: &BTreeMap<String, String>,
    options: ScoreOptions,
) -> Result<ScoreReport> {
    let known: std::collections::BTreeSet<&str> = samples.iter().map(|s| s.id.as_str()).collect();
    for id in responses.keys() {
        if !known.contains(id.as_str()) {
            return Err(Error::UnknownId(id.clone()));
        }
    }

    let rouge = if options.token_level_rouge { rouge_l_words } else { rouge_l };
    let mut per_sample = Vec::with_capacity(samples.len());
    for s in samples {
        let row = match responses.get(&s.id) {
            None => SampleScore {
                sample_id: s.id.clone(),
                exact: 0.0,
                rouge_l: 0.0,
                rouge_l_floored: 0.0,
                bleu: 0.0,
                missing: true,
            },
            Some(resp) => {
                let exact = f64::from(exact_match(resp, &s.answer, &s.answer_aliases));
                let mut best_rouge: f64 = 0.0;
                let mut best_bleu: f64 = 0.0;
                for gold in std::iter::once(&s.answer).chain(&s.answer_aliases) {
                    best_rouge = best_rouge.max(rouge(resp.trim(), gold));
                    best_bleu = best_bleu.max(bleu(resp.trim(), gold));
                }
                let floored = if best_rouge < ROUGE_FLOOR { 0.0 } else { best_rouge };
                SampleScore {
                    sample_id: s.id.clone(),
                    exact,
                    rouge_l: best_rouge,
                    rouge_l_floored: floored,
                    bleu: best_bleu,
                    missing: false,
                }
            }
        };
        per_sample.push(row);
    }

    let mut by_language: BTreeMap<Language, Vec<usize>> = BTreeMap::new();
    let mut by_task: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut by_difficulty: BTreeMap<Difficulty, Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        by_language.entry(s.meta.language).or_default().push(i);
        by_task.entry(s.meta.task_id.clone()).or_default().push(i);
        by_difficulty.entry(s.meta.difficulty).or_default().push(i);
    }
    let means = |idxs: &[usize]| {
        let n = idxs.len();
        let sum = |f: &dyn Fn(&SampleScore) -> f64| {
            idxs.iter().map(|&i| f(&per_sample[i])).sum::<f64>()
        };
        MetricMeans {
            count: n,
            exact: sum(&|r| r.exact) / n as f64,
            rouge_l: sum(&|r| r.rouge_l) / n as f64,
            rouge_l_floored: sum(&|r| r.rouge_l_floored) / n as f64,
            bleu: sum(&|r| r.bleu) / n as f64,
        }
    };

    let all: Vec<usize> = (0..per_sample.len()).collect();
    let overall = if all.is_empty() { MetricMeans::default() } else { means(&all) };
    Ok(ScoreReport {
        by_language: by_language.iter().map(|(k, v)| (*k, means(v))).collect(),
        by_task: by_task.iter().map(|(k, v)| (k.clone(), means(v))).collect(),
        by_difficulty: by_difficulty.iter().map(|(k, v)| (*k, means(v))).collect(),
        overall,
        per_sample,
    })
}

/// Metric columns selectable in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Exact,
    RougeL,
    RougeLFloored,
    Bleu,
}

impl Metric {
    pub const ALL: [Metric; 4] =
        [Metric::Exact, Metric::RougeL, Metric::RougeLFloored, Metric::Bleu];

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exact" | "em" => Ok(Metric::Exact),
            "rougel" | "rouge_l" => Ok(Metric::RougeL),
            "rougel_floored" | "rouge_l_floored" | "floored" => Ok(Metric::RougeLFloored),
            "bleu" => Ok(Metric::Bleu),
            other => Err(Error::Config(format!("unknown metric {other:?}"))),
        }
    }

    pub fn header(self) -> &'static str {
        match self {
            Metric::Exact => "exact",
            Metric::RougeL => "rouge_l",
            Metric::RougeLFloored => "rouge_l*",
            Metric::Bleu => "bleu",
        }
    }

    fn pick(self, m: &MetricMeans) -> f64 {
        match self {
            Metric::Exact => m.exact,
            Metric::RougeL => m.rouge_l,
            Metric::RougeLFloored => m.rouge_l_floored,
            Metric::Bleu => m.bleu,
        }
    }
}

/// Render the aggregate tables as aligned text, one block per grouping.
pub fn render_score_table(report: &ScoreReport, metrics: &[Metric]) -> String {
    let header = |label: &str| {
        let mut row = vec![label.to_string(), "count".to_string()];
        row.extend(metrics.iter().map(|m| m.header().to_string()));
        row
    };
    let line = |name: String, m: &MetricMeans| {
        let mut row = vec![name, m.count.to_string()];
        row.extend(metrics.iter().map(|metric| format!("{:.4}", metric.pick(m))));
        row
    };

    let mut blocks = Vec::new();
    let mut rows = vec![header("overall")];
    rows.push(line("all".to_string(), &report.overall));
    blocks.push(crate::dataset::align_rows(&rows));

    let mut rows = vec![header("difficulty")];
    for (k, m) in &report.by_difficulty {
        rows.push(line(k.to_string(), m));
    }
    blocks.push(crate::dataset::align_rows(&rows));

    let mut rows = vec![header("language")];
    for (k, m) in &report.by_language {
        rows.push(line(k.as_str().to_string(), m));
    }
    blocks.push(crate::dataset::align_rows(&rows));

    let mut rows = vec![header("task")];
    for (k, m) in &report.by_task {
        rows.push(line(k.clone(), m));
    }
    blocks.push(crate::dataset::align_rows(&rows));

    blocks.join("\n\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::SampleMeta;
    use crate::tasks::TaskCategory;

    const EPS: f64 = 1e-12;

    #[test]
    fn exact_match_cases() {
        assert!(exact_match("x", "x", &[]));
        assert!(exact_match(" 2 ", "2", &[]));
        assert!(!exact_match("2", "3", &[]));
        assert!(exact_match("no error", "No error.", &["no error".to_string()]));
        assert!(!exact_match("", "x", &[]));
        assert!(exact_match("", "", &[]));
    }

    #[test]
    fn rouge_l_frozen_values() {
        // Hand LCS: "abc"/"ac" share "ac", P=2/3, R=1, F=0.8.
        assert!((rouge_l("abc", "ac") - 0.8).abs() < EPS);
        // "abcd"/"dcba" share one character however aligned.
        assert!((rouge_l("abcd", "dcba") - 0.25).abs() < EPS);
        assert!((rouge_l("No error.", "No error.") - 1.0).abs() < EPS);
        assert_eq!(rouge_l("xyz", "abc"), 0.0, "disjoint alphabets");
        assert_eq!(rouge_l("", ""), 1.0);
        assert_eq!(rouge_l("a", ""), 0.0);
        assert_eq!(rouge_l("", "a"), 0.0);
        let r = rouge_l(
            "Missing key before colon at line 4.",
            "Missing key before colon at line 5.",
        );
        assert!((r - 0.9714285714285714).abs() < EPS);
    }

    #[test]
    fn rouge_l_is_symmetric() {
        for (a, b) in [("abc", "ac"), ("abcd", "dcba"), ("hello", "yellow"), ("", "x")] {
            assert!((rouge_l(a, b) - rouge_l(b, a)).abs() < EPS);
        }
    }

    #[test]
    fn rouge_floor_behavior() {
        // 0.25 < floor -> 0.
        assert_eq!(rouge_l_floored("abcd", "dcba"), 0.0);
        // Exactly at the boundary is kept: LCS 3 over two length-4 strings.
        let r = rouge_l("abcd", "abce");
        assert!((r - 0.75).abs() < EPS);
        assert!((rouge_l_floored("abcd", "abce") - 0.75).abs() < EPS);
        assert_eq!(rouge_l_floored("same", "same"), 1.0);
        for (p, g) in [("abc", "ac"), ("abcd", "dcba"), ("yes", "no")] {
            assert!(rouge_l_floored(p, g) <= rouge_l(p, g) + EPS);
            let f = rouge_l_floored(p, g);
            assert!(f == 0.0 || f >= ROUGE_FLOOR);
        }
    }

    #[test]
    fn rouge_word_level_variant() {
        // A near-miss token scores at the character level but not at the
        // word level.
        assert_eq!(rouge_l_words("colour", "color"), 0.0);
        assert!((rouge_l("colour", "color") - 10.0 / 11.0).abs() < EPS);
        assert!((rouge_l_words("a b c", "a b c") - 1.0).abs() < EPS);
        assert!((rouge_l_words("a b c", "a x c") - 2.0 / 3.0).abs() < EPS);
    }

    #[test]
    fn bleu_frozen_values() {
        // Cross-checked against an independent reference implementation.
        assert!((bleu("a b c", "a b c") - 1.0).abs() < EPS);
        assert!((bleu("2", "2") - 1.0).abs() < EPS);
        assert!((bleu("root->kid", "root->kid") - 1.0).abs() < EPS);
        // p1=3/4, p2=2/3, p3=1/2, p4=1 -> (1/4)^(1/4) = 2^-1/2.
        assert!((bleu("a b c", "a b d") - 0.7071067811865475).abs() < EPS);
        // p1=2/3, p2=1/2 -> (1/3)^(1/4).
        assert!((bleu("x y", "y z") - 0.7598356856515925).abs() < EPS);
        // Unigrams all match, the lone bigram does not -> 2^-1/4.
        assert!((bleu("b a", "a b") - 0.8408964152537145).abs() < EPS);
        assert_eq!(bleu("", "x"), 0.0, "empty prediction");
        assert_eq!(bleu("x", ""), 0.0);
        assert_eq!(bleu("", ""), 1.0);
    }

    #[test]
    fn bleu_brevity_penalty_applies() {
        // Prefix prediction: all its n-grams match but it is short.
        let full = bleu("a b c d", "a b c d");
        let short = bleu("a b", "a b c d");
        assert!(short < full);
        // BP = exp(1 - 4/2) = e^-1; precisions: p1=1, p2=1, p3=1/1... wait
        // c3 = 0 -> p3 = 1, c4 = 0 -> p4 = 1. So bleu = e^-1.
        assert!((short - (-1.0f64).exp()).abs() < EPS);
    }

    fn sample(id: &str, lang: Language, task: &str, diff: Difficulty, answer: &str, aliases: &[&str]) -> Sample {
        Sample {
            id: id.to_string(),
            reference: "ref".into(),
            question: "q".into(),
            requirement: "r".into(),
            answer: answer.to_string(),
            answer_aliases: aliases.iter().map(|s| s.to_string()).collect(),
            hint: "h".into(),
            meta: SampleMeta {
                language: lang,
                task_id: task.to_string(),
                category: TaskCategory::TextRetrieval,
                difficulty: diff,
                seed: 0,
                node_count: 1,
                reference_chars: 3,
                depth: 0,
                width: 0,
            },
        }
    }

    fn fixture() -> Vec<Sample> {
        vec![
            sample("tree.height/standard/0", Language::Tree, "tree.height", Difficulty::Standard, "3", &[]),
            sample("tree.height/standard/1", Language::Tree, "tree.height", Difficulty::Standard, "5", &[]),
            sample("json.syntax/hard/0", Language::Json, "json.syntax", Difficulty::Hard, "No error.", &["No error", "no error"]),
        ]
    }

    #[test]
    fn score_run_on_a_hand_averaged_fixture() {
        let samples = fixture();
        let mut responses = BTreeMap::new();
        responses.insert("tree.height/standard/0".to_string(), "3".to_string());
        responses.insert("tree.height/standard/1".to_string(), "4".to_string());
        responses.insert("json.syntax/hard/0".to_string(), "No error.".to_string());
        let report = score_run(&samples, &responses, ScoreOptions::default()).unwrap();

        // Hand per-sample: exact 1, 0, 1. Rouge: 1, 0, 1. Bleu: 1, ~, 1.
        assert_eq!(report.per_sample.len(), 3);
        assert_eq!(report.per_sample[0].exact, 1.0);
        assert_eq!(report.per_sample[1].exact, 0.0);
        assert_eq!(report.per_sample[1].rouge_l, 0.0, "4 vs 5 share nothing");
        assert_eq!(report.per_sample[2].exact, 1.0);
        assert!((report.overall.exact - 2.0 / 3.0).abs() < EPS);
        assert_eq!(report.overall.count, 3);

        // Weighted mean of language means reproduces the overall mean.
        let weighted: f64 = report
            .by_language
            .values()
            .map(|m| m.exact * m.count as f64)
            .sum::<f64>()
            / report.per_sample.len() as f64;
        assert!((weighted - report.overall.exact).abs() < EPS);

        assert_eq!(report.by_difficulty[&Difficulty::Standard].count, 2);
        assert_eq!(report.by_difficulty[&Difficulty::Hard].count, 1);
        assert!((report.by_task["tree.height"].exact - 0.5).abs() < EPS);
    }

    #[test]
    fn alias_hits_earn_full_credit_everywhere() {
        let samples = fixture();
        let mut responses = BTreeMap::new();
        responses.insert("json.syntax/hard/0".to_string(), "no error".to_string());
        let report = score_run(&samples, &responses, ScoreOptions::default()).unwrap();
        let row = &report.per_sample[2];
        assert_eq!(row.exact, 1.0);
        assert_eq!(row.rouge_l, 1.0, "scored against the best alias");
        assert_eq!(row.bleu, 1.0);
    }

    #[test]
    fn missing_responses_score_zero_and_stay_counted() {
        let samples = fixture();
        let report = score_run(&samples, &BTreeMap::new(), ScoreOptions::default()).unwrap();
        assert_eq!(report.per_sample.len(), 3);
        assert!(report.per_sample.iter().all(|r| r.missing));
        assert_eq!(report.overall.exact, 0.0);
        assert_eq!(report.overall.rouge_l, 0.0);
        assert_eq!(report.overall.count, 3);
    }

    #[test]
    fn unknown_response_ids_are_rejected() {
        let samples = fixture();
        let mut responses = BTreeMap::new();
        responses.insert("nope/standard/0".to_string(), "x".to_string());
        assert!(matches!(
            score_run(&samples, &responses, ScoreOptions::default()),
            Err(Error::UnknownId(_))
        ));
    }

    #[test]
    fn token_rouge_option_switches_the_metric() {
        let samples = vec![sample(
            "a/standard/0",
            Language::Tree,
            "tree.height",
            Difficulty::Standard,
            "color",
            &[],
        )];
        let mut responses = BTreeMap::new();
        responses.insert("a/standard/0".to_string(), "colour".to_string());
        let char_level = score_run(&samples, &responses, ScoreOptions::default()).unwrap();
        let word_level = score_run(
            &samples,
            &responses,
            ScoreOptions { token_level_rouge: true },
        )
        .unwrap();
        assert!(word_level.per_sample[0].rouge_l < char_level.per_sample[0].rouge_l);
    }

    #[test]
    fn score_table_renders_requested_columns() {
        let samples = fixture();
        let mut responses = BTreeMap::new();
        responses.insert("tree.height/standard/0".to_string(), "3".to_string());
        let report = score_run(&samples, &responses, ScoreOptions::default()).unwrap();
        let table = render_score_table(&report, &Metric::ALL);
        assert!(table.contains("overall"));
        assert!(table.contains("rouge_l*"));
        assert!(table.contains("tree.height"));
        let narrow = render_score_table(&report, &[Metric::Exact]);
        assert!(!narrow.contains("bleu"));
        assert!(narrow.contains("exact"));
    }

    #[test]
    fn metric_names_parse() {
        assert_eq!(Metric::parse("exact").unwrap(), Metric::Exact);
        assert_eq!(Metric::parse("em").unwrap(), Metric::Exact);
        assert_eq!(Metric::parse("rougel").unwrap(), Metric::RougeL);
        assert_eq!(Metric::parse("rouge_l_floored").unwrap(), Metric::RougeLFloored);
        assert_eq!(Metric::parse("bleu").unwrap(), Metric::Bleu);
        assert!(Metric::parse("f1").is_err());
    }

    #[test]
    fn truncation_guard_does_not_change_short_inputs() {
        let long = "a".repeat(30_000);
        // Must terminate quickly and stay in range.
        let r = rouge_l(&long, "aaa");
        assert!((0.0..=1.0).contains(&r));
        assert!((rouge_l("abc", "abc") - 1.0).abs() < EPS);
    }
}
