//! strux: generate, inspect, prompt, run and score structure reasoning
//! suites from the command line.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use strux_core::dataset::{
    align_rows, audit_suite, generate_sample, generate_suite, read_suite, render_stats_table,
    suite_stats, write_suite, Difficulty, DifficultyProfile, SuiteConfig,
};
use strux_core::error::{Error, Result};
use strux_core::metrics::{render_score_table, score_run, Metric, ScoreOptions};
use strux_core::prompts::{
    assemble_all, read_prompts, write_prompts, PromptMode, PromptTemplates,
};
use strux_core::render::Language;
use strux_core::runner::{responses_of, run_prompts, EndpointConfig};
use strux_core::tasks::all_tasks;

#[derive(Parser)]
#[command(name = "strux", version, about = "Structure reasoning benchmark toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a suite file and print its statistics.
    Gen(GenArgs),
    /// Print the statistics table of an existing suite.
    Stats(SuiteArgs),
    /// Re-derive every stored answer; nonzero exit on any mismatch.
    Audit(SuiteArgs),
    /// Assemble prompts for a suite under one prompt mode.
    Prompt(PromptArgs),
    /// Send assembled prompts to a chat-completion endpoint.
    Run(RunArgs),
    /// Score a run against its suite and print the aggregate tables.
    Score(ScoreArgs),
    /// List the task catalogue, or show one worked sample.
    Demo(DemoArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Built-in recipe: "test" or "test-hard".
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// TOML recipe file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output suite file (JSON lines).
    #[arg(long)]
    out: PathBuf,
    /// Suite seed; the whole suite is a pure function of it.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma separated format filter (names or aliases like csv, md).
    #[arg(long, value_delimiter = ',')]
    languages: Option<Vec<String>>,
    /// Comma separated task id filter.
    #[arg(long, value_delimiter = ',')]
    tasks: Option<Vec<String>>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Suite file to read.
    #[arg(long)]
    suite: PathBuf,
}

#[derive(Args)]
struct PromptArgs {
    /// Suite file to assemble prompts for.
    #[arg(long)]
    suite: PathBuf,
    /// One of: naive, self_cot, ps_cot, with_hint, few_shot, simple_few_shot.
    #[arg(long)]
    mode: String,
    /// Demo count for the shot modes.
    #[arg(long, default_value_t = 3)]
    shots: usize,
    /// Demo pool suite file; required by the shot modes.
    #[arg(long)]
    demos: Option<PathBuf>,
    /// Template file overriding the built-in prompts.
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Output prompt file (JSON lines).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Prompt file produced by the prompt command.
    #[arg(long)]
    prompts: PathBuf,
    /// Endpoint TOML config; the API key is read from the environment
    /// variable it names, never from the file.
    #[arg(long)]
    endpoint: PathBuf,
    /// Output run file (JSON lines, appended on resume).
    #[arg(long)]
    out: PathBuf,
    /// Produce placeholder records without any network traffic.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Args)]
struct ScoreArgs {
    /// Suite file holding the gold answers.
    #[arg(long)]
    suite: PathBuf,
    /// Run file holding the responses.
    #[arg(long)]
    responses: PathBuf,
    /// Comma separated metric columns (exact, rougel, rougel_floored, bleu).
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<String>>,
    /// Also write the per-sample scores to this file (JSON lines).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Compute RougeL over whitespace tokens instead of characters.
    #[arg(long)]
    token_rouge: bool,
}

#[derive(Args)]
struct DemoArgs {
    /// Task id to demonstrate; omitted, lists the catalogue.
    #[arg(long)]
    task: Option<String>,
    #[arg(long, default_value = "standard")]
    difficulty: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    // Die quietly when a pipe closes, like other line-oriented tools.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 1 usage, 2 validation or audit, 3 endpoint.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::AuthFailed(_) | Error::Endpoint(_) => 3,
        Error::AuditFailed(..)
        | Error::MalformedRecord { .. }
        | Error::Parse { .. }
        | Error::Grammar { .. }
        | Error::DuplicateId(_)
        | Error::UnknownId(_)
        | Error::UnknownValue(_)
        | Error::UnknownSection(_) => 2,
        _ => 1,
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Audit(args) => cmd_audit(args),
        Command::Prompt(args) => cmd_prompt(args),
        Command::Run(args) => cmd_run(args),
        Command::Score(args) => cmd_score(args),
        Command::Demo(args) => cmd_demo(args),
    }
}

/// Optional fields of the suite recipe file; anything omitted falls back
/// to the test preset defaults for the chosen difficulty.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    suite_seed: Option<u64>,
    per_task_count: Option<u32>,
    difficulty: Option<Difficulty>,
    profile: Option<DifficultyProfile>,
    p_clean: Option<f64>,
    languages: Option<Vec<String>>,
    tasks: Option<Vec<String>>,
}

fn profile_for(difficulty: Difficulty) -> DifficultyProfile {
    match difficulty {
        Difficulty::Standard => DifficultyProfile::standard(),
        Difficulty::Hard => DifficultyProfile::hard(),
    }
}

fn parse_languages(names: &[String]) -> Result<Vec<Language>> {
    names
        .iter()
        .map(|n| {
            Language::parse(n).ok_or_else(|| Error::Config(format!("unknown language {n:?}")))
        })
        .collect()
}

fn resolve_suite_config(args: &GenArgs) -> Result<SuiteConfig> {
    let mut config = match (&args.preset, &args.config) {
        (Some(name), None) => SuiteConfig::preset(name, args.seed.unwrap_or(0))?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let file: SuiteFile = toml::from_str(&text)
                .map_err(|e| Error::Config(format!("bad config file: {e}")))?;
            let difficulty = file.difficulty.unwrap_or(Difficulty::Standard);
            SuiteConfig {
                suite_seed: file.suite_seed.unwrap_or(0),
                per_task_count: file.per_task_count.unwrap_or(128),
                difficulty,
                profile: file.profile.unwrap_or_else(|| profile_for(difficulty)),
                p_clean: file.p_clean.unwrap_or(0.5),
                languages: file.languages.as_deref().map(parse_languages).transpose()?,
                tasks: file.tasks,
            }
        }
        (None, None) => {
            return Err(Error::Config("pass --preset or --config".to_string()));
        }
        (Some(_), Some(_)) => unreachable!("clap conflict"),
    };
    if let Some(seed) = args.seed {
        config.suite_seed = seed;
    }
    if let Some(names) = &args.languages {
        config.languages = Some(parse_languages(names)?);
    }
    if let Some(tasks) = &args.tasks {
        config.tasks = Some(tasks.clone());
    }
    Ok(config)
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let config = resolve_suite_config(&args)?;
    let samples = generate_suite(&config)?;
    write_suite(&samples, &args.out)?;
    println!("{}", render_stats_table(&suite_stats(&samples)));
    println!();
    println!("wrote {} samples to {}", samples.len(), args.out.display());
    Ok(())
}

fn cmd_stats(args: SuiteArgs) -> Result<()> {
    let samples = read_suite(&args.suite)?;
    println!("{}", render_stats_table(&suite_stats(&samples)));
    println!();
    println!("{} samples", samples.len());
    Ok(())
}

fn clip(s: &str) -> String {
    let one_line = s.replace('\n', "\\n");
    if one_line.chars().count() > 60 {
        let cut: String = one_line.chars().take(57).collect();
        format!("{cut}...")
    } else {
        one_line
    }
}

fn cmd_audit(args: SuiteArgs) -> Result<()> {
    let samples = read_suite(&args.suite)?;
    let report = audit_suite(&samples);
    if report.ok() {
        println!("audit passed: {} samples re-derived", report.checked);
        return Ok(());
    }
    for m in &report.mismatches {
        println!(
            "mismatch {} [{}]: expected {:?}, got {:?}",
            m.sample_id,
            m.field,
            clip(&m.expected),
            clip(&m.got)
        );
    }
    Err(Error::AuditFailed(report.mismatches.len(), report.checked))
}

fn cmd_prompt(args: PromptArgs) -> Result<()> {
    let mode = PromptMode::from_flags(&args.mode, args.shots)?;
    if mode.needs_demos() && args.demos.is_none() {
        return Err(Error::Config(format!("mode {} requires --demos", mode.label())));
    }
    let samples = read_suite(&args.suite)?;
    let demo_pool = match &args.demos {
        Some(path) => read_suite(path)?,
        None => Vec::new(),
    };
    let templates = match &args.templates {
        Some(path) => PromptTemplates::parse(&std::fs::read_to_string(path)?)?,
        None => PromptTemplates::builtin(),
    };
    let records = assemble_all(&samples, &mode, &demo_pool, &templates)?;
    let mut w = BufWriter::new(File::create(&args.out)?);
    write_prompts(&mut w, &records)?;
    w.flush()?;
    println!("wrote {} prompts ({}) to {}", records.len(), mode.label(), args.out.display());
    Ok(())
}

fn read_endpoint(path: &Path) -> Result<EndpointConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg: EndpointConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("bad endpoint file: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let prompts = read_prompts(BufReader::new(File::open(&args.prompts)?))?;
    let cfg = read_endpoint(&args.endpoint)?;
    let records = run_prompts(&prompts, &cfg, &args.out, args.dry_run)?;
    let errors = records.iter().filter(|r| r.error.is_some()).count();
    println!(
        "run complete: {} records ({} errors) in {}",
        records.len(),
        errors,
        args.out.display()
    );
    Ok(())
}

fn cmd_score(args: ScoreArgs) -> Result<()> {
    let samples = read_suite(&args.suite)?;
    let run = strux_core::runner::read_run(BufReader::new(File::open(&args.responses)?))?;
    let responses = responses_of(&run);
    let metrics: Vec<Metric> = match &args.metrics {
        Some(names) => names.iter().map(|n| Metric::parse(n)).collect::<Result<_>>()?,
        None => Metric::ALL.to_vec(),
    };
    let report = score_run(
        &samples,
        &responses,
        ScoreOptions { token_level_rouge: args.token_rouge },
    )?;
    let missing = report.per_sample.iter().filter(|r| r.missing).count();
    if missing > 0 {
        eprintln!("warning: {missing} of {} samples have no response; scored 0", samples.len());
    }
    println!("{}", render_score_table(&report, &metrics));
    if let Some(path) = &args.report {
        let mut w = BufWriter::new(File::create(path)?);
        for row in &report.per_sample {
            serde_json::to_writer(&mut w, row)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        println!();
        println!("wrote per-sample report to {}", path.display());
    }
    Ok(())
}

fn cmd_demo(args: DemoArgs) -> Result<()> {
    let Some(task_id) = &args.task else {
        let mut rows = vec![vec![
            "task".to_string(),
            "format".to_string(),
            "category".to_string(),
        ]];
        for t in all_tasks() {
            rows.push(vec![
                t.task_id.to_string(),
                t.language.as_str().to_string(),
                t.category.as_str().to_string(),
            ]);
        }
        println!("{}", align_rows(&rows));
        println!();
        println!("show one: strux demo --task <id> [--difficulty hard] [--seed n]");
        return Ok(());
    };
    let spec = strux_core::tasks::find_task(task_id)?;
    let difficulty = Difficulty::parse(&args.difficulty)?;
    let config = SuiteConfig {
        suite_seed: args.seed,
        per_task_count: 1,
        difficulty,
        profile: profile_for(difficulty),
        p_clean: 0.5,
        languages: None,
        tasks: Some(vec![task_id.clone()]),
    };
    let sample = generate_sample(spec, &config, 0)?;
    println!("task:        {} ({}, {})", spec.task_id, spec.language, spec.category.as_str());
    println!("sample id:   {}", sample.id);
    println!("difficulty:  {}", sample.meta.difficulty);
    println!("seed:        {:#x}", sample.meta.seed);
    println!();
    println!("reference:");
    println!("{}", sample.reference);
    println!();
    println!("question:    {}", sample.question);
    println!("requirement: {}", sample.requirement);
    println!("answer:");
    println!("{}", sample.answer);
    if !sample.answer_aliases.is_empty() {
        println!("aliases:     {:?}", sample.answer_aliases);
    }
    Ok(())
}
