//! Batch execution of prompts against a chat-completion endpoint, with
//! incremental persistence, resume, retries and rate limiting.

use std::collections::BTreeSet;
use std::collections::VecDeque;
use std::fs::OpenOptions;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prompts::PromptRecord;

const RETRY_BASE_MS: u64 = 250;
const RETRY_CAP_MS: u64 = 8_000;

fn default_api_key_env() -> String {
    "STRUX_API_KEY".to_string()
}
fn default_max_tokens() -> u32 {
    512
}
fn default_timeout() -> u64 {
    30
}
fn default_retries() -> u32 {
    3
}
fn default_rate_limit() -> u32 {
    60
}
fn default_parallelism() -> usize {
    4
}

/// Where and how to send requests. The API key is named by environment
/// variable and read at call time; it never appears in any persisted file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model_name: String,
    #[serde(default = "default_api_key_env")]
    pub api_key_env: String,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    /// Defaults to 0 for reproducibility.
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_timeout")]
    pub request_timeout_secs: u64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    /// Requests per minute, enforced as a minimum spacing between sends.
    #[serde(default = "default_rate_limit")]
    pub rate_limit_per_min: u32,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

impl EndpointConfig {
    pub fn validate(&self) -> Result<()> {
        if self.base_url.is_empty() {
            return Err(Error::Config("base_url must be set".to_string()));
        }
        if self.request_timeout_secs == 0 {
            return Err(Error::Config("request_timeout_secs must be positive".to_string()));
        }
        if self.rate_limit_per_min == 0 {
            return Err(Error::Config("rate_limit_per_min must be positive".to_string()));
        }
        if self.parallelism == 0 {
            return Err(Error::Config("parallelism must be at least 1".to_string()));
        }
        Ok(())
    }
}

/// One persisted call: exactly one of response and error is present.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    pub sample_id: String,
    pub prompt: String,
    pub response: Option<String>,
    pub latency_ms: u64,
    pub attempt_count: u32,
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dry_run: bool,
}

/// Reads a run file; blank lines are skipped.
pub fn read_run<R: std::io::BufRead>(r: R) -> Result<Vec<RunRecord>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RunRecord = serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

/// Successful responses keyed by sample id, the shape scoring expects.
/// Error records are omitted so they score as missing.
pub fn responses_of(records: &[RunRecord]) -> std::collections::BTreeMap<String, String> {
    records
        .iter()
        .filter_map(|r| r.response.as_ref().map(|resp| (r.sample_id.clone(), resp.clone())))
        .collect()
}

/// Loads prior records for resume. A malformed final line is treated as a
/// crash artifact and truncated away; a malformed interior line is an error.
fn load_for_resume(path: &Path) -> Result<Vec<RunRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = std::fs::read_to_string(path)?;
    let mut records = Vec::new();
    let mut offset = 0usize;
    let mut line_no = 0usize;
    for line in text.split_inclusive('\n') {
        line_no += 1;
        let trimmed = line.trim_end_matches('\n');
        if trimmed.trim().is_empty() {
            offset += line.len();
            continue;
        }
        match serde_json::from_str::<RunRecord>(trimmed) {
            Ok(r) => {
                records.push(r);
                offset += line.len();
            }
            Err(e) => {
                let is_last = offset + line.len() == text.len();
                if is_last {
                    log::warn!("truncating partial final line in {}", path.display());
                    let file = OpenOptions::new().write(true).open(path)?;
                    file.set_len(offset as u64)?;
                    return Ok(records);
                }
                return Err(Error::MalformedRecord { line: line_no, message: e.to_string() });
            }
        }
    }
    Ok(records)
}

/// Spaces sends so the observed rate stays at or under the configured
/// requests per minute in any window.
struct RateLimiter {
    next_slot: Mutex<Instant>,
    interval: Duration,
}

impl RateLimiter {
    fn new(per_min: u32) -> Self {
        RateLimiter {
            next_slot: Mutex::new(Instant::now()),
            interval: Duration::from_secs_f64(60.0 / f64::from(per_min)),
        }
    }

    fn acquire(&self) {
        let start = {
            let mut slot = self.next_slot.lock().unwrap();
            let now = Instant::now();
            let start = (*slot).max(now);
            *slot = start + self.interval;
            start
        };
        let now = Instant::now();
        if start > now {
            std::thread::sleep(start - now);
        }
    }
}

enum CallOutcome {
    Ok(String),
    Transient(String),
    Permanent(String),
    AuthFailure(u16),
}

fn call_once(
    client: &reqwest::blocking::Client,
    cfg: &EndpointConfig,
    api_key: &str,
    prompt: &str,
) -> CallOutcome {
    let body = serde_json::json!({
        "model": cfg.model_name,
        "messages": [{"role": "user", "content": prompt}],
        "max_tokens": cfg.max_tokens,
        "temperature": cfg.temperature,
    });
    let sent = client
        .post(format!("{}/chat/completions", cfg.base_url.trim_end_matches('/')))
        .bearer_auth(api_key)
        .json(&body)
        .send();
    let response = match sent {
        Ok(r) => r,
        Err(e) => return CallOutcome::Transient(format!("request failed: {e}")),
    };
    let status = response.status().as_u16();
    match status {
        200 => {}
        401 | 403 => return CallOutcome::AuthFailure(status),
        429 | 500..=599 => return CallOutcome::Transient(format!("HTTP {status}")),
        other => return CallOutcome::Permanent(format!("HTTP {other}")),
    }
    let parsed: std::result::Result<serde_json::Value, _> = response.json();
    match parsed {
        Ok(v) => match v
            .get("choices")
            .and_then(|c| c.get(0))
            .and_then(|c| c.get("message"))
            .and_then(|m| m.get("content"))
            .and_then(|c| c.as_str())
        {
            Some(content) => CallOutcome::Ok(content.to_string()),
            None => CallOutcome::Permanent("response body lacks choices[0].message.content".into()),
        },
        Err(e) => CallOutcome::Permanent(format!("unparseable response body: {e}")),
    }
}

/// Runs one prompt to completion: retries transient failures with
/// exponential backoff, reports auth failures upward to abort the run.
fn execute(
    client: &reqwest::blocking::Client,
    cfg: &EndpointConfig,
    api_key: &str,
    limiter: &RateLimiter,
    abort: &AtomicBool,
    record: &PromptRecord,
) -> std::result::Result<RunRecord, u16> {
    let started = Instant::now();
    let mut attempts = 0u32;
    loop {
        if abort.load(Ordering::SeqCst) {
            return Ok(RunRecord {
                sample_id: record.sample_id.clone(),
                prompt: record.prompt.clone(),
                response: None,
                latency_ms: started.elapsed().as_millis() as u64,
                attempt_count: attempts,
                error: Some("run aborted".to_string()),
                dry_run: false,
            });
        }
        limiter.acquire();
        attempts += 1;
        match call_once(client, cfg, api_key, &record.prompt) {
            CallOutcome::Ok(content) => {
                return Ok(RunRecord {
                    sample_id: record.sample_id.clone(),
                    prompt: record.prompt.clone(),
                    response: Some(content),
                    latency_ms: started.elapsed().as_millis() as u64,
                    attempt_count: attempts,
                    error: None,
                    dry_run: false,
                })
            }
            CallOutcome::AuthFailure(status) => return Err(status),
            CallOutcome::Permanent(message) => {
                return Ok(RunRecord {
                    sample_id: record.sample_id.clone(),
                    prompt: record.prompt.clone(),
                    response: None,
                    latency_ms: started.elapsed().as_millis() as u64,
                    attempt_count: attempts,
                    error: Some(message),
                    dry_run: false,
                })
            }
            CallOutcome::Transient(message) => {
                if attempts > cfg.max_retries {
                    return Ok(RunRecord {
                        sample_id: record.sample_id.clone(),
                        prompt: record.prompt.clone(),
                        response: None,
                        latency_ms: started.elapsed().as_millis() as u64,
                        attempt_count: attempts,
                        error: Some(format!("retries exhausted: {message}")),
                        dry_run: false,
                    });
                }
                let backoff = (RETRY_BASE_MS << (attempts - 1).min(16)).min(RETRY_CAP_MS);
                std::thread::sleep(Duration::from_millis(backoff));
            }
        }
    }
}

/// Sends every prompt not already answered in `out_path`, appending records
/// as they complete. Returns all records in the file, prior ones first.
/// Auth failures abort the whole run.
pub fn run_prompts(
    prompts: &[PromptRecord],
    cfg: &EndpointConfig,
    out_path: &Path,
    dry_run: bool,
) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let existing = load_for_resume(out_path)?;
    let done: BTreeSet<&str> = existing.iter().map(|r| r.sample_id.as_str()).collect();
    let todo: Vec<&PromptRecord> =
        prompts.iter().filter(|p| !done.contains(p.sample_id.as_str())).collect();

    let file = OpenOptions::new().create(true).append(true).open(out_path)?;
    let writer = Mutex::new(BufWriter::new(file));
    let persist = |record: &RunRecord| -> Result<()> {
        let mut w = writer.lock().unwrap();
        serde_json::to_writer(&mut *w, record)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    };

    let mut new_records: Vec<RunRecord> = Vec::new();
    if dry_run {
        for p in todo {
            let record = RunRecord {
                sample_id: p.sample_id.clone(),
                prompt: p.prompt.clone(),
                response: Some(String::new()),
                latency_ms: 0,
                attempt_count: 0,
                error: None,
                dry_run: true,
            };
            persist(&record)?;
            new_records.push(record);
        }
        let mut all = existing;
        all.extend(new_records);
        return Ok(all);
    }

    let api_key = std::env::var(&cfg.api_key_env).map_err(|_| {
        Error::Config(format!("API key environment variable {} is not set", cfg.api_key_env))
    })?;
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(cfg.request_timeout_secs))
        .build()
        .map_err(|e| Error::Endpoint(format!("client build failed: {e}")))?;

    let queue: Mutex<VecDeque<&PromptRecord>> = Mutex::new(todo.into_iter().collect());
    let limiter = RateLimiter::new(cfg.rate_limit_per_min);
    let abort = AtomicBool::new(false);
    let auth_status = Mutex::new(None::<u16>);
    let collected: Mutex<Vec<RunRecord>> = Mutex::new(Vec::new());
    let persist_error: Mutex<Option<Error>> = Mutex::new(None);

    std::thread::scope(|scope| {
        for _ in 0..cfg.parallelism.max(1) {
            scope.spawn(|| loop {
                if abort.load(Ordering::SeqCst) {
                    break;
                }
                let next = queue.lock().unwrap().pop_front();
                let Some(record) = next else { break };
                match execute(&client, cfg, &api_key, &limiter, &abort, record) {
                    Ok(run_record) => {
                        if let Err(e) = persist(&run_record) {
                            *persist_error.lock().unwrap() = Some(e);
                            abort.store(true, Ordering::SeqCst);
                            break;
                        }
                        collected.lock().unwrap().push(run_record);
                    }
                    Err(status) => {
                        *auth_status.lock().unwrap() = Some(status);
                        abort.store(true, Ordering::SeqCst);
                        break;
                    }
                }
            });
        }
    });

    if let Some(e) = persist_error.into_inner().unwrap() {
        return Err(e);
    }
    if let Some(status) = auth_status.into_inner().unwrap() {
        return Err(Error::AuthFailed(status));
    }
    let mut all = existing;
    all.extend(collected.into_inner().unwrap());
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mockserver::{extract_prompt, MockReply, MockServer};
    use std::sync::atomic::AtomicUsize;

    fn prompt(id: &str, text: &str) -> PromptRecord {
        PromptRecord { sample_id: id.to_string(), mode: "naive".to_string(), prompt: text.to_string() }
    }

    fn config(base_url: &str, key_env: &str) -> EndpointConfig {
        EndpointConfig {
            base_url: base_url.to_string(),
            model_name: "test-model".to_string(),
            api_key_env: key_env.to_string(),
            max_tokens: 16,
            temperature: 0.0,
            request_timeout_secs: 5,
            max_retries: 3,
            rate_limit_per_min: 6_000,
            parallelism: 2,
        }
    }

    #[test]
    fn dry_run_touches_no_network() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.jsonl");
        // Port 9 is the discard service; nothing should ever connect.
        let cfg = config("http://127.0.0.1:9", "STRUX_UNSET_KEY");
        let prompts = vec![prompt("a/standard/0", "p1"), prompt("b/standard/0", "p2")];
        let records = run_prompts(&prompts, &cfg, &out, true).unwrap();
        assert_eq!(records.len(), 2);
        assert!(records.iter().all(|r| r.dry_run));
        assert!(records.iter().all(|r| r.response.as_deref() == Some("")));
        assert!(records.iter().all(|r| r.error.is_none()));
        let back = read_run(std::io::BufReader::new(std::fs::File::open(&out).unwrap())).unwrap();
        assert_eq!(back.len(), 2);
        assert!(back[0].dry_run);
    }

    #[test]
    fn echoes_prompts_end_to_end_and_persists() {
        std::env::set_var("STRUX_TEST_KEY_ECHO", "sk-echo");
        let server = MockServer::start(|_, req| {
            let prompt = extract_prompt(&req.body).unwrap();
            MockReply::content(&format!("echo {prompt}"))
        });
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.jsonl");
        let cfg = config(&server.base_url(), "STRUX_TEST_KEY_ECHO");
        let prompts = vec![prompt("a/standard/0", "one"), prompt("b/standard/0", "two")];
        let records = run_prompts(&prompts, &cfg, &out, false).unwrap();
        assert_eq!(records.len(), 2);
        for r in &records {
            assert_eq!(r.attempt_count, 1);
            assert!(r.error.is_none());
        }
        let map = responses_of(&records);
        assert_eq!(map["a/standard/0"], "echo one");
        assert_eq!(map["b/standard/0"], "echo two");

        // The wire carries the agreed envelope and the bearer key.
        let hits = server.hits();
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[0].path, "/chat/completions");
        assert_eq!(hits[0].authorization.as_deref(), Some("Bearer sk-echo"));
        let body: serde_json::Value = serde_json::from_str(&hits[0].body).unwrap();
        assert_eq!(body["model"], "test-model");
        assert_eq!(body["messages"][0]["role"], "user");
        assert_eq!(body["temperature"], 0.0);

        // No secret material lands in the run file.
        let raw = std::fs::read_to_string(&out).unwrap();
        assert!(!raw.contains("sk-echo"));
    }

    #[test]
    fn resume_skips_already_recorded_ids() {
        std::env::set_var("STRUX_TEST_KEY_RESUME", "sk-r");
        let server = MockServer::start(|_, _| MockReply::content("ok"));
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.jsonl");
        let cfg = config(&server.base_url(), "STRUX_TEST_KEY_RESUME");
        let first = vec![prompt("a/standard/0", "p1"), prompt("b/standard/0", "p2")];
        run_prompts(&first, &cfg, &out, false).unwrap();
        assert_eq!(server.hit_count(), 2);

        let second = vec![
            prompt("a/standard/0", "p1"),
            prompt("b/standard/0", "p2"),
            prompt("c/standard/0", "p3"),
        ];
        let records = run_prompts(&second, &cfg, &out, false).unwrap();
        assert_eq!(server.hit_count(), 3, "only the new id is sent");
        assert_eq!(records.len(), 3);
        let ids: BTreeSet<&str> = records.iter().map(|r| r.sample_id.as_str()).collect();
        assert_eq!(ids.len(), 3, "no duplicate ids");
    }

    #[test]
    fn resume_truncates_a_partial_final_line() {
        std::env::set_var("STRUX_TEST_KEY_TRUNC", "sk-t");
        let server = MockServer::start(|_, _| MockReply::content("ok"));
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.jsonl");
        let cfg = config(&server.base_url(), "STRUX_TEST_KEY_TRUNC");
        run_prompts(&[prompt("a/standard/0", "p1")], &cfg, &out, false).unwrap();
        // Simulate a crash mid-write.
        let mut f = OpenOptions::new().append(true).open(&out).unwrap();
        f.write_all(b"{\"sample_id\": \"b/standard/0\", \"prom").unwrap();
        drop(f);

        let records = run_prompts(
            &[prompt("a/standard/0", "p1"), prompt("b/standard/0", "p2")],
            &cfg,
            &out,
            false,
        )
        .unwrap();
        assert_eq!(records.len(), 2);
        let back = read_run(std::io::BufReader::new(std::fs::File::open(&out).unwrap())).unwrap();
        assert_eq!(back.len(), 2);
    }

    #[test]
    fn transient_failures_retry_with_backoff_then_succeed() {
        std::env::set_var("STRUX_TEST_KEY_RETRY", "sk-re");
        let failures = AtomicUsize::new(0);
        let server = MockServer::start(move |_, _| {
            if failures.fetch_add(1, Ordering::SeqCst) < 2 {
                MockReply::status(500, "{}")
            } else {
                MockReply::content("finally")
            }
        });
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.jsonl");
        let cfg = config(&server.base_url(), "STRUX_TEST_KEY_RETRY");
        let records = run_prompts(&[prompt("a/standard/0", "p")], &cfg, &out, false).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].attempt_count, 3);
        assert_eq!(records[0].response.as_deref(), Some("finally"));
        assert!(records[0].latency_ms >= 750, "two backoff sleeps elapsed");
    }

    #[test]
    fn exhausted_retries_become_an_error_record() {
        std::env::set_var("STRUX_TEST_KEY_FAIL", "sk-f");
        let server = MockServer::start(|_, _| MockReply::status(503, "{}"));
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.jsonl");
        let mut cfg = config(&server.base_url(), "STRUX_TEST_KEY_FAIL");
        cfg.max_retries = 1;
        let records = run_prompts(&[prompt("a/standard/0", "p")], &cfg, &out, false).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].attempt_count, 2);
        assert!(records[0].response.is_none());
        let message = records[0].error.as_deref().unwrap();
        assert!(message.contains("retries exhausted"));
        // Error records are absent from the scoring map, hence scored 0.
        assert!(responses_of(&records).is_empty());
    }

    #[test]
    fn auth_failure_aborts_the_whole_run() {
        std::env::set_var("STRUX_TEST_KEY_AUTH", "sk-bad");
        let server = MockServer::start(|_, _| MockReply::status(401, "{}"));
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.jsonl");
        let mut cfg = config(&server.base_url(), "STRUX_TEST_KEY_AUTH");
        cfg.parallelism = 1;
        let prompts: Vec<PromptRecord> =
            (0..5).map(|i| prompt(&format!("s{i}/standard/0"), "p")).collect();
        let err = run_prompts(&prompts, &cfg, &out, false).unwrap_err();
        assert!(matches!(err, Error::AuthFailed(401)));
        assert!(server.hit_count() < 5, "remaining prompts were not sent");
    }

    #[test]
    fn missing_api_key_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.jsonl");
        let cfg = config("http://127.0.0.1:9", "STRUX_KEY_THAT_IS_NEVER_SET");
        let err = run_prompts(&[prompt("a/standard/0", "p")], &cfg, &out, false).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn rate_limit_spaces_requests_across_workers() {
        std::env::set_var("STRUX_TEST_KEY_RATE", "sk-rate");
        let server = MockServer::start(|_, _| MockReply::content("ok"));
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.jsonl");
        let mut cfg = config(&server.base_url(), "STRUX_TEST_KEY_RATE");
        cfg.rate_limit_per_min = 300; // one send per 200ms
        cfg.parallelism = 3;
        let prompts: Vec<PromptRecord> =
            (0..4).map(|i| prompt(&format!("s{i}/standard/0"), "p")).collect();
        let started = Instant::now();
        let records = run_prompts(&prompts, &cfg, &out, false).unwrap();
        assert_eq!(records.len(), 4);
        // Three inter-send gaps of 200ms minimum, shared across workers.
        assert!(started.elapsed() >= Duration::from_millis(550));
        let hits = server.hits();
        let mut times: Vec<Instant> = hits.iter().map(|h| h.received).collect();
        times.sort();
        for pair in times.windows(2) {
            assert!(pair[1].duration_since(pair[0]) >= Duration::from_millis(150));
        }
    }

    #[test]
    fn config_validation_rejects_degenerate_values() {
        let mut cfg = config("http://x", "K");
        cfg.request_timeout_secs = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = config("http://x", "K");
        cfg.rate_limit_per_min = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = config("http://x", "K");
        cfg.parallelism = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = config("http://x", "K");
        cfg.base_url = String::new();
        assert!(cfg.validate().is_err());
    }
}
