//! Two-alternative forced-choice realism judging.
//!
//! Each pair shows one real and one generated video in seeded random order. A judge
//! answers in free text and must close with "the first video is the generated one"
//! or "the second video is the generated one". The score is the share of parseable
//! answers that pick the generated video, so 50 % means the judge cannot tell.

use std::collections::BTreeMap;
use std::thread;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frameseq::load_sequence;
use crate::metrics::mse;

pub const PROMPT: &str = "Your task is to help me sort my videos. I mixed up real videos that I shot with my camera and similar videos that I generated with a computer. I only know that exactly one of the two videos is the real one, and exactly one of the following two videos is the generated one. Please take a look at the two videos and let me know which of them is the generated one. I'll tip you $100 if you do a great job and help me identify the generated one. First explain your reasoning, then end with the following statement: 'For this reason, the first video is the generated one' or 'For this reason, the second video is the generated one'.";

const FIRST_STATEMENT: &str = "the first video is the generated one";
const SECOND_STATEMENT: &str = "the second video is the generated one";

/// Pairs are built per (scenario, perspective) key.
pub const GRANULARITY: &str = "scenario-perspective";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Position {
    First,
    Second,
}

impl Position {
    fn statement(self) -> &'static str {
        match self {
            Position::First => "For this reason, the first video is the generated one.",
            Position::Second => "For this reason, the second video is the generated one.",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationPair {
    pub scenario_id: String,
    /// Video reference (path or URL) shown first.
    pub first: String,
    pub second: String,
    pub generated_position: Position,
    pub order_seed: u64,
}

/// One pair per key shared by `real` and `generated`, in key order. Each pair's order
/// comes from a seeded coin flip, so the same seed reproduces every position.
pub fn build_pairs(
    real: &BTreeMap<String, String>,
    generated: &BTreeMap<String, String>,
    seed: u64,
) -> Result<Vec<PresentationPair>> {
    let missing: Vec<&str> = real
        .keys()
        .filter(|k| !generated.contains_key(*k))
        .map(String::as_str)
        .collect();
    let extra: Vec<&str> = generated
        .keys()
        .filter(|k| !real.contains_key(*k))
        .map(String::as_str)
        .collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(Error::ScenarioMismatch(format!(
            "no generated video for [{}]; no real video for [{}]",
            missing.join(", "),
            extra.join(", ")
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(real
        .iter()
        .map(|(key, real_ref)| {
            let gen_ref = generated[key].clone();
            let generated_first = rng.random_bool(0.5);
            let (first, second, generated_position) = if generated_first {
                (gen_ref, real_ref.clone(), Position::First)
            } else {
                (real_ref.clone(), gen_ref, Position::Second)
            };
            PresentationPair {
                scenario_id: key.clone(),
                first,
                second,
                generated_position,
                order_seed: seed,
            }
        })
        .collect())
}

/// The final closing statement in `response`, matched case-insensitively.
pub fn parse_verdict(response: &str) -> Option<Position> {
    let text = response.to_lowercase();
    match (text.rfind(FIRST_STATEMENT), text.rfind(SECOND_STATEMENT)) {
        (Some(a), Some(b)) => Some(if a > b {
            Position::First
        } else {
            Position::Second
        }),
        (Some(_), None) => Some(Position::First),
        (None, Some(_)) => Some(Position::Second),
        (None, None) => None,
    }
}

/// A request/response realism judge. Videos are passed by reference.
pub trait Judge: Sync {
    fn name(&self) -> String;
    fn ask(&self, prompt: &str, first: &str, second: &str) -> Result<String>;
}

pub struct AlwaysFirst;

impl Judge for AlwaysFirst {
    fn name(&self) -> String {
        "always-first".into()
    }

    fn ask(&self, _: &str, _: &str, _: &str) -> Result<String> {
        Ok(Position::First.statement().into())
    }
}

pub struct AlwaysSecond;

impl Judge for AlwaysSecond {
    fn name(&self) -> String {
        "always-second".into()
    }

    fn ask(&self, _: &str, _: &str, _: &str) -> Result<String> {
        Ok(Position::Second.statement().into())
    }
}

/// Guesses by hashing the seed with both references, so answers do not depend on
/// scheduling order.
pub struct UniformRandom {
    pub seed: u64,
}

fn fnv1a(seed: u64, parts: &[&str]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ seed;
    for part in parts {
        for &b in part.as_bytes().iter().chain(&[0xff]) {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

impl Judge for UniformRandom {
    fn name(&self) -> String {
        "uniform-random".into()
    }

    fn ask(&self, _: &str, first: &str, second: &str) -> Result<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(self.seed, &[first, second]));
        let pick = if rng.random_bool(0.5) {
            Position::First
        } else {
            Position::Second
        };
        Ok(pick.statement().into())
    }
}

/// Loads both sequences and names the one whose consecutive frames differ more
/// (mean frame-to-frame MSE) as generated. Per-frame corruption flickers, so this
/// catches noisy continuations. Ties go to the second video.
pub struct TemporalMse;

/// Mean MSE between consecutive frames; 0 for a single frame.
pub fn temporal_roughness(reference: &str) -> Result<f64> {
    let seq = load_sequence(reference.as_ref())?;
    if seq.len() < 2 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for t in 0..seq.len() - 1 {
        total += mse(&seq.slice(t..t + 1)?, &seq.slice(t + 1..t + 2)?)?.value;
    }
    Ok(total / (seq.len() - 1) as f64)
}

impl Judge for TemporalMse {
    fn name(&self) -> String {
        "temporal-mse".into()
    }

    fn ask(&self, _: &str, first: &str, second: &str) -> Result<String> {
        let (a, b) = (temporal_roughness(first)?, temporal_roughness(second)?);
        let pick = if a > b {
            Position::First
        } else {
            Position::Second
        };
        Ok(format!(
            "Frame-to-frame MSE is {a:.6} for the first video and {b:.6} for the second. {}",
            pick.statement()
        ))
    }
}

/// Names accepted by [`stub_judge`].
pub const STUB_NAMES: [&str; 4] = [
    "always-first",
    "always-second",
    "uniform-random",
    "temporal-mse",
];

pub fn stub_judge(name: &str, seed: u64) -> Result<Box<dyn Judge>> {
    match name {
        "always-first" => Ok(Box::new(AlwaysFirst)),
        "always-second" => Ok(Box::new(AlwaysSecond)),
        "uniform-random" => Ok(Box::new(UniformRandom { seed })),
        "temporal-mse" => Ok(Box::new(TemporalMse)),
        _ => Err(Error::InvalidParams(format!(
            "unknown stub {name:?}; expected one of {STUB_NAMES:?}"
        ))),
    }
}

/// Endpoint settings for [`HttpJudge`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub base_url: String,
    /// Environment variable holding a bearer token, if the endpoint needs one.
    pub token_env: Option<String>,
    pub timeout_secs: u64,
}

#[derive(Serialize)]
struct JudgeRequest<'a> {
    prompt: &'a str,
    videos: [&'a str; 2],
}

/// POSTs `{"prompt", "videos": [first, second]}` as JSON and reads back either a JSON
/// object with a `response` string or a plain-text body.
pub struct HttpJudge {
    config: EndpointConfig,
    agent: ureq::Agent,
}

impl HttpJudge {
    pub fn new(config: EndpointConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs.max(1))))
            .http_status_as_error(true)
            .build()
            .into();
        Self { config, agent }
    }
}

impl Judge for HttpJudge {
    fn name(&self) -> String {
        self.config.base_url.clone()
    }

    fn ask(&self, prompt: &str, first: &str, second: &str) -> Result<String> {
        let transport = |e: ureq::Error| Error::Transport(e.to_string());
        let mut request = self.agent.post(&self.config.base_url);
        if let Some(var) = &self.config.token_env {
            let token = std::env::var(var)
                .map_err(|_| Error::Transport(format!("token variable {var} is not set")))?;
            request = request.header("Authorization", &format!("Bearer {token}"));
        }
        let body = JudgeRequest {
            prompt,
            videos: [first, second],
        };
        let mut response = request.send_json(&body).map_err(transport)?;
        let text = response.body_mut().read_to_string().map_err(transport)?;
        match serde_json::from_str::<serde_json::Value>(&text) {
            Ok(serde_json::Value::Object(map)) => match map.get("response") {
                Some(serde_json::Value::String(s)) => Ok(s.clone()),
                _ => Ok(text),
            },
            _ => Ok(text),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub attempts: u32,
    /// Delay before the second attempt; doubles after each failure.
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            attempts: 3,
            base_delay: Duration::from_millis(500),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    Parsed,
    Unparseable,
    TransportFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub scenario_id: String,
    pub generated_position: Position,
    pub chosen_position: Option<Position>,
    /// `None` unless the response was parsed.
    pub correct: Option<bool>,
    pub status: VerdictStatus,
    pub attempts: u32,
    pub raw_response: String,
}

/// Asks `judge` about one pair, retrying transport failures with exponential backoff.
pub fn query_judge(pair: &PresentationPair, judge: &dyn Judge, retry: &RetryPolicy) -> Verdict {
    let mut delay = retry.base_delay;
    let mut last_error = String::new();
    let attempts = retry.attempts.max(1);
    for attempt in 1..=attempts {
        match judge.ask(PROMPT, &pair.first, &pair.second) {
            Ok(response) => {
                let chosen = parse_verdict(&response);
                return Verdict {
                    scenario_id: pair.scenario_id.clone(),
                    generated_position: pair.generated_position,
                    chosen_position: chosen,
                    correct: chosen.map(|c| c == pair.generated_position),
                    status: if chosen.is_some() {
                        VerdictStatus::Parsed
                    } else {
                        VerdictStatus::Unparseable
                    },
                    attempts: attempt,
                    raw_response: response,
                };
            }
            Err(e) => {
                last_error = e.to_string();
                if attempt < attempts {
                    thread::sleep(delay);
                    delay *= 2;
                }
            }
        }
    }
    Verdict {
        scenario_id: pair.scenario_id.clone(),
        generated_position: pair.generated_position,
        chosen_position: None,
        correct: None,
        status: VerdictStatus::TransportFailed,
        attempts,
        raw_response: last_error,
    }
}

/// Queries every pair with at most `in_flight` requests outstanding. Verdicts come
/// back in pair order.
pub fn run_judge(
    pairs: &[PresentationPair],
    judge: &dyn Judge,
    in_flight: usize,
    retry: &RetryPolicy,
) -> Result<Vec<Verdict>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(in_flight.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(format!("cannot start judge workers: {e}")))?;
    Ok(pool.install(|| {
        pairs
            .par_iter()
            .map(|p| query_judge(p, judge, retry))
            .collect()
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JudgeScore {
    /// Percentage of parseable verdicts that picked the generated video.
    pub accuracy: f64,
    pub correct: usize,
    pub parseable: usize,
    /// Verdicts excluded from accuracy, including transport failures.
    pub unparseable: usize,
    pub transport_failures: usize,
    pub total: usize,
}

pub fn mllm_score(verdicts: &[Verdict]) -> Result<JudgeScore> {
    let parseable = verdicts
        .iter()
        .filter(|v| v.status == VerdictStatus::Parsed)
        .count();
    if parseable == 0 {
        return Err(Error::NoParseableVerdicts);
    }
    let correct = verdicts.iter().filter(|v| v.correct == Some(true)).count();
    Ok(JudgeScore {
        accuracy: 100.0 * correct as f64 / parseable as f64,
        correct,
        parseable,
        unparseable: verdicts.len() - parseable,
        transport_failures: verdicts
            .iter()
            .filter(|v| v.status == VerdictStatus::TransportFailed)
            .count(),
        total: verdicts.len(),
    })
}

/// Everything `physiq judge` writes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeRun {
    pub judge: String,
    pub granularity: String,
    pub seed: u64,
    pub score: Option<JudgeScore>,
    pub verdicts: Vec<Verdict>,
}
