//! Model-provider contracts: summarization, constrained question generation,
//! extractive question answering and speech synthesis.
//!
//! Every contract has a deterministic mock in [`mock`] and an HTTP-backed
//! client in [`http`]. All providers are `Send + Sync` and may be called
//! concurrently; [`fan_out`] runs a batch under a parallelism bound and
//! returns results in input order.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

pub mod http;
pub mod mock;

/// Default speech rate: 135 words per minute.
pub const DEFAULT_WORDS_PER_SECOND: f64 = 2.25;

/// Default number of provider calls in flight.
pub const DEFAULT_PARALLELISM: usize = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProviderError {
    #[error("provider unavailable: {0}")]
    Unavailable(String),
    #[error("provider protocol error: {0}")]
    Protocol(String),
    #[error("unknown voice `{0}`")]
    VoiceUnknown(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// First words a generated question may be constrained to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Interrogative {
    Who,
    What,
    Why,
    How,
    When,
    Where,
    Which,
}

impl Interrogative {
    pub const ALL: [Interrogative; 7] = [
        Interrogative::Who,
        Interrogative::What,
        Interrogative::Why,
        Interrogative::How,
        Interrogative::When,
        Interrogative::Where,
        Interrogative::Which,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Interrogative::Who => "Who",
            Interrogative::What => "What",
            Interrogative::Why => "Why",
            Interrogative::How => "How",
            Interrogative::When => "When",
            Interrogative::Where => "Where",
            Interrogative::Which => "Which",
        }
    }

    /// True when `text` starts with this word (case-insensitive, whole word).
    pub fn begins(self, text: &str) -> bool {
        let t = text.trim_start();
        let w = self.as_str();
        t.len() >= w.len()
            && t.is_char_boundary(w.len())
            && t[..w.len()].eq_ignore_ascii_case(w)
            && !t[w.len()..].chars().next().is_some_and(char::is_alphanumeric)
    }
}

impl fmt::Display for Interrogative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Interrogative {
    type Err = ProviderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Interrogative::ALL
            .into_iter()
            .find(|i| i.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ProviderError::Precondition(format!("`{s}` is not a supported interrogative")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionCandidate {
    pub question_id: String,
    pub source_paragraph_id: String,
    pub interrogative: Interrogative,
    pub text: String,
    pub word_count: usize,
    /// The provider output had to be fixed up to honor the constraint.
    #[serde(default)]
    pub repaired: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryCandidate {
    pub summary: String,
    pub likelihood: f64,
}

/// Outcome of asking whether a paragraph answers a question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerVerdict {
    pub has_answer: bool,
    pub span_text: Option<String>,
    pub span_score: f64,
    pub no_answer_score: f64,
}

impl AnswerVerdict {
    pub fn no_answer(span_score: f64, no_answer_score: f64) -> Self {
        AnswerVerdict { has_answer: false, span_text: None, span_score, no_answer_score }
    }

    pub fn margin(&self) -> f64 {
        self.span_score - self.no_answer_score
    }

    /// Normalizes a raw verdict: answerability follows the scores, and an
    /// answer span must be a non-empty substring of `paragraph`.
    pub fn checked(
        paragraph: &str,
        span: Option<String>,
        span_score: f64,
        no_answer_score: f64,
    ) -> Result<Self, ProviderError> {
        if !span_score.is_finite() || !no_answer_score.is_finite() {
            return Err(ProviderError::Protocol("non-finite answer scores".into()));
        }
        if span_score <= no_answer_score {
            return Ok(AnswerVerdict::no_answer(span_score, no_answer_score));
        }
        match span {
            Some(s) if !s.is_empty() && paragraph.contains(s.as_str()) => {
                Ok(AnswerVerdict { has_answer: true, span_text: Some(s), span_score, no_answer_score })
            }
            Some(s) if !s.is_empty() => Err(ProviderError::Protocol(format!("span `{s}` is not in the paragraph"))),
            _ => Err(ProviderError::Protocol("answer without a span".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Codec {
    #[serde(rename = "ogg")]
    Ogg,
    #[serde(rename = "wav-pcm16-mono-22050")]
    WavPcm16Mono22050,
}

impl Codec {
    pub fn extension(self) -> &'static str {
        match self {
            Codec::Ogg => "ogg",
            Codec::WavPcm16Mono22050 => "wav",
        }
    }

    pub fn content_type(self) -> &'static str {
        match self {
            Codec::Ogg => "audio/ogg",
            Codec::WavPcm16Mono22050 => "audio/wav",
        }
    }

    pub fn from_extension(ext: &str) -> Option<Codec> {
        match ext {
            "ogg" => Some(Codec::Ogg),
            "wav" => Some(Codec::WavPcm16Mono22050),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeechResult {
    pub audio_bytes: Vec<u8>,
    pub duration_ms: u64,
    pub codec: Codec,
}

pub trait Summarizer: Send + Sync {
    fn summarize(&self, article_body: &str) -> Result<SummaryCandidate, ProviderError>;
}

pub trait QuestionGenerator: Send + Sync {
    fn generate_question(&self, paragraph: &str, interrogative: Interrogative) -> Result<String, ProviderError>;

    /// A generator specialised to one story's paragraphs, if the
    /// implementation makes use of corpus statistics.
    fn with_corpus(&self, _paragraphs: &[&str]) -> Option<Arc<dyn QuestionGenerator>> {
        None
    }
}

pub trait QuestionAnswerer: Send + Sync {
    fn answer_question(&self, paragraph: &str, question: &str) -> Result<AnswerVerdict, ProviderError>;
}

pub trait SpeechSynthesizer: Send + Sync {
    fn synthesize(&self, ssml: &str, voice_id: &str) -> Result<SpeechResult, ProviderError>;
}

/// A generated question after the first-word constraint has been enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedQuestion {
    pub text: String,
    pub repaired: bool,
}

/// Calls the generator and repairs output that does not start with the
/// requested word or does not end with `?`.
pub fn constrained_question(
    qgen: &dyn QuestionGenerator,
    paragraph: &str,
    interrogative: Interrogative,
) -> Result<ConstrainedQuestion, ProviderError> {
    if paragraph.trim().is_empty() {
        return Err(ProviderError::Precondition("empty paragraph".into()));
    }
    let raw = qgen.generate_question(paragraph, interrogative)?;
    let mut text = raw.trim().to_string();
    let mut repaired = false;
    if !interrogative.begins(&text) {
        text = format!("{} {}", interrogative, text);
        repaired = true;
    }
    if !text.ends_with('?') {
        text = format!("{}?", text.trim_end_matches(['.', '!', ' ']));
        repaired = true;
    }
    Ok(ConstrainedQuestion { text, repaired })
}

/// The set of providers an engine runs against.
#[derive(Clone)]
pub struct Providers {
    pub summarizer: Arc<dyn Summarizer>,
    pub question_generator: Arc<dyn QuestionGenerator>,
    pub question_answerer: Arc<dyn QuestionAnswerer>,
    pub speech: Arc<dyn SpeechSynthesizer>,
}

impl Providers {
    /// Deterministic in-process providers.
    pub fn mock() -> Self {
        Providers {
            summarizer: Arc::new(mock::MockSummarizer),
            question_generator: Arc::new(mock::MockQuestionGenerator::default()),
            question_answerer: Arc::new(mock::MockQuestionAnswerer),
            speech: Arc::new(mock::MockSpeechSynthesizer::default()),
        }
    }

    /// All four contracts served by one HTTP endpoint.
    pub fn http(client: http::HttpProvider) -> Self {
        let client = Arc::new(client);
        Providers {
            summarizer: client.clone(),
            question_generator: client.clone(),
            question_answerer: client.clone(),
            speech: client,
        }
    }
}

impl fmt::Debug for Providers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Providers").finish_non_exhaustive()
    }
}

/// Maps `f` over `items` with at most `parallelism` calls in flight.
/// Output order equals input order regardless of completion order.
pub fn fan_out<T, R, F>(items: &[T], parallelism: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = parallelism.max(1).min(items.len());
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let r = f(item);
                *slots[i].lock().expect("result slot poisoned") = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("result slot poisoned").expect("every slot is filled"))
        .collect()
}
