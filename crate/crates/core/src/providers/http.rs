//! JSON-over-HTTP provider client.
//!
//! ```text
//! POST /v1/summarize {body}                  -> {summary, likelihood}
//! POST /v1/question  {paragraph, interrogative} -> {question}
//! POST /v1/answer    {paragraph, question}      -> {has_answer, span, span_score, no_answer_score}
//! POST /v1/speech    {ssml, voice}              -> {audio_base64, duration_ms, codec}
//! ```
//!
//! Transport failures are retried once. 5xx responses map to
//! [`ProviderError::Unavailable`]; a 4xx response whose `error` field is
//! `voice_unknown` maps to [`ProviderError::VoiceUnknown`].

use std::time::Duration;

use base64::Engine as _;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{
    AnswerVerdict, Codec, Interrogative, ProviderError, QuestionAnswerer, QuestionGenerator, SpeechResult,
    SpeechSynthesizer, Summarizer, SummaryCandidate,
};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummarizeRequest {
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummarizeResponse {
    pub summary: String,
    pub likelihood: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionRequest {
    pub paragraph: String,
    pub interrogative: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionResponse {
    pub question: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerRequest {
    pub paragraph: String,
    pub question: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerResponse {
    pub has_answer: bool,
    pub span: Option<String>,
    pub span_score: f64,
    pub no_answer_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeechRequest {
    pub ssml: String,
    pub voice: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeechResponse {
    pub audio_base64: String,
    pub duration_ms: u64,
    pub codec: Codec,
}

/// Error body for 4xx/5xx responses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(default)]
    pub message: String,
}

pub const VOICE_UNKNOWN: &str = "voice_unknown";

/// Blocking client; call from worker threads, not from inside an async runtime.
#[derive(Debug, Clone)]
pub struct HttpProvider {
    base_url: String,
    client: reqwest::blocking::Client,
}

impl HttpProvider {
    pub fn new(base_url: impl Into<String>) -> Result<Self, ProviderError> {
        Self::with_timeout(base_url, DEFAULT_TIMEOUT)
    }

    pub fn with_timeout(base_url: impl Into<String>, timeout: Duration) -> Result<Self, ProviderError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| ProviderError::Unavailable(format!("building http client: {e}")))?;
        Ok(HttpProvider { base_url: base_url.into().trim_end_matches('/').to_string(), client })
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    fn post<Req: Serialize, Resp: DeserializeOwned>(&self, path: &str, req: &Req) -> Result<Resp, ProviderError> {
        let url = format!("{}{}", self.base_url, path);
        let send = || self.client.post(&url).json(req).send();
        let resp = match send() {
            Ok(r) => r,
            Err(_) => send().map_err(|e| ProviderError::Unavailable(format!("{url}: {e}")))?,
        };
        let status = resp.status();
        if status.is_server_error() {
            return Err(ProviderError::Unavailable(format!("{url}: HTTP {status}")));
        }
        let bytes = resp.bytes().map_err(|e| ProviderError::Unavailable(format!("{url}: {e}")))?;
        if status.is_client_error() {
            let body: Option<ErrorBody> = serde_json::from_slice(&bytes).ok();
            return Err(match body {
                Some(b) if b.error == VOICE_UNKNOWN => ProviderError::VoiceUnknown(b.message),
                Some(b) => ProviderError::Protocol(format!("{url}: HTTP {status}: {} {}", b.error, b.message)),
                None => ProviderError::Protocol(format!("{url}: HTTP {status}")),
            });
        }
        if !status.is_success() {
            return Err(ProviderError::Protocol(format!("{url}: unexpected HTTP {status}")));
        }
        serde_json::from_slice(&bytes).map_err(|e| ProviderError::Protocol(format!("{url}: malformed response: {e}")))
    }
}

impl Summarizer for HttpProvider {
    fn summarize(&self, article_body: &str) -> Result<SummaryCandidate, ProviderError> {
        if article_body.trim().is_empty() {
            return Err(ProviderError::Precondition("empty article body".into()));
        }
        let r: SummarizeResponse = self.post("/v1/summarize", &SummarizeRequest { body: article_body.to_string() })?;
        if !r.likelihood.is_finite() {
            return Err(ProviderError::Protocol("non-finite likelihood".into()));
        }
        Ok(SummaryCandidate { summary: r.summary, likelihood: r.likelihood })
    }
}

impl QuestionGenerator for HttpProvider {
    fn generate_question(&self, paragraph: &str, interrogative: Interrogative) -> Result<String, ProviderError> {
        let r: QuestionResponse = self.post(
            "/v1/question",
            &QuestionRequest { paragraph: paragraph.to_string(), interrogative: interrogative.to_string() },
        )?;
        Ok(r.question)
    }
}

impl QuestionAnswerer for HttpProvider {
    fn answer_question(&self, paragraph: &str, question: &str) -> Result<AnswerVerdict, ProviderError> {
        if paragraph.trim().is_empty() || question.trim().is_empty() {
            return Err(ProviderError::Precondition("paragraph and question must be non-empty".into()));
        }
        let r: AnswerResponse = self.post(
            "/v1/answer",
            &AnswerRequest { paragraph: paragraph.to_string(), question: question.to_string() },
        )?;
        // Answerability is derived from the scores, whatever `has_answer` says.
        AnswerVerdict::checked(paragraph, r.span, r.span_score, r.no_answer_score)
    }
}

impl SpeechSynthesizer for HttpProvider {
    fn synthesize(&self, ssml: &str, voice_id: &str) -> Result<SpeechResult, ProviderError> {
        let r: SpeechResponse =
            self.post("/v1/speech", &SpeechRequest { ssml: ssml.to_string(), voice: voice_id.to_string() })?;
        let audio_bytes = base64::engine::general_purpose::STANDARD
            .decode(r.audio_base64.as_bytes())
            .map_err(|e| ProviderError::Protocol(format!("audio is not base64: {e}")))?;
        if r.duration_ms == 0 || audio_bytes.is_empty() {
            return Err(ProviderError::Protocol("empty audio".into()));
        }
        Ok(SpeechResult { audio_bytes, duration_ms: r.duration_ms, codec: r.codec })
    }
}

impl AnswerResponse {
    pub fn from_verdict(v: &AnswerVerdict) -> Self {
        AnswerResponse {
            has_answer: v.has_answer,
            span: v.span_text.clone(),
            span_score: v.span_score,
            no_answer_score: v.no_answer_score,
        }
    }
}

impl SpeechResponse {
    pub fn from_result(r: &SpeechResult) -> Self {
        SpeechResponse {
            audio_base64: base64::engine::general_purpose::STANDARD.encode(&r.audio_bytes),
            duration_ms: r.duration_ms,
            codec: r.codec,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{Read, Write};
    use std::net::TcpListener;

    /// One-shot HTTP server answering every request with a canned response.
    fn canned(status: &str, body: &str, requests: usize) -> String {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let reply = format!(
            "HTTP/1.1 {status}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
            body.len()
        );
        std::thread::spawn(move || {
            for stream in listener.incoming().take(requests) {
                let mut s = stream.unwrap();
                let mut buf = [0u8; 8192];
                let _ = s.read(&mut buf);
                let _ = s.write_all(reply.as_bytes());
            }
        });
        format!("http://{addr}")
    }

    #[test]
    fn service_unavailable() {
        let p = HttpProvider::new(canned("503 Service Unavailable", "{}", 1)).unwrap();
        assert!(matches!(p.summarize("Some body."), Err(ProviderError::Unavailable(_))));
    }

    #[test]
    fn malformed_response() {
        let p = HttpProvider::new(canned("200 OK", r#"{"nope": 1}"#, 1)).unwrap();
        assert!(matches!(p.summarize("Some body."), Err(ProviderError::Protocol(_))));
    }

    #[test]
    fn unknown_voice() {
        let p = HttpProvider::new(canned("400 Bad Request", r#"{"error":"voice_unknown","message":"x"}"#, 1)).unwrap();
        assert!(matches!(p.synthesize("<speak>hi</speak>", "x"), Err(ProviderError::VoiceUnknown(_))));
    }

    #[test]
    fn answer_scores_override_flag() {
        let body = r#"{"has_answer": true, "span": "shelf", "span_score": 0.1, "no_answer_score": 0.9}"#;
        let p = HttpProvider::new(canned("200 OK", body, 1)).unwrap();
        let v = p.answer_question("The shelf cracked.", "What cracked?").unwrap();
        assert!(!v.has_answer);
        let body = r#"{"has_answer": true, "span": "glacier", "span_score": 3.0, "no_answer_score": 0.9}"#;
        let p = HttpProvider::new(canned("200 OK", body, 1)).unwrap();
        assert!(matches!(p.answer_question("The shelf cracked.", "What?"), Err(ProviderError::Protocol(_))));
    }

    #[test]
    fn transport_failure_after_retry() {
        let addr = {
            let l = TcpListener::bind("127.0.0.1:0").unwrap();
            l.local_addr().unwrap()
        };
        let p = HttpProvider::with_timeout(format!("http://{addr}"), Duration::from_millis(500)).unwrap();
        assert!(matches!(p.generate_question("para", Interrogative::Who), Err(ProviderError::Unavailable(_))));
    }
}
