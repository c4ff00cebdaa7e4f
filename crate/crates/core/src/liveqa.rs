//! Answering listener questions during playback.
//!
//! Every paragraph of the segment's story is put to the answerer; the best
//! verdict by margin (`span_score - no_answer_score`) is accepted when the
//! margin exceeds τ. Playback then resumes at the line after the one that
//! was interrupted.

use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

use crate::assembler::{ScriptUnit, UnitKind};
use crate::corpus::StoryCluster;
use crate::providers::{fan_out, QuestionAnswerer, DEFAULT_PARALLELISM};
use crate::speech::PodcastManifest;

pub const HOLDING_LINE: &str = "I'll look into that, give me a moment.";
pub const NO_ANSWER_REPLY: &str =
    "Sorry. I couldn't find the answer. If you rephrase I will try again. Otherwise I'll keep walking you through the segment.";
pub const DEFAULT_TAU: f64 = 0.5;

pub fn answered_reply(span: &str, paragraph: &str) -> String {
    format!("I think the answer is {span}, I got it from the following paragraph. {paragraph}")
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LiveQaError {
    #[error("question text is empty")]
    EmptyQuestion,
    #[error("unknown line `{0}`")]
    LineUnknown(String),
    #[error("a question is already being answered")]
    Busy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionOrigin {
    Typed,
    Recommended,
    Spoken,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ListenerQuestion {
    pub question_id: String,
    pub podcast_id: String,
    pub segment_id: String,
    pub text: String,
    pub asked_at_line: String,
    pub origin: QuestionOrigin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerStatus {
    Answered,
    NoAnswer,
}

/// Where playback continues after a reply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResumePoint {
    Line(String),
    EndOfPodcast,
}

/// The textual outcome of a listener question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiveAnswer {
    pub status: AnswerStatus,
    pub answer_text: Option<String>,
    pub evidence_paragraph: Option<String>,
    pub evidence_paragraph_id: Option<String>,
    pub margin: Option<f64>,
    pub holding_text: String,
    pub reply_text: String,
    /// At least one paragraph could not be evaluated.
    pub provider_error: bool,
}

impl LiveAnswer {
    /// Holding line and reply as script units, ids prefixed with `prefix`.
    pub fn units(&self, prefix: &str) -> Vec<ScriptUnit> {
        vec![
            ScriptUnit::new(format!("{prefix}-u0"), UnitKind::Reply, self.holding_text.clone()),
            ScriptUnit::new(format!("{prefix}-u1"), UnitKind::Reply, self.reply_text.clone()),
        ]
    }
}

/// Looks for the answer among all of the cluster's paragraphs.
pub fn answer_listener_question(
    question: &str,
    cluster: &StoryCluster,
    qa: &dyn QuestionAnswerer,
    tau: f64,
    parallelism: usize,
) -> Result<LiveAnswer, LiveQaError> {
    if question.trim().is_empty() {
        return Err(LiveQaError::EmptyQuestion);
    }
    let verdicts = fan_out(&cluster.paragraphs, parallelism, |p| qa.answer_question(&p.text, question));
    let mut provider_error = false;
    let mut best = None;
    for (p, v) in cluster.paragraphs.iter().zip(verdicts) {
        match v {
            Ok(v) if v.has_answer => {
                if best.as_ref().is_none_or(|(_, b): &(_, crate::providers::AnswerVerdict)| v.margin() > b.margin()) {
                    best = Some((p, v));
                }
            }
            Ok(_) => {}
            Err(_) => provider_error = true,
        }
    }
    let answer = match best {
        Some((p, v)) if v.margin() > tau => {
            let span = v.span_text.clone().unwrap_or_default();
            LiveAnswer {
                status: AnswerStatus::Answered,
                reply_text: answered_reply(&span, &p.text),
                answer_text: Some(span),
                evidence_paragraph: Some(p.text.clone()),
                evidence_paragraph_id: Some(p.paragraph_id.clone()),
                margin: Some(v.margin()),
                holding_text: HOLDING_LINE.into(),
                provider_error,
            }
        }
        best => LiveAnswer {
            status: AnswerStatus::NoAnswer,
            answer_text: None,
            evidence_paragraph: None,
            evidence_paragraph_id: None,
            margin: best.map(|(_, v)| v.margin()),
            holding_text: HOLDING_LINE.into(),
            reply_text: NO_ANSWER_REPLY.into(),
            provider_error,
        },
    };
    Ok(answer)
}

/// [`answer_listener_question`] with the default τ and parallelism.
pub fn answer(question: &str, cluster: &StoryCluster, qa: &dyn QuestionAnswerer) -> Result<LiveAnswer, LiveQaError> {
    answer_listener_question(question, cluster, qa, DEFAULT_TAU, DEFAULT_PARALLELISM)
}

/// The line after `interrupted_line`; the interrupted sentence is not replayed.
pub fn resume_point(manifest: &PodcastManifest, interrupted_line: &str) -> Result<ResumePoint, LiveQaError> {
    let i = manifest
        .line_index(interrupted_line)
        .ok_or_else(|| LiveQaError::LineUnknown(interrupted_line.to_string()))?;
    Ok(match manifest.lines.get(i + 1) {
        Some(next) => ResumePoint::Line(next.line_id.clone()),
        None => ResumePoint::EndOfPodcast,
    })
}

/// Admits one question at a time.
#[derive(Debug, Default)]
pub struct QuestionGate {
    busy: AtomicBool,
}

/// Releases the gate when dropped.
#[derive(Debug)]
pub struct GateGuard<'a>(&'a QuestionGate);

impl QuestionGate {
    pub fn try_begin(&self) -> Result<GateGuard<'_>, LiveQaError> {
        self.busy
            .compare_exchange(false, true, Ordering::AcqRel, Ordering::Acquire)
            .map(|_| GateGuard(self))
            .map_err(|_| LiveQaError::Busy)
    }

    pub fn is_busy(&self) -> bool {
        self.busy.load(Ordering::Acquire)
    }
}

impl Drop for GateGuard<'_> {
    fn drop(&mut self) {
        self.0.busy.store(false, Ordering::Release);
    }
}
