//! Segment and podcast scripts.
//!
//! A segment follows the inverted pyramid: headline, summary, a Q&A session,
//! then the quotation. The podcast wraps segments in a greeting, transitions
//! and a closing, optionally with a question break after every segment.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{select_headline, select_summary, CorpusError, StoryCluster};
use crate::providers::{Providers, DEFAULT_PARALLELISM, DEFAULT_WORDS_PER_SECOND};
use crate::qagraph::{
    build_graph, generate_candidates, recommend_questions, select_session, select_session_random, GraphError,
    QAGraph, QASession,
};
use crate::quotes::{cluster_quotes, pick_segment_quote, QuoteExtract};
use crate::text::{fnv1a, split_sentences, word_count};

pub const GREETING_PREFIX: &str = "Welcome to NewsPod, today we'll be covering";
pub const CLOSING: &str = "That's it for today, thank you for tuning in.";
pub const BREAK_PROMPT_1: &str = "We're wrapping up this story, if you have a question, now is a good time to ask.";
pub const BREAK_PROMPT_2: &str = "Otherwise, we'll be moving on to the next story.";
pub const BREAK_SILENCE_MS: u64 = 5000;

/// Shortest segment, in seconds, that [`word_budget`] accepts.
pub const MIN_SEGMENT_SECONDS: u32 = 30;

/// Recommended questions attached to each segment.
pub const RECOMMENDED_PER_SEGMENT: usize = 2;

#[derive(Debug, thiserror::Error)]
pub enum AssemblyError {
    #[error("budget too small: {target_duration_s} s over {n_segments} segments")]
    BudgetTooSmall { target_duration_s: u32, n_segments: usize },
    #[error("no reference script for story `{0}`")]
    ReferenceUnavailable(String),
    #[error("reference script for `{story_id}` is invalid: {reason}")]
    InvalidReference { story_id: String, reason: String },
    #[error("a podcast needs at least one segment")]
    NoSegments,
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitKind {
    Headline,
    Summary,
    Question,
    Answer,
    QuoteIntro,
    QuoteBody,
    Transition,
    Greeting,
    Closing,
    BreakPrompt,
    Silence,
    /// Live answer to a listener question.
    Reply,
}

impl UnitKind {
    pub fn voice_role(self) -> VoiceRole {
        match self {
            UnitKind::Question => VoiceRole::V2,
            UnitKind::QuoteBody => VoiceRole::V3,
            UnitKind::Silence => VoiceRole::None,
            _ => VoiceRole::V1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VoiceRole {
    V1,
    V2,
    V3,
    #[serde(rename = "none")]
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptUnit {
    pub unit_id: String,
    pub kind: UnitKind,
    pub text: String,
    pub voice_role: VoiceRole,
    pub word_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub silence_ms: Option<u64>,
}

impl ScriptUnit {
    pub fn new(unit_id: impl Into<String>, kind: UnitKind, text: impl Into<String>) -> Self {
        let text = text.into();
        ScriptUnit {
            unit_id: unit_id.into(),
            kind,
            word_count: word_count(&text),
            text,
            voice_role: kind.voice_role(),
            silence_ms: None,
        }
    }

    pub fn silence(unit_id: impl Into<String>, ms: u64) -> Self {
        ScriptUnit {
            unit_id: unit_id.into(),
            kind: UnitKind::Silence,
            text: String::new(),
            voice_role: VoiceRole::None,
            word_count: 0,
            silence_ms: Some(ms),
        }
    }

    /// Expected spoken length at `words_per_second`, including silence.
    pub fn estimated_ms(&self, words_per_second: f64) -> f64 {
        self.word_count as f64 / words_per_second * 1000.0 + self.silence_ms.unwrap_or(0) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Baseline,
    QaRand,
    QaBest,
    Reference,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Baseline => "baseline",
            Condition::QaRand => "qa_rand",
            Condition::QaBest => "qa_best",
            Condition::Reference => "reference",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Condition::Baseline, Condition::QaRand, Condition::QaBest, Condition::Reference]
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown condition `{s}` (expected baseline, qa_rand, qa_best or reference)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SegmentFlags {
    /// The Q&A session came out empty.
    #[serde(default)]
    pub degraded: bool,
    /// The summary or baseline text is shorter than wanted.
    #[serde(default)]
    pub below_length: bool,
    /// Headline and summary alone exceed the budget.
    #[serde(default)]
    pub over_budget: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentScript {
    pub segment_id: String,
    pub story_id: String,
    pub title: String,
    pub condition: Condition,
    pub units: Vec<ScriptUnit>,
    pub recommended_questions: Vec<String>,
    #[serde(default)]
    pub quote: Option<QuoteExtract>,
    #[serde(default)]
    pub flags: SegmentFlags,
}

impl SegmentScript {
    pub fn word_count(&self) -> usize {
        self.units.iter().map(|u| u.word_count).sum()
    }

    pub fn estimated_ms(&self, words_per_second: f64) -> f64 {
        self.units.iter().map(|u| u.estimated_ms(words_per_second)).sum()
    }

    fn next_unit_id(&self) -> String {
        unit_id(&self.segment_id, self.units.len())
    }

    fn push(&mut self, kind: UnitKind, text: impl Into<String>) {
        let u = ScriptUnit::new(self.next_unit_id(), kind, text);
        self.units.push(u);
    }

    /// Checks voice roles, unit order and unit id uniqueness.
    pub fn check(&self) -> Result<(), String> {
        let mut seen = std::collections::HashSet::new();
        for u in &self.units {
            if u.voice_role != u.kind.voice_role() {
                return Err(format!("unit {} has voice {:?} for kind {:?}", u.unit_id, u.voice_role, u.kind));
            }
            if !seen.insert(u.unit_id.as_str()) {
                return Err(format!("duplicate unit id {}", u.unit_id));
            }
            if (u.kind == UnitKind::Silence) != u.silence_ms.is_some() {
                return Err(format!("unit {}: silence_ms only on silence units", u.unit_id));
            }
        }
        let kinds: Vec<UnitKind> = self.units.iter().map(|u| u.kind).collect();
        check_order(&kinds)?;
        if self.condition == Condition::Baseline
            && self.units.iter().any(|u| matches!(u.voice_role, VoiceRole::V2 | VoiceRole::V3))
        {
            return Err("baseline segment with V2/V3 units".into());
        }
        Ok(())
    }
}

/// headline summary (question answer)* [quote_intro quote_body] [break_prompt silence break_prompt silence]
fn check_order(kinds: &[UnitKind]) -> Result<(), String> {
    use UnitKind::*;
    let bad = |i: usize| Err(format!("unexpected {:?} at position {i}", kinds[i]));
    if kinds.len() < 2 || kinds[0] != Headline || kinds[1] != Summary {
        return Err("segment must open with headline and summary".into());
    }
    let mut i = 2;
    while i < kinds.len() && kinds[i] == Question {
        if kinds.get(i + 1) != Some(&Answer) {
            return Err(format!("question at {i} without answer"));
        }
        i += 2;
    }
    if i < kinds.len() && kinds[i] == QuoteIntro {
        if kinds.get(i + 1) != Some(&QuoteBody) {
            return Err(format!("quote intro at {i} without body"));
        }
        i += 2;
    }
    if i < kinds.len() {
        if kinds[i..] != [BreakPrompt, Silence, BreakPrompt, Silence] {
            return bad(i);
        }
        i = kinds.len();
    }
    debug_assert_eq!(i, kinds.len());
    Ok(())
}

pub fn unit_id(segment_id: &str, ordinal: usize) -> String {
    format!("{segment_id}-u{ordinal}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PodcastScript {
    pub podcast_id: String,
    pub greeting: ScriptUnit,
    pub segments: Vec<SegmentScript>,
    /// `transitions[i]` is spoken before `segments[i + 1]`.
    pub transitions: Vec<ScriptUnit>,
    pub closing: ScriptUnit,
    pub target_duration_s: u32,
    pub with_breaks: bool,
}

impl PodcastScript {
    /// Every unit in playback order with the segment it belongs to.
    /// Transitions belong to the segment they introduce.
    pub fn units_in_order(&self) -> Vec<(&ScriptUnit, Option<&SegmentScript>)> {
        let mut out = vec![(&self.greeting, None)];
        for (i, seg) in self.segments.iter().enumerate() {
            if i > 0 {
                out.push((&self.transitions[i - 1], Some(seg)));
            }
            out.extend(seg.units.iter().map(|u| (u, Some(seg))));
        }
        out.push((&self.closing, None));
        out
    }

    pub fn estimated_ms(&self, words_per_second: f64) -> f64 {
        self.units_in_order().iter().map(|(u, _)| u.estimated_ms(words_per_second)).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("script serializes")
    }
}

/// Words per segment: `floor(target / n_segments × 135 / 60)`.
pub fn word_budget(target_duration_s: u32, n_segments: usize) -> Result<usize, AssemblyError> {
    if n_segments == 0 || (target_duration_s as usize) < MIN_SEGMENT_SECONDS as usize * n_segments {
        return Err(AssemblyError::BudgetTooSmall { target_duration_s, n_segments });
    }
    Ok(target_duration_s as usize * 135 / (60 * n_segments))
}

/// [`word_budget`] at an arbitrary speech rate.
pub fn word_budget_at(target_duration_s: u32, n_segments: usize, words_per_second: f64) -> Result<usize, AssemblyError> {
    word_budget(target_duration_s, n_segments)?;
    let exact = target_duration_s as f64 / n_segments as f64 * words_per_second;
    Ok((exact + 1e-9).floor() as usize)
}

#[derive(Debug, Clone)]
pub struct SegmentOptions {
    pub parallelism: usize,
    pub reference_dir: Option<PathBuf>,
    pub recommended: usize,
}

impl Default for SegmentOptions {
    fn default() -> Self {
        SegmentOptions { parallelism: DEFAULT_PARALLELISM, reference_dir: None, recommended: RECOMMENDED_PER_SEGMENT }
    }
}

/// Seed for one story, so segments differ but stay reproducible.
pub fn story_seed(seed: u64, story_id: &str) -> u64 {
    seed ^ fnv1a(story_id.as_bytes())
}

/// Builds one segment for `cluster` under `condition`.
pub fn build_segment(
    cluster: &StoryCluster,
    condition: Condition,
    budget_words: usize,
    seed: u64,
    providers: &Providers,
    options: &SegmentOptions,
) -> Result<SegmentScript, AssemblyError> {
    match condition {
        Condition::QaBest | Condition::QaRand => build_qa_segment(cluster, condition, budget_words, seed, providers, options),
        Condition::Baseline => build_baseline_segment(cluster, budget_words, seed),
        Condition::Reference => load_reference(cluster, options.reference_dir.as_deref()),
    }
}

fn empty_segment(cluster: &StoryCluster, condition: Condition) -> SegmentScript {
    SegmentScript {
        segment_id: cluster.story_id.clone(),
        story_id: cluster.story_id.clone(),
        title: cluster.title.clone(),
        condition,
        units: Vec::new(),
        recommended_questions: Vec::new(),
        quote: None,
        flags: SegmentFlags::default(),
    }
}

/// Speakable form of a quote: intro names the speaker, body is the quote
/// with terminal punctuation.
pub fn quote_texts(q: &QuoteExtract) -> (String, String) {
    let intro = match &q.descriptor {
        Some(d) => format!("{}, {}.", q.author, d),
        None => format!("{}.", q.author),
    };
    let mut body = q.quote_text.trim().trim_end_matches([',', ';', ':']).trim_end().to_string();
    if !body.ends_with(['.', '?', '!']) {
        body.push('.');
    }
    (intro, body)
}

fn build_qa_segment(
    cluster: &StoryCluster,
    condition: Condition,
    budget_words: usize,
    seed: u64,
    providers: &Providers,
    options: &SegmentOptions,
) -> Result<SegmentScript, AssemblyError> {
    let mut seg = empty_segment(cluster, condition);
    let headline = select_headline(cluster).to_string();
    let summary = select_summary(cluster, providers.summarizer.as_ref())?;
    seg.flags.below_length = summary.below_length;
    seg.push(UnitKind::Headline, headline);
    seg.push(UnitKind::Summary, summary.text);
    let intro_words = seg.word_count();

    let quote = pick_segment_quote(&cluster_quotes(cluster), cluster);
    let quote_texts = quote.as_ref().map(quote_texts);
    let quote_words = quote_texts.as_ref().map_or(0, |(i, b)| word_count(i) + word_count(b));
    // The quote is charged up front so the session fills what is left.
    let target = budget_words.saturating_sub(intro_words + quote_words);

    let (graph, session) = match generate_candidates(cluster, providers.question_generator.as_ref(), options.parallelism) {
        Ok(gen) => {
            let paragraphs: Vec<_> = cluster.filtered_paragraphs().cloned().collect();
            let graph = build_graph(&gen.candidates, &paragraphs, providers.question_answerer.as_ref(), options.parallelism)?;
            let session = match condition {
                Condition::QaRand => select_session_random(&graph, target, story_seed(seed, &cluster.story_id)),
                _ => select_session(&graph, target),
            };
            (Some(graph), session)
        }
        Err(GraphError::NoEligibleParagraphs) => (None, QASession::default()),
        Err(e) => return Err(e.into()),
    };

    seg.flags.degraded = session.pairs.is_empty();
    for pair in &session.pairs {
        seg.push(UnitKind::Question, pair.question.text.clone());
        seg.push(UnitKind::Answer, pair.paragraph.text.clone());
    }
    if let (Some(q), Some((intro, body))) = (quote, quote_texts) {
        seg.push(UnitKind::QuoteIntro, intro);
        seg.push(UnitKind::QuoteBody, body);
        seg.quote = Some(q);
    }
    seg.recommended_questions = graph
        .as_ref()
        .map(|g: &QAGraph| recommend_questions(g, &session, options.recommended).into_iter().map(|q| q.text).collect())
        .unwrap_or_default();
    seg.flags.over_budget = intro_words > budget_words;
    Ok(seg)
}

/// Headline plus the first sentences of one seeded source article, until the
/// segment reaches the budget.
fn build_baseline_segment(cluster: &StoryCluster, budget_words: usize, seed: u64) -> Result<SegmentScript, AssemblyError> {
    use rand::{Rng, SeedableRng};
    let mut seg = empty_segment(cluster, Condition::Baseline);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(story_seed(seed, &cluster.story_id));
    let article = &cluster.articles[rng.random_range(0..cluster.articles.len())];
    seg.push(UnitKind::Headline, select_headline(cluster).to_string());

    let mut total = seg.word_count();
    let mut taken = Vec::new();
    for s in split_sentences(&article.body) {
        if total >= budget_words {
            break;
        }
        total += word_count(&s);
        taken.push(s);
    }
    seg.flags.below_length = total < budget_words;
    seg.push(UnitKind::Summary, taken.join(" "));
    Ok(seg)
}

fn load_reference(cluster: &StoryCluster, dir: Option<&Path>) -> Result<SegmentScript, AssemblyError> {
    let missing = || AssemblyError::ReferenceUnavailable(cluster.story_id.clone());
    let path = dir.ok_or_else(missing)?.join(format!("{}.json", cluster.story_id));
    let raw = std::fs::read_to_string(&path).map_err(|_| missing())?;
    let invalid = |reason: String| AssemblyError::InvalidReference { story_id: cluster.story_id.clone(), reason };
    let seg: SegmentScript = serde_json::from_str(&raw).map_err(|e| invalid(e.to_string()))?;
    if seg.story_id != cluster.story_id {
        return Err(invalid(format!("file is for story `{}`", seg.story_id)));
    }
    seg.check().map_err(invalid)?;
    Ok(seg)
}

/// Cuts a segment to `budget_words`.
///
/// Headline and summary always stay. Q&A pairs and the quote are kept whole,
/// in order, while the running word count before them is under budget.
/// Break units are never dropped.
pub fn truncate_segment(segment: &SegmentScript, budget_words: usize) -> SegmentScript {
    let mut out = SegmentScript { units: Vec::new(), ..segment.clone() };
    let mut units = segment.units.iter().peekable();
    let mut total = 0;
    while let Some(u) = units.next_if(|u| matches!(u.kind, UnitKind::Headline | UnitKind::Summary)) {
        total += u.word_count;
        out.units.push(u.clone());
    }
    if total > budget_words {
        out.flags.over_budget = true;
    }

    let mut stopped = false;
    let mut kept_quote = false;
    while let Some(u) = units.next() {
        let paired = matches!(u.kind, UnitKind::Question | UnitKind::QuoteIntro);
        let mut block = vec![u];
        if paired {
            if let Some(next) = units.next_if(|n| matches!(n.kind, UnitKind::Answer | UnitKind::QuoteBody)) {
                block.push(next);
            }
        }
        let droppable = !matches!(u.kind, UnitKind::BreakPrompt | UnitKind::Silence);
        if droppable {
            if stopped || total >= budget_words {
                stopped = true;
                continue;
            }
            kept_quote |= u.kind == UnitKind::QuoteIntro;
        }
        for b in block {
            total += b.word_count;
            out.units.push(b.clone());
        }
    }
    if !kept_quote {
        out.quote = None;
    }
    out
}

fn join_titles(titles: &[&str]) -> String {
    match titles {
        [] => String::new(),
        [a] => a.to_string(),
        [a, b] => format!("{a} and {b}"),
        [rest @ .., last] => format!("{}, and {last}", rest.join(", ")),
    }
}

fn sentence(text: String) -> String {
    if text.ends_with(['.', '?', '!']) {
        text
    } else {
        text + "."
    }
}

pub fn greeting_text(titles: &[&str]) -> String {
    sentence(format!("{GREETING_PREFIX} {}", join_titles(titles)))
}

pub fn transition_text(title: &str) -> String {
    sentence(format!("Next up, {title}"))
}

/// Wraps segments with greeting, transitions and closing.
pub fn assemble_podcast(
    podcast_id: &str,
    mut segments: Vec<SegmentScript>,
    target_duration_s: u32,
    with_breaks: bool,
) -> Result<PodcastScript, AssemblyError> {
    if segments.is_empty() {
        return Err(AssemblyError::NoSegments);
    }
    let titles: Vec<&str> = segments.iter().map(|s| s.title.as_str()).collect();
    let greeting = ScriptUnit::new("greeting-u0", UnitKind::Greeting, greeting_text(&titles));
    let transitions = segments[1..]
        .iter()
        .map(|s| ScriptUnit::new(format!("{}-t0", s.segment_id), UnitKind::Transition, transition_text(&s.title)))
        .collect();
    if with_breaks {
        for seg in &mut segments {
            seg.push(UnitKind::BreakPrompt, BREAK_PROMPT_1);
            let id = seg.next_unit_id();
            seg.units.push(ScriptUnit::silence(id, BREAK_SILENCE_MS));
            seg.push(UnitKind::BreakPrompt, BREAK_PROMPT_2);
            let id = seg.next_unit_id();
            seg.units.push(ScriptUnit::silence(id, BREAK_SILENCE_MS));
        }
    }
    Ok(PodcastScript {
        podcast_id: podcast_id.to_string(),
        greeting,
        segments,
        transitions,
        closing: ScriptUnit::new("closing-u0", UnitKind::Closing, CLOSING),
        target_duration_s,
        with_breaks,
    })
}

/// Estimated duration at the default speech rate, in seconds.
pub fn estimated_seconds(script: &PodcastScript) -> f64 {
    script.estimated_ms(DEFAULT_WORDS_PER_SECOND) / 1000.0
}
