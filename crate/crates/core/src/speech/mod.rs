//! Sentence-level SSML rendering, per-sentence synthesis and the audio
//! manifest that aligns transcript, voices and timing.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::assembler::{quote_texts, PodcastScript, ScriptUnit, UnitKind, VoiceRole};
use crate::providers::{fan_out, ProviderError, SpeechResult, SpeechSynthesizer, DEFAULT_PARALLELISM};
use crate::quotes::QuoteExtract;

pub mod ssml;

pub use crate::text::split_sentences;
use ssml::{EmphasisLevel, SsmlDocument};

/// Pause after the speaker's name and after the descriptor in a quote intro.
pub const QUOTE_BREAK_MS: u64 = 300;
/// Pause before a question.
pub const QUESTION_LEAD_MS: u64 = 250;

#[derive(Debug, thiserror::Error)]
pub enum SpeechError {
    #[error("synthesis failed for line {line_id}: {source}")]
    Synthesis {
        line_id: String,
        #[source]
        source: ProviderError,
    },
    #[error("writing audio: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid manifest: {0}")]
    Manifest(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoiceConfig {
    pub voice1: String,
    pub voice2: String,
    pub voice3: String,
}

impl Default for VoiceConfig {
    fn default() -> Self {
        VoiceConfig {
            voice1: "en-US-Wavenet-J".into(),
            voice2: "en-US-Wavenet-H".into(),
            voice3: "en-US-Wavenet-D".into(),
        }
    }
}

impl VoiceConfig {
    /// Voice for a role; silence is rendered with voice 1.
    pub fn voice_for(&self, role: VoiceRole) -> &str {
        match role {
            VoiceRole::V1 | VoiceRole::None => &self.voice1,
            VoiceRole::V2 => &self.voice2,
            VoiceRole::V3 => &self.voice3,
        }
    }

    pub fn all(&self) -> impl Iterator<Item = &str> {
        [self.voice1.as_str(), self.voice2.as_str(), self.voice3.as_str()].into_iter()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedSentence {
    pub text: String,
    pub ssml: SsmlDocument,
    /// A quote unit did not match its quote and was rendered plain.
    pub flagged: bool,
}

fn plain(text: String) -> RenderedSentence {
    RenderedSentence { ssml: SsmlDocument::new().text(text.clone()), text, flagged: false }
}

/// SSML for each sentence of a unit.
///
/// Quote intros put the speaker's name under strong emphasis and the
/// descriptor under reduced emphasis, each followed by a 300 ms pause; quote
/// bodies are moderately emphasized. Questions open with a 250 ms pause.
/// Silence units become one break.
pub fn render_ssml(unit: &ScriptUnit, quote: Option<&QuoteExtract>) -> Vec<RenderedSentence> {
    match unit.kind {
        UnitKind::Silence => vec![RenderedSentence {
            text: String::new(),
            ssml: SsmlDocument::new().pause(unit.silence_ms.unwrap_or(0)),
            flagged: false,
        }],
        UnitKind::QuoteIntro => {
            let Some(q) = quote.filter(|q| quote_texts(q).0 == unit.text) else {
                return vec![RenderedSentence { flagged: true, ..plain(unit.text.clone()) }];
            };
            let ssml = match &q.descriptor {
                Some(d) => SsmlDocument::new()
                    .emphasis(EmphasisLevel::Strong, q.author.clone())
                    .pause(QUOTE_BREAK_MS)
                    .emphasis(EmphasisLevel::Reduced, format!("{d}."))
                    .pause(QUOTE_BREAK_MS),
                None => SsmlDocument::new().emphasis(EmphasisLevel::Strong, format!("{}.", q.author)).pause(QUOTE_BREAK_MS),
            };
            vec![RenderedSentence { text: unit.text.clone(), ssml, flagged: false }]
        }
        UnitKind::QuoteBody => split_sentences(&unit.text)
            .into_iter()
            .map(|s| RenderedSentence {
                ssml: SsmlDocument::new().emphasis(EmphasisLevel::Moderate, s.clone()),
                text: s,
                flagged: quote.is_none(),
            })
            .collect(),
        UnitKind::Question => split_sentences(&unit.text)
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                let ssml = if i == 0 { SsmlDocument::new().pause(QUESTION_LEAD_MS) } else { SsmlDocument::new() };
                RenderedSentence { ssml: ssml.text(s.clone()), text: s, flagged: false }
            })
            .collect(),
        _ => split_sentences(&unit.text).into_iter().map(plain).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptLine {
    pub line_id: String,
    pub unit_id: String,
    /// `None` for the greeting and closing.
    pub segment_id: Option<String>,
    pub sentence_index: usize,
    pub kind: UnitKind,
    pub voice_role: VoiceRole,
    pub text: String,
    pub voice_id: String,
    pub ssml: String,
    pub audio_ref: String,
    pub duration_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentOffset {
    pub segment_id: String,
    pub first_line: usize,
    pub start_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PodcastManifest {
    pub podcast_id: String,
    pub lines: Vec<ScriptLine>,
    pub segment_offsets: Vec<SegmentOffset>,
    pub total_duration_ms: u64,
}

impl PodcastManifest {
    /// Computes offsets and total from the lines.
    pub fn from_lines(podcast_id: impl Into<String>, lines: Vec<ScriptLine>) -> Self {
        let mut segment_offsets: Vec<SegmentOffset> = Vec::new();
        let mut t = 0;
        for (i, l) in lines.iter().enumerate() {
            if let Some(seg) = &l.segment_id {
                if segment_offsets.last().is_none_or(|o| &o.segment_id != seg) {
                    segment_offsets.push(SegmentOffset { segment_id: seg.clone(), first_line: i, start_ms: t });
                }
            }
            t += l.duration_ms;
        }
        PodcastManifest { podcast_id: podcast_id.into(), lines, segment_offsets, total_duration_ms: t }
    }

    pub fn line_index(&self, line_id: &str) -> Option<usize> {
        self.lines.iter().position(|l| l.line_id == line_id)
    }

    pub fn line(&self, line_id: &str) -> Option<&ScriptLine> {
        self.lines.iter().find(|l| l.line_id == line_id)
    }

    /// Sum of the durations of the lines belonging to a segment.
    pub fn segment_duration_ms(&self, segment_id: &str) -> u64 {
        self.lines.iter().filter(|l| l.segment_id.as_deref() == Some(segment_id)).map(|l| l.duration_ms).sum()
    }

    /// Checks the manifest invariants.
    pub fn validate(&self) -> Result<(), SpeechError> {
        let err = |m: String| Err(SpeechError::Manifest(m));
        let sum: u64 = self.lines.iter().map(|l| l.duration_ms).sum();
        if sum != self.total_duration_ms {
            return err(format!("total_duration_ms {} but lines sum to {sum}", self.total_duration_ms));
        }
        let mut ids = HashSet::new();
        for l in &self.lines {
            if !ids.insert(l.line_id.as_str()) {
                return err(format!("duplicate line id {}", l.line_id));
            }
            if l.duration_ms == 0 && l.kind != UnitKind::Silence {
                return err(format!("line {} has no duration", l.line_id));
            }
            if l.audio_ref.is_empty() || Path::new(&l.audio_ref).is_absolute() {
                return err(format!("line {} audio_ref must be a relative path", l.line_id));
            }
        }
        let mut seen_segments = HashSet::new();
        let mut prev: Option<&SegmentOffset> = None;
        let mut start = 0;
        let mut next_line = 0;
        for o in &self.segment_offsets {
            if !seen_segments.insert(o.segment_id.as_str()) {
                return err(format!("segment {} listed twice", o.segment_id));
            }
            if let Some(p) = prev {
                if o.start_ms <= p.start_ms || o.first_line <= p.first_line {
                    return err(format!("segment {} does not start after {}", o.segment_id, p.segment_id));
                }
            }
            let Some(first) = self.lines.get(o.first_line) else {
                return err(format!("segment {} starts past the last line", o.segment_id));
            };
            if first.segment_id.as_deref() != Some(o.segment_id.as_str()) {
                return err(format!("segment {} first line belongs elsewhere", o.segment_id));
            }
            start += self.lines[next_line..o.first_line].iter().map(|l| l.duration_ms).sum::<u64>();
            next_line = o.first_line;
            if start != o.start_ms {
                return err(format!("segment {} starts at {} ms, lines say {start}", o.segment_id, o.start_ms));
            }
            prev = Some(o);
        }
        // Every segment's lines are contiguous and start at its offset.
        for (i, l) in self.lines.iter().enumerate() {
            if let Some(seg) = &l.segment_id {
                let Some(o) = self.segment_offsets.iter().find(|o| &o.segment_id == seg) else {
                    return err(format!("line {} names unlisted segment {seg}", l.line_id));
                };
                let contiguous = i == o.first_line || self.lines[i - 1].segment_id.as_deref() == Some(seg.as_str());
                if i < o.first_line || !contiguous {
                    return err(format!("segment {seg} is not contiguous at line {}", l.line_id));
                }
            }
        }
        Ok(())
    }
}

/// A unit to be rendered, with the segment it belongs to and the segment's quote.
#[derive(Debug, Clone, Copy)]
pub struct UnitRef<'a> {
    pub unit: &'a ScriptUnit,
    pub segment_id: Option<&'a str>,
    pub quote: Option<&'a QuoteExtract>,
}

#[derive(Debug, Clone)]
pub struct RenderOptions {
    pub voices: VoiceConfig,
    pub parallelism: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { voices: VoiceConfig::default(), parallelism: DEFAULT_PARALLELISM }
    }
}

struct Planned {
    line_id: String,
    unit: usize,
    sentence_index: usize,
    text: String,
    ssml: String,
    voice_id: String,
}

fn synthesize_retrying(tts: &dyn SpeechSynthesizer, ssml: &str, voice: &str) -> Result<SpeechResult, ProviderError> {
    tts.synthesize(ssml, voice).or_else(|_| tts.synthesize(ssml, voice))
}

/// Synthesizes one audio file per sentence under `audio_root/{podcast_id}/`.
pub fn render_units(
    podcast_id: &str,
    units: &[UnitRef<'_>],
    tts: &dyn SpeechSynthesizer,
    options: &RenderOptions,
    audio_root: &Path,
) -> Result<Vec<ScriptLine>, SpeechError> {
    let mut planned = Vec::new();
    for (ui, u) in units.iter().enumerate() {
        let voice = options.voices.voice_for(u.unit.voice_role);
        for (si, s) in render_ssml(u.unit, u.quote).into_iter().enumerate() {
            planned.push(Planned {
                line_id: format!("{}-s{si}", u.unit.unit_id),
                unit: ui,
                sentence_index: si,
                text: s.text,
                ssml: s.ssml.to_xml(),
                voice_id: voice.to_string(),
            });
        }
    }
    let results = fan_out(&planned, options.parallelism, |p| synthesize_retrying(tts, &p.ssml, &p.voice_id));

    let dir = audio_root.join(podcast_id);
    fs::create_dir_all(&dir)?;
    let mut lines = Vec::with_capacity(planned.len());
    for (p, r) in planned.into_iter().zip(results) {
        let r = r.map_err(|source| SpeechError::Synthesis { line_id: p.line_id.clone(), source })?;
        let file = format!("{}.{}", p.line_id, r.codec.extension());
        fs::write(dir.join(&file), &r.audio_bytes)?;
        let u = units[p.unit];
        lines.push(ScriptLine {
            audio_ref: format!("{podcast_id}/{file}"),
            line_id: p.line_id,
            unit_id: u.unit.unit_id.clone(),
            segment_id: u.segment_id.map(str::to_string),
            sentence_index: p.sentence_index,
            kind: u.unit.kind,
            voice_role: u.unit.voice_role,
            text: p.text,
            voice_id: p.voice_id,
            ssml: p.ssml,
            duration_ms: r.duration_ms,
        });
    }
    Ok(lines)
}

/// Renders a whole podcast and returns its manifest. Audio lands in
/// `audio_root/{podcast_id}/{line_id}.{ext}`.
pub fn render_podcast(
    script: &PodcastScript,
    tts: &dyn SpeechSynthesizer,
    options: &RenderOptions,
    audio_root: &Path,
) -> Result<PodcastManifest, SpeechError> {
    let units: Vec<UnitRef<'_>> = script
        .units_in_order()
        .into_iter()
        .map(|(unit, seg)| UnitRef {
            unit,
            segment_id: seg.map(|s| s.segment_id.as_str()),
            quote: seg.and_then(|s| s.quote.as_ref()),
        })
        .collect();
    let lines = render_units(&script.podcast_id, &units, tts, options, audio_root)?;
    let manifest = PodcastManifest::from_lines(&script.podcast_id, lines);
    manifest.validate()?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembler::{assemble_podcast, Condition, SegmentFlags, SegmentScript};
    use crate::providers::mock::MockSpeechSynthesizer;
    use ssml::SsmlNode;

    fn musk() -> QuoteExtract {
        QuoteExtract {
            author: "Elon Musk".into(),
            descriptor: Some("chief executive of Tesla".into()),
            quote_text: "We are going to keep building the future,".into(),
            source_paragraph_id: "p".into(),
        }
    }

    #[test]
    fn quote_rendering_template() {
        let q = musk();
        let (intro, body) = quote_texts(&q);
        let intro = render_ssml(&ScriptUnit::new("u", UnitKind::QuoteIntro, intro), Some(&q));
        let body = render_ssml(&ScriptUnit::new("v", UnitKind::QuoteBody, body), Some(&q));
        let nodes: Vec<SsmlNode> = intro.iter().chain(&body).flat_map(|s| s.ssml.nodes.clone()).collect();
        let text = |s: &str| vec![SsmlNode::Text(s.into())];
        assert_eq!(
            nodes,
            vec![
                SsmlNode::Emphasis { level: EmphasisLevel::Strong, children: text("Elon Musk") },
                SsmlNode::Break { ms: 300 },
                SsmlNode::Emphasis { level: EmphasisLevel::Reduced, children: text("chief executive of Tesla.") },
                SsmlNode::Break { ms: 300 },
                SsmlNode::Emphasis { level: EmphasisLevel::Moderate, children: text("We are going to keep building the future.") },
            ]
        );
        assert!(intro[0].ssml.to_xml().starts_with("<speak><emphasis level=\"strong\">Elon Musk</emphasis><break time=\"300ms\"/>"));
    }

    #[test]
    fn mismatched_quote_is_plain_and_flagged() {
        let r = render_ssml(&ScriptUnit::new("u", UnitKind::QuoteIntro, "Someone Else."), Some(&musk()));
        assert!(r[0].flagged);
        assert_eq!(r[0].ssml.to_xml(), "<speak>Someone Else.</speak>");
    }

    #[test]
    fn silence_question_and_plain() {
        let r = render_ssml(&ScriptUnit::silence("u", 5000), None);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].ssml.to_xml(), "<speak><break time=\"5000ms\"/></speak>");
        let r = render_ssml(&ScriptUnit::new("u", UnitKind::Question, "Where did the shelf break?"), None);
        assert_eq!(r[0].ssml.to_xml(), "<speak><break time=\"250ms\"/>Where did the shelf break?</speak>");
        let r = render_ssml(&ScriptUnit::new("u", UnitKind::Summary, "Profits & losses rose. Shares <fell>."), None);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].ssml.to_xml(), "<speak>Profits &amp; losses rose.</speak>");
        assert_eq!(r[1].ssml.to_xml(), "<speak>Shares &lt;fell&gt;.</speak>");
    }

    fn segment(id: &str, words: usize) -> SegmentScript {
        let text = |n: usize| format!("{}.", vec!["word"; n].join(" "));
        SegmentScript {
            segment_id: id.into(),
            story_id: id.into(),
            title: id.into(),
            condition: Condition::QaBest,
            units: vec![
                ScriptUnit::new(format!("{id}-u0"), UnitKind::Headline, text(5)),
                ScriptUnit::new(format!("{id}-u1"), UnitKind::Summary, text(words - 5)),
                ScriptUnit::new(format!("{id}-u2"), UnitKind::Question, "Who spoke?"),
                ScriptUnit::new(format!("{id}-u3"), UnitKind::Answer, text(20)),
            ],
            recommended_questions: vec![],
            quote: None,
            flags: SegmentFlags::default(),
        }
    }

    #[test]
    fn manifest_offsets_and_voices() {
        let dir = tempfile::tempdir().unwrap();
        let script =
            assemble_podcast("pod", vec![segment("a", 100), segment("b", 100), segment("c", 100)], 180, true).unwrap();
        let m = render_podcast(&script, &MockSpeechSynthesizer::default(), &RenderOptions::default(), dir.path()).unwrap();
        assert_eq!(m.segment_offsets.len(), 3);
        assert!(m.segment_offsets.windows(2).all(|w| w[0].start_ms < w[1].start_ms));
        assert_eq!(m.total_duration_ms, m.lines.iter().map(|l| l.duration_ms).sum::<u64>());
        let q = m.lines.iter().find(|l| l.kind == UnitKind::Question).unwrap();
        assert_eq!(q.voice_id, "en-US-Wavenet-H");
        assert!(m.lines.iter().all(|l| {
            let f = dir.path().join(&l.audio_ref);
            f.exists() && fs::metadata(f).unwrap().len() > 0
        }));
        let back: PodcastManifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(m.line_index("greeting-u0-s0") == Some(0));
    }

    #[test]
    fn mock_segment_duration() {
        let dir = tempfile::tempdir().unwrap();
        // 5 + 100 + 2 + 20 = 127 words in 4 sentences plus one 250 ms lead
        let script = assemble_podcast("pod", vec![segment("a", 105)], 60, false).unwrap();
        let m = render_podcast(&script, &MockSpeechSynthesizer::default(), &RenderOptions::default(), dir.path()).unwrap();
        let expected: u64 = [5u64, 100, 2, 20].iter().map(|w| (*w as f64 / 2.25 * 1000.0).round() as u64).sum::<u64>() + 250;
        assert_eq!(m.segment_duration_ms("a"), expected);
    }

    #[test]
    fn validator_catches_inconsistency() {
        let dir = tempfile::tempdir().unwrap();
        let script = assemble_podcast("pod", vec![segment("a", 50), segment("b", 50)], 60, false).unwrap();
        let m = render_podcast(&script, &MockSpeechSynthesizer::default(), &RenderOptions::default(), dir.path()).unwrap();
        let mut bad = m.clone();
        bad.total_duration_ms += 1;
        assert!(bad.validate().is_err());
        let mut bad = m.clone();
        bad.segment_offsets.swap(0, 1);
        assert!(bad.validate().is_err());
        let mut bad = m.clone();
        bad.segment_offsets[1].start_ms -= 1;
        assert!(bad.validate().is_err());
        let mut bad = m;
        bad.lines[1].line_id = bad.lines[0].line_id.clone();
        assert!(bad.validate().is_err());
    }

    struct Broken;
    impl SpeechSynthesizer for Broken {
        fn synthesize(&self, _: &str, _: &str) -> Result<SpeechResult, ProviderError> {
            Err(ProviderError::Unavailable("down".into()))
        }
    }

    #[test]
    fn failing_line_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let script = assemble_podcast("pod", vec![segment("a", 50)], 60, false).unwrap();
        match render_podcast(&script, &Broken, &RenderOptions::default(), dir.path()) {
            Err(SpeechError::Synthesis { line_id, .. }) => assert_eq!(line_id, "greeting-u0-s0"),
            other => panic!("{other:?}"),
        }
    }
}
