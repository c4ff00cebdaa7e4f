//! Deterministic in-process providers.
//!
//! The rules are fixed so that graphs, sessions and renders are reproducible:
//!
//! * summarizer: the shortest prefix of `k` sentences with at least two
//!   sentences and twenty words (or the whole body), likelihood `1/k`;
//! * question generator: the interrogative followed by the paragraph's two
//!   rarest content tokens (rarity counted over the bound corpus), in
//!   paragraph order;
//! * question answerer: answerable when the question and paragraph share at
//!   least two distinct content tokens; the span is the longest run of
//!   paragraph content tokens that appear in the question, `span_score` is
//!   the overlap size and `no_answer_score` is 1.5;
//! * speech: silent WAV lasting `words / wps` seconds plus any SSML breaks.

use std::collections::{HashMap, HashSet};
use std::io::Cursor;
use std::sync::Arc;

use super::{
    AnswerVerdict, Codec, Interrogative, ProviderError, QuestionAnswerer, QuestionGenerator, SpeechResult,
    SpeechSynthesizer, Summarizer, SummaryCandidate, DEFAULT_WORDS_PER_SECOND,
};
use crate::corpus::{SUMMARY_MIN_SENTENCES, SUMMARY_MIN_WORDS};
use crate::speech::ssml::SsmlDocument;
use crate::text::{content_tokens, is_content_token, split_sentences, tokens, word_count};

pub const MOCK_NO_ANSWER_SCORE: f64 = 1.5;
pub const MOCK_SAMPLE_RATE: u32 = 22_050;

#[derive(Debug, Clone, Copy, Default)]
pub struct MockSummarizer;

impl Summarizer for MockSummarizer {
    fn summarize(&self, article_body: &str) -> Result<SummaryCandidate, ProviderError> {
        let sentences = split_sentences(article_body);
        if sentences.is_empty() {
            return Err(ProviderError::Precondition("empty article body".into()));
        }
        let mut words = 0;
        let mut k = sentences.len();
        for (i, s) in sentences.iter().enumerate() {
            words += word_count(s);
            if i + 1 >= SUMMARY_MIN_SENTENCES && words >= SUMMARY_MIN_WORDS {
                k = i + 1;
                break;
            }
        }
        Ok(SummaryCandidate { summary: sentences[..k].join(" "), likelihood: 1.0 / k as f64 })
    }
}

/// Token frequencies over the bound corpus; empty until bound.
#[derive(Debug, Clone, Default)]
pub struct MockQuestionGenerator {
    frequencies: Option<Arc<HashMap<String, usize>>>,
}

impl MockQuestionGenerator {
    pub fn for_corpus<S: AsRef<str>>(paragraphs: &[S]) -> Self {
        let mut freq = HashMap::new();
        for p in paragraphs {
            for t in content_tokens(p.as_ref()) {
                *freq.entry(t).or_insert(0) += 1;
            }
        }
        MockQuestionGenerator { frequencies: Some(Arc::new(freq)) }
    }

    /// The two rarest distinct content tokens of `paragraph`, in paragraph order.
    pub fn rarest_tokens(&self, paragraph: &str) -> Vec<String> {
        let local;
        let freq = match &self.frequencies {
            Some(f) => f.as_ref(),
            None => {
                local = Self::for_corpus(&[paragraph]).frequencies.unwrap_or_default();
                local.as_ref()
            }
        };
        let mut seen = HashSet::new();
        let mut ranked: Vec<(usize, usize, String)> = content_tokens(paragraph)
            .into_iter()
            .filter(|t| seen.insert(t.clone()))
            .enumerate()
            .map(|(pos, t)| (freq.get(&t).copied().unwrap_or(0), pos, t))
            .collect();
        ranked.sort();
        ranked.truncate(2);
        ranked.sort_by_key(|r| r.1);
        ranked.into_iter().map(|r| r.2).collect()
    }
}

impl QuestionGenerator for MockQuestionGenerator {
    fn generate_question(&self, paragraph: &str, interrogative: Interrogative) -> Result<String, ProviderError> {
        if paragraph.trim().is_empty() {
            return Err(ProviderError::Precondition("empty paragraph".into()));
        }
        let picked = self.rarest_tokens(paragraph);
        if picked.is_empty() {
            return Ok(format!("{interrogative} happened?"));
        }
        Ok(format!("{} {}?", interrogative, picked.join(" ")))
    }

    fn with_corpus(&self, paragraphs: &[&str]) -> Option<Arc<dyn QuestionGenerator>> {
        Some(Arc::new(Self::for_corpus(paragraphs)))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MockQuestionAnswerer;

impl QuestionAnswerer for MockQuestionAnswerer {
    fn answer_question(&self, paragraph: &str, question: &str) -> Result<AnswerVerdict, ProviderError> {
        if paragraph.trim().is_empty() || question.trim().is_empty() {
            return Err(ProviderError::Precondition("paragraph and question must be non-empty".into()));
        }
        let q: HashSet<String> = content_tokens(question).into_iter().collect();
        let p_tokens = tokens(paragraph);
        let p_content: HashSet<String> =
            p_tokens.iter().map(|t| t.lower()).filter(|t| is_content_token(t)).collect();
        let overlap = q.intersection(&p_content).count();
        let span_score = overlap as f64;
        if span_score <= MOCK_NO_ANSWER_SCORE {
            return Ok(AnswerVerdict::no_answer(span_score, MOCK_NO_ANSWER_SCORE));
        }

        // Longest run of consecutive paragraph tokens that are shared content words.
        let mut best: Option<(usize, usize)> = None;
        let mut run_start: Option<usize> = None;
        for i in 0..=p_tokens.len() {
            let hit = p_tokens.get(i).is_some_and(|t| {
                let l = t.lower();
                is_content_token(&l) && q.contains(&l)
            });
            match (hit, run_start) {
                (true, None) => run_start = Some(i),
                (false, Some(s)) => {
                    if best.is_none_or(|(bs, be)| i - s > be - bs) {
                        best = Some((s, i));
                    }
                    run_start = None;
                }
                _ => {}
            }
        }
        let (s, e) = best.expect("overlap implies at least one shared token");
        let span = &paragraph[p_tokens[s].start..p_tokens[e - 1].end];
        Ok(AnswerVerdict {
            has_answer: true,
            span_text: Some(span.to_string()),
            span_score,
            no_answer_score: MOCK_NO_ANSWER_SCORE,
        })
    }
}

/// Answers from a fixed table of `(question, span)` pairs: a paragraph
/// answers a listed question when it contains the span. Everything else
/// falls back to [`MockQuestionAnswerer`].
#[derive(Debug, Clone, Default)]
pub struct ScriptedAnswerer {
    table: HashMap<String, String>,
    pub score: f64,
}

impl ScriptedAnswerer {
    pub fn new<I, Q, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (Q, S)>,
        Q: Into<String>,
        S: Into<String>,
    {
        ScriptedAnswerer {
            table: entries.into_iter().map(|(q, s)| (normalize(&q.into()), s.into())).collect(),
            score: 5.0,
        }
    }
}

fn normalize(q: &str) -> String {
    q.trim().to_lowercase()
}

impl QuestionAnswerer for ScriptedAnswerer {
    fn answer_question(&self, paragraph: &str, question: &str) -> Result<AnswerVerdict, ProviderError> {
        match self.table.get(&normalize(question)) {
            Some(span) if paragraph.contains(span.as_str()) => {
                AnswerVerdict::checked(paragraph, Some(span.clone()), self.score, MOCK_NO_ANSWER_SCORE)
            }
            Some(_) => Ok(AnswerVerdict::no_answer(0.0, MOCK_NO_ANSWER_SCORE)),
            None => MockQuestionAnswerer.answer_question(paragraph, question),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MockSpeechSynthesizer {
    pub words_per_second: f64,
    /// Accepted voice ids; empty accepts any.
    pub voices: Vec<String>,
}

impl Default for MockSpeechSynthesizer {
    fn default() -> Self {
        MockSpeechSynthesizer {
            words_per_second: DEFAULT_WORDS_PER_SECOND,
            voices: crate::speech::VoiceConfig::default().all().map(str::to_string).collect(),
        }
    }
}

impl MockSpeechSynthesizer {
    pub fn duration_ms(&self, words: usize, break_ms: u64) -> u64 {
        (words as f64 / self.words_per_second * 1000.0).round() as u64 + break_ms
    }
}

impl SpeechSynthesizer for MockSpeechSynthesizer {
    fn synthesize(&self, ssml: &str, voice_id: &str) -> Result<SpeechResult, ProviderError> {
        if !self.voices.is_empty() && !self.voices.iter().any(|v| v == voice_id) {
            return Err(ProviderError::VoiceUnknown(voice_id.to_string()));
        }
        let doc = SsmlDocument::parse(ssml).map_err(|e| ProviderError::Precondition(e.to_string()))?;
        let words = word_count(&doc.plain_text());
        let duration_ms = self.duration_ms(words, doc.total_break_ms());
        if duration_ms == 0 {
            return Err(ProviderError::Precondition("nothing to speak".into()));
        }
        Ok(SpeechResult { audio_bytes: silent_wav(duration_ms), duration_ms, codec: Codec::WavPcm16Mono22050 })
    }
}

/// PCM16 mono 22050 Hz silence of the given length.
pub fn silent_wav(duration_ms: u64) -> Vec<u8> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: MOCK_SAMPLE_RATE,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let samples = duration_ms * u64::from(MOCK_SAMPLE_RATE) / 1000;
    let mut cursor = Cursor::new(Vec::new());
    {
        let mut w = hound::WavWriter::new(&mut cursor, spec).expect("in-memory wav writer");
        let mut zeros = w.get_i16_writer(samples as u32);
        for _ in 0..samples {
            zeros.write_sample(0);
        }
        zeros.flush().expect("in-memory wav write");
        w.finalize().expect("in-memory wav finalize");
    }
    cursor.into_inner()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::providers::constrained_question;
    use proptest::prelude::*;

    #[test]
    fn summarizer_takes_minimal_prefix() {
        let body = "Short opener here. Second sentence is also quite short. Third sentence pushes the running total well past twenty words now. Fourth. Fifth.";
        // words per sentence: 3, 6, 11 -> k = 3
        let s = MockSummarizer.summarize(body).unwrap();
        assert_eq!(s.likelihood, 1.0 / 3.0);
        assert!(s.summary.ends_with("past twenty words now."));
        assert_eq!(s.summary.split_whitespace().count(), 20);
        assert!(MockSummarizer.summarize("   ").is_err());
    }

    #[test]
    fn question_uses_two_rarest_tokens() {
        let corpus = [
            "The iceberg broke off the Brunt shelf in Antarctica",
            "The iceberg drifted as scientists in Antarctica watched it broke apart",
            "Another iceberg broke away near Antarctica last year",
        ];
        let g = MockQuestionGenerator::for_corpus(&corpus);
        let q = g.generate_question(corpus[0], Interrogative::Where).unwrap();
        assert_eq!(q, "Where brunt shelf?");
    }

    #[test]
    fn seven_distinct_interrogatives() {
        let g = MockQuestionGenerator::default();
        let p = "The union vote at the Amazon warehouse in Bessemer failed by a wide margin";
        let qs: Vec<_> =
            Interrogative::ALL.iter().map(|i| constrained_question(&g, p, *i).unwrap()).collect();
        for (q, i) in qs.iter().zip(Interrogative::ALL) {
            assert!(i.begins(&q.text) && q.text.ends_with('?') && !q.repaired, "{q:?}");
        }
        let firsts: HashSet<_> = qs.iter().map(|q| q.text.split(' ').next().unwrap().to_string()).collect();
        assert_eq!(firsts.len(), 7);
    }

    #[test]
    fn answerer_overlap_rule() {
        let p = "The iceberg broke off the Brunt shelf, near the Brunt shelf research station.";
        let v = MockQuestionAnswerer.answer_question(p, "Where is the Brunt shelf?").unwrap();
        // overlap {brunt, shelf} = 2 > 1.5
        assert!(v.has_answer);
        assert_eq!(v.span_text.as_deref(), Some("Brunt shelf"));
        assert_eq!(v.span_score, 2.0);
        assert_eq!(v.no_answer_score, 1.5);

        let v = MockQuestionAnswerer.answer_question(p, "Who won the football match?").unwrap();
        assert!(!v.has_answer && v.span_text.is_none());
        assert!(MockQuestionAnswerer.answer_question("", "q").is_err());
    }

    #[test]
    fn scripted_answers() {
        let a = ScriptedAnswerer::new([("Where are Rohingya refugees from?", "Myanmar")]);
        let v = a
            .answer_question("They will be deported back to Myanmar.", "where are Rohingya refugees from? ")
            .unwrap();
        assert_eq!(v.span_text.as_deref(), Some("Myanmar"));
        let v = a.answer_question("Nothing relevant.", "Where are Rohingya refugees from?").unwrap();
        assert!(!v.has_answer);
    }

    #[test]
    fn speech_durations() {
        let tts = MockSpeechSynthesizer::default();
        let nine = "<speak>one two three four five six seven eight nine</speak>";
        let r = tts.synthesize(nine, "en-US-Wavenet-J").unwrap();
        assert_eq!(r.duration_ms, 4000);
        assert_eq!(r.codec, Codec::WavPcm16Mono22050);
        let reader = hound::WavReader::new(Cursor::new(&r.audio_bytes)).unwrap();
        assert_eq!(reader.spec().sample_rate, 22_050);
        assert_eq!(reader.spec().channels, 1);
        assert_eq!(reader.duration(), 4 * 22_050);

        let long = format!("<speak>{}</speak>", vec!["word"; 135].join(" "));
        assert_eq!(tts.synthesize(&long, "en-US-Wavenet-H").unwrap().duration_ms, 60_000);

        let silence = r#"<speak><break time="5000ms"/></speak>"#;
        assert_eq!(tts.synthesize(silence, "en-US-Wavenet-J").unwrap().duration_ms, 5000);

        assert!(matches!(tts.synthesize("<speak></speak>", "en-US-Wavenet-J"), Err(ProviderError::Precondition(_))));
        assert!(matches!(tts.synthesize(nine, "robot-voice"), Err(ProviderError::VoiceUnknown(_))));
    }

    proptest! {
        #[test]
        fn verdict_invariants(p in "[A-Za-z ,.]{1,120}", q in "[A-Za-z ?]{1,60}") {
            prop_assume!(!p.trim().is_empty() && !q.trim().is_empty());
            let v = MockQuestionAnswerer.answer_question(&p, &q).unwrap();
            prop_assert_eq!(v.has_answer, v.span_score > v.no_answer_score);
            prop_assert_eq!(v.has_answer, v.span_text.is_some());
            if let Some(s) = &v.span_text {
                prop_assert!(p.contains(s.as_str()));
            }
            let again = MockQuestionAnswerer.answer_question(&p, &q).unwrap();
            prop_assert_eq!(v, again);
        }

        #[test]
        fn questions_always_constrained(p in "[A-Za-z ]{1,100}", idx in 0usize..7) {
            prop_assume!(!p.trim().is_empty());
            let i = Interrogative::ALL[idx];
            let q = constrained_question(&MockQuestionGenerator::default(), &p, i).unwrap();
            prop_assert!(i.begins(&q.text));
            prop_assert!(q.text.ends_with('?'));
        }
    }
}
