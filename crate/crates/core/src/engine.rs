//! End-to-end generation: stories in, script and rendered manifest out.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::assembler::{
    assemble_podcast, build_segment, word_budget_at, AssemblyError, Condition, PodcastScript, SegmentOptions,
    RECOMMENDED_PER_SEGMENT,
};
use crate::corpus::StoryCluster;
use crate::liveqa::{answer_listener_question, LiveAnswer, LiveQaError, DEFAULT_TAU};
use crate::providers::{fan_out, Providers, DEFAULT_PARALLELISM, DEFAULT_WORDS_PER_SECOND};
use crate::speech::{render_podcast, render_units, PodcastManifest, RenderOptions, ScriptLine, SpeechError, UnitRef, VoiceConfig};

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Speech(#[from] SpeechError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub words_per_second: f64,
    pub parallelism: usize,
    /// Margin a live answer must exceed.
    pub tau: f64,
    pub voices: VoiceConfig,
    pub reference_dir: Option<PathBuf>,
    pub recommended: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            words_per_second: DEFAULT_WORDS_PER_SECOND,
            parallelism: DEFAULT_PARALLELISM,
            tau: DEFAULT_TAU,
            voices: VoiceConfig::default(),
            reference_dir: None,
            recommended: RECOMMENDED_PER_SEGMENT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PodcastRequest {
    pub story_ids: Vec<String>,
    pub duration_s: u32,
    pub condition: Condition,
    #[serde(default)]
    pub with_breaks: bool,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Engine {
    pub providers: Providers,
    pub config: EngineConfig,
}

impl Engine {
    pub fn new(providers: Providers, config: EngineConfig) -> Self {
        Engine { providers, config }
    }

    /// Mock providers with default settings.
    pub fn mock() -> Self {
        Engine::new(Providers::mock(), EngineConfig::default())
    }

    pub fn render_options(&self) -> RenderOptions {
        RenderOptions { voices: self.config.voices.clone(), parallelism: self.config.parallelism }
    }

    /// Builds the script for `request`, one segment per story in request order.
    /// `clusters` must contain every requested story.
    pub fn build_script(
        &self,
        podcast_id: &str,
        clusters: &[StoryCluster],
        request: &PodcastRequest,
    ) -> Result<PodcastScript, EngineError> {
        if request.story_ids.is_empty() {
            return Err(EngineError::InvalidRequest("no stories requested".into()));
        }
        let mut seen = HashSet::new();
        let mut chosen = Vec::new();
        for id in &request.story_ids {
            if !seen.insert(id.as_str()) {
                return Err(EngineError::InvalidRequest(format!("story `{id}` requested twice")));
            }
            let c = clusters
                .iter()
                .find(|c| &c.story_id == id)
                .ok_or_else(|| EngineError::InvalidRequest(format!("unknown story `{id}`")))?;
            chosen.push(c);
        }
        let budget = word_budget_at(request.duration_s, chosen.len(), self.config.words_per_second)?;
        let options = SegmentOptions {
            parallelism: self.config.parallelism,
            reference_dir: self.config.reference_dir.clone(),
            recommended: self.config.recommended,
        };
        let segments = fan_out(&chosen, chosen.len(), |c| {
            build_segment(c, request.condition, budget, request.seed, &self.providers, &options)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        Ok(assemble_podcast(podcast_id, segments, request.duration_s, request.with_breaks)?)
    }

    /// Synthesizes every sentence into `audio_root/{podcast_id}/`.
    pub fn render(&self, script: &PodcastScript, audio_root: &Path) -> Result<PodcastManifest, EngineError> {
        Ok(render_podcast(script, self.providers.speech.as_ref(), &self.render_options(), audio_root)?)
    }

    /// Script and manifest in one go.
    pub fn generate(
        &self,
        podcast_id: &str,
        clusters: &[StoryCluster],
        request: &PodcastRequest,
        audio_root: &Path,
    ) -> Result<(PodcastScript, PodcastManifest), EngineError> {
        let script = self.build_script(podcast_id, clusters, request)?;
        let manifest = self.render(&script, audio_root)?;
        Ok((script, manifest))
    }

    pub fn answer(&self, question: &str, cluster: &StoryCluster) -> Result<LiveAnswer, LiveQaError> {
        answer_listener_question(
            question,
            cluster,
            self.providers.question_answerer.as_ref(),
            self.config.tau,
            self.config.parallelism,
        )
    }

    /// Audio lines for a live reply; line ids start with `prefix`.
    pub fn render_reply(
        &self,
        podcast_id: &str,
        prefix: &str,
        segment_id: &str,
        answer: &LiveAnswer,
        audio_root: &Path,
    ) -> Result<Vec<ScriptLine>, EngineError> {
        let units = answer.units(prefix);
        let refs: Vec<UnitRef<'_>> =
            units.iter().map(|unit| UnitRef { unit, segment_id: Some(segment_id), quote: None }).collect();
        Ok(render_units(podcast_id, &refs, self.providers.speech.as_ref(), &self.render_options(), audio_root)?)
    }
}
