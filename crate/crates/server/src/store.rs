//! On-disk layout of a data directory.
//!
//! ```text
//! stories/{story_id}.json
//! reference/{story_id}.json
//! podcasts/{podcast_id}/config.json
//! podcasts/{podcast_id}/script.json
//! podcasts/{podcast_id}/manifest.json
//! podcasts/{podcast_id}/events.jsonl
//! podcasts/{podcast_id}/questions.jsonl
//! audio/{podcast_id}/{line_id}.{ext}
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use podgen::liveqa::ListenerQuestion;
use podgen::{PodcastManifest, PodcastRequest, PodcastScript, ScriptLine, StoryStore};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::events::InteractionEvent;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PodcastConfig {
    pub podcast_id: String,
    pub request: PodcastRequest,
}

/// A listener question with the lines rendered for its reply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionRecord {
    pub question: ListenerQuestion,
    pub reply_lines: Vec<ScriptLine>,
}

#[derive(Debug, Clone)]
pub struct DataDir {
    root: PathBuf,
}

impl DataDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DataDir { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn stories(&self) -> anyhow::Result<StoryStore> {
        Ok(StoryStore::open(self.root.join("stories"))?)
    }

    pub fn reference_dir(&self) -> PathBuf {
        self.root.join("reference")
    }

    pub fn audio_root(&self) -> PathBuf {
        self.root.join("audio")
    }

    pub fn podcast_dir(&self, podcast_id: &str) -> PathBuf {
        self.root.join("podcasts").join(podcast_id)
    }

    pub fn exists(&self, podcast_id: &str) -> bool {
        valid_id(podcast_id) && self.podcast_dir(podcast_id).join("manifest.json").is_file()
    }

    pub fn save(&self, config: &PodcastConfig, script: &PodcastScript, manifest: &PodcastManifest) -> anyhow::Result<()> {
        let dir = self.podcast_dir(&config.podcast_id);
        fs::create_dir_all(&dir)?;
        write_json(&dir.join("config.json"), config)?;
        fs::write(dir.join("script.json"), script.to_json())?;
        write_json(&dir.join("manifest.json"), manifest)?;
        Ok(())
    }

    pub fn config(&self, podcast_id: &str) -> anyhow::Result<PodcastConfig> {
        read_json(&self.podcast_dir(podcast_id).join("config.json"))
    }

    pub fn manifest(&self, podcast_id: &str) -> anyhow::Result<PodcastManifest> {
        read_json(&self.podcast_dir(podcast_id).join("manifest.json"))
    }

    pub fn script(&self, podcast_id: &str) -> anyhow::Result<PodcastScript> {
        read_json(&self.podcast_dir(podcast_id).join("script.json"))
    }

    pub fn append_event(&self, event: &InteractionEvent) -> anyhow::Result<()> {
        append_line(&self.podcast_dir(&event.podcast_id).join("events.jsonl"), event)
    }

    pub fn events(&self, podcast_id: &str) -> anyhow::Result<Vec<InteractionEvent>> {
        read_lines(&self.podcast_dir(podcast_id).join("events.jsonl"))
    }

    pub fn append_question(&self, podcast_id: &str, record: &QuestionRecord) -> anyhow::Result<()> {
        append_line(&self.podcast_dir(podcast_id).join("questions.jsonl"), record)
    }

    pub fn questions(&self, podcast_id: &str) -> anyhow::Result<Vec<QuestionRecord>> {
        read_lines(&self.podcast_dir(podcast_id).join("questions.jsonl"))
    }
}

/// Ids become path components, so only a conservative alphabet is allowed.
pub fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 128 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?).with_context(|| format!("writing {}", path.display()))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&raw).with_context(|| format!("parsing {}", path.display()))
}

fn append_line<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(f, "{}", serde_json::to_string(value)?)?;
    Ok(())
}

/// Reads a JSON-lines file; a missing file is empty.
pub fn read_lines<T: DeserializeOwned>(path: &Path) -> anyhow::Result<Vec<T>> {
    let raw = match fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    raw.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{} line {}", path.display(), i + 1)))
        .collect()
}
