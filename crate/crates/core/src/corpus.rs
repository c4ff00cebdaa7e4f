//! Story clusters: ingestion of pre-clustered articles, paragraph filtering,
//! headline choice and introductory summary choice.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::providers::{ProviderError, Summarizer};
use crate::quotes;
use crate::text::{split_sentences, word_count};

/// Paragraphs outside this word range never enter a Q&A session.
pub const MIN_PARAGRAPH_WORDS: usize = 10;
pub const MAX_PARAGRAPH_WORDS: usize = 45;

/// An introductory summary needs at least this many sentences and words.
pub const SUMMARY_MIN_SENTENCES: usize = 2;
pub const SUMMARY_MIN_WORDS: usize = 20;

/// Characters the speech engine stumbles over in headlines.
pub const HEADLINE_SPECIAL_CHARS: [char; 4] = [':', '-', ';', '|'];
pub const HEADLINE_SPECIAL_PENALTY: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("invalid story document at `{field}`: {reason}")]
    Schema { field: String, reason: String },
    #[error("story has no articles")]
    EmptyCluster,
    #[error("story `{0}` not found")]
    NotFound(String),
    #[error("no summary available: {0}")]
    SummaryUnavailable(#[source] ProviderError),
    #[error("story store i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("story store json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Article {
    pub article_id: String,
    pub source_name: String,
    pub headline: String,
    pub published_at: DateTime<Utc>,
    pub human_summary: Option<String>,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Paragraph {
    pub paragraph_id: String,
    pub article_id: String,
    pub text: String,
    pub word_count: usize,
    pub is_quote: bool,
    pub passes_filter: bool,
}

impl Paragraph {
    pub fn new(paragraph_id: String, article_id: String, text: String) -> Self {
        let word_count = word_count(&text);
        let is_quote = quotes::detect_quote(&text);
        let passes_filter = passes_filter(word_count, is_quote);
        Paragraph { paragraph_id, article_id, text, word_count, is_quote, passes_filter }
    }
}

pub fn passes_filter(word_count: usize, is_quote: bool) -> bool {
    (MIN_PARAGRAPH_WORDS..=MAX_PARAGRAPH_WORDS).contains(&word_count) && !is_quote
}

/// One news event and its source articles. Immutable once ingested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoryCluster {
    pub story_id: String,
    pub title: String,
    pub articles: Vec<Article>,
    pub paragraphs: Vec<Paragraph>,
}

impl StoryCluster {
    /// Builds a cluster, deriving paragraphs from article bodies.
    pub fn new(story_id: String, title: String, articles: Vec<Article>) -> Result<Self, CorpusError> {
        if articles.is_empty() {
            return Err(CorpusError::EmptyCluster);
        }
        let paragraphs = articles.iter().flat_map(split_paragraphs).collect();
        Ok(StoryCluster { story_id, title, articles, paragraphs })
    }

    pub fn filtered_paragraphs(&self) -> impl Iterator<Item = &Paragraph> {
        self.paragraphs.iter().filter(|p| p.passes_filter)
    }

    pub fn paragraph(&self, paragraph_id: &str) -> Option<&Paragraph> {
        self.paragraphs.iter().find(|p| p.paragraph_id == paragraph_id)
    }

    pub fn article(&self, article_id: &str) -> Option<&Article> {
        self.articles.iter().find(|a| a.article_id == article_id)
    }

    /// Serializes back to the story input document.
    pub fn to_input_document(&self) -> StoryDocument {
        StoryDocument {
            story_id: self.story_id.clone(),
            title: self.title.clone(),
            articles: self
                .articles
                .iter()
                .map(|a| ArticleDocument {
                    article_id: a.article_id.clone(),
                    source_name: a.source_name.clone(),
                    headline: a.headline.clone(),
                    published_at: a.published_at.to_rfc3339(),
                    summary: a.human_summary.clone(),
                    body: a.body.clone(),
                })
                .collect(),
        }
    }
}

/// Splits an article body on newlines (after CRLF normalization), dropping
/// blank fragments. Ids are `{article_id}-p{index:03}`.
pub fn split_paragraphs(article: &Article) -> Vec<Paragraph> {
    article
        .body
        .replace("\r\n", "\n")
        .split('\n')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| {
            Paragraph::new(format!("{}-p{:03}", article.article_id, i), article.article_id.clone(), s.to_string())
        })
        .collect()
}

/// Wire form of a story, as read from and written to the story store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoryDocument {
    pub story_id: String,
    pub title: String,
    pub articles: Vec<ArticleDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleDocument {
    pub article_id: String,
    pub source_name: String,
    pub headline: String,
    pub published_at: String,
    pub summary: Option<String>,
    pub body: String,
}

/// Parses and validates a story input document.
pub fn ingest_cluster(raw: &str) -> Result<StoryCluster, CorpusError> {
    let doc: Value = serde_json::from_str(raw)
        .map_err(|e| CorpusError::Schema { field: "$".into(), reason: e.to_string() })?;
    let obj = doc.as_object().ok_or_else(|| schema("$", "expected an object"))?;
    let story_id = required_str(obj, "story_id", "story_id")?;
    if story_id.trim().is_empty() {
        return Err(schema("story_id", "must not be empty"));
    }
    let title = required_str(obj, "title", "title")?;
    let articles = obj
        .get("articles")
        .ok_or_else(|| schema("articles", "missing"))?
        .as_array()
        .ok_or_else(|| schema("articles", "expected an array"))?;
    if articles.is_empty() {
        return Err(CorpusError::EmptyCluster);
    }

    let mut seen = HashSet::new();
    let mut parsed = Vec::with_capacity(articles.len());
    for (i, a) in articles.iter().enumerate() {
        let path = |f: &str| format!("articles[{i}].{f}");
        let a = a.as_object().ok_or_else(|| schema(&format!("articles[{i}]"), "expected an object"))?;
        let article_id = required_str(a, "article_id", &path("article_id"))?;
        if article_id.trim().is_empty() {
            return Err(schema(&path("article_id"), "must not be empty"));
        }
        if !seen.insert(article_id.clone()) {
            return Err(schema(&path("article_id"), "duplicate article id"));
        }
        let source_name = required_str(a, "source_name", &path("source_name"))?;
        let headline = required_str(a, "headline", &path("headline"))?;
        let published_raw = required_str(a, "published_at", &path("published_at"))?;
        let published_at = DateTime::parse_from_rfc3339(&published_raw)
            .map_err(|e| schema(&path("published_at"), &format!("not an RFC 3339 timestamp ({e})")))?
            .with_timezone(&Utc);
        let human_summary = match a.get("summary") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(schema(&path("summary"), "expected a string or null")),
        };
        let body = required_str(a, "body", &path("body"))?;
        if body.trim().is_empty() {
            return Err(schema(&path("body"), "must not be empty"));
        }
        parsed.push(Article { article_id, source_name, headline, published_at, human_summary, body });
    }
    StoryCluster::new(story_id, title, parsed)
}

fn schema(field: &str, reason: &str) -> CorpusError {
    CorpusError::Schema { field: field.to_string(), reason: reason.to_string() }
}

fn required_str(obj: &serde_json::Map<String, Value>, key: &str, path: &str) -> Result<String, CorpusError> {
    match obj.get(key) {
        None => Err(schema(path, "missing")),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(schema(path, "expected a string")),
    }
}

/// One JSON document per story, `{story_id}.json`, under a data directory.
#[derive(Debug, Clone)]
pub struct StoryStore {
    dir: PathBuf,
}

/// Listing entry for a stored story.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorySummary {
    pub story_id: String,
    pub title: String,
    pub n_articles: usize,
}

impl StoryStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, CorpusError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(StoryStore { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Validates `raw` and persists it.
    pub fn ingest(&self, raw: &str) -> Result<StoryCluster, CorpusError> {
        let cluster = ingest_cluster(raw)?;
        if cluster.story_id.contains(['/', '\\']) || cluster.story_id.starts_with('.') {
            return Err(schema("story_id", "not usable as a file name"));
        }
        let doc = serde_json::to_string_pretty(&cluster.to_input_document())?;
        fs::write(self.path_for(&cluster.story_id), doc)?;
        Ok(cluster)
    }

    pub fn load(&self, story_id: &str) -> Result<StoryCluster, CorpusError> {
        let path = self.path_for(story_id);
        if story_id.contains(['/', '\\']) || !path.is_file() {
            return Err(CorpusError::NotFound(story_id.to_string()));
        }
        ingest_cluster(&fs::read_to_string(path)?)
    }

    pub fn list(&self) -> Result<Vec<StorySummary>, CorpusError> {
        let mut ids: Vec<String> = fs::read_dir(&self.dir)?
            .filter_map(Result::ok)
            .filter_map(|e| {
                let p = e.path();
                (p.extension()? == "json").then(|| p.file_stem()?.to_str().map(str::to_string))?
            })
            .collect();
        ids.sort();
        ids.iter()
            .map(|id| {
                let c = self.load(id)?;
                Ok(StorySummary { story_id: c.story_id, title: c.title, n_articles: c.articles.len() })
            })
            .collect()
    }

    fn path_for(&self, story_id: &str) -> PathBuf {
        self.dir.join(format!("{story_id}.json"))
    }
}

pub fn headline_score(headline: &str) -> usize {
    let specials = headline.chars().filter(|c| HEADLINE_SPECIAL_CHARS.contains(c)).count();
    word_count(headline) + HEADLINE_SPECIAL_PENALTY * specials
}

/// Picks the headline with the lowest score (shorter, fewer special characters).
/// Ties go to the earliest publication, then the smallest article id.
pub fn select_headline(cluster: &StoryCluster) -> &str {
    cluster
        .articles
        .iter()
        .min_by(|a, b| {
            headline_score(&a.headline)
                .cmp(&headline_score(&b.headline))
                .then(a.published_at.cmp(&b.published_at))
                .then(a.article_id.cmp(&b.article_id))
        })
        .map(|a| a.headline.as_str())
        .expect("a cluster always has at least one article")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummaryOrigin {
    Human,
    Generated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryChoice {
    pub text: String,
    pub origin: SummaryOrigin,
    pub article_id: String,
    /// Set when no candidate met the length requirement.
    pub below_length: bool,
}

pub fn meets_summary_length(text: &str) -> bool {
    word_count(text) >= SUMMARY_MIN_WORDS && split_sentences(text).len() >= SUMMARY_MIN_SENTENCES
}

/// Prefers the first human summary that meets the length requirement;
/// otherwise asks the summarizer for one candidate per article.
pub fn select_summary(cluster: &StoryCluster, summarizer: &dyn Summarizer) -> Result<SummaryChoice, CorpusError> {
    if let Some(a) = cluster
        .articles
        .iter()
        .find(|a| a.human_summary.as_deref().is_some_and(meets_summary_length))
    {
        return Ok(SummaryChoice {
            text: a.human_summary.clone().unwrap_or_default(),
            origin: SummaryOrigin::Human,
            article_id: a.article_id.clone(),
            below_length: false,
        });
    }

    let mut candidates = Vec::new();
    let mut last_err = None;
    for a in &cluster.articles {
        match summarizer.summarize(&a.body) {
            Ok(s) => candidates.push((a, s)),
            Err(e) => last_err = Some(e),
        }
    }
    if candidates.is_empty() {
        return Err(CorpusError::SummaryUnavailable(
            last_err.unwrap_or_else(|| ProviderError::Unavailable("no candidates".into())),
        ));
    }

    // First maximum by article order.
    let best = |valid_only: bool| {
        candidates
            .iter()
            .filter(|(_, s)| !valid_only || meets_summary_length(&s.summary))
            .fold(None::<&(&Article, crate::providers::SummaryCandidate)>, |acc, c| match acc {
                Some(b) if b.1.likelihood >= c.1.likelihood => Some(b),
                _ => Some(c),
            })
    };
    let (below_length, (article, cand)) = match best(true) {
        Some(c) => (false, c),
        None => (true, best(false).expect("candidates is non-empty")),
    };
    Ok(SummaryChoice {
        text: cand.summary.clone(),
        origin: SummaryOrigin::Generated,
        article_id: article.article_id.clone(),
        below_length,
    })
}
