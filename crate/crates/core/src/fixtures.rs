//! Shipped sample stories and seeded synthetic data for tests and demos.

use std::path::PathBuf;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{ingest_cluster, Article, CorpusError, Paragraph, StoryCluster};
use crate::providers::{Interrogative, QuestionCandidate};
use crate::qagraph::{Edge, QAGraph};
use crate::text::word_count;

/// `fixtures/` next to this crate's manifest.
pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn stories_dir() -> PathBuf {
    fixture_dir().join("stories")
}

pub fn reference_dir() -> PathBuf {
    fixture_dir().join("reference")
}

/// The shipped stories, sorted by file name.
pub fn load_fixture_stories() -> Result<Vec<StoryCluster>, CorpusError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(stories_dir())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(|p| ingest_cluster(&std::fs::read_to_string(p)?)).collect()
}

pub fn fixture_story(story_id: &str) -> Result<StoryCluster, CorpusError> {
    load_fixture_stories()?
        .into_iter()
        .find(|c| c.story_id == story_id)
        .ok_or_else(|| CorpusError::NotFound(story_id.to_string()))
}

const SYLLABLES: [&str; 16] =
    ["ka", "lo", "mi", "ren", "to", "sa", "vi", "dun", "pe", "mar", "zo", "li", "qua", "ber", "ni", "gos"];

/// A pronounceable token that is never a stopword.
fn synthetic_word(i: usize) -> String {
    let a = SYLLABLES[i % SYLLABLES.len()];
    let b = SYLLABLES[(i / SYLLABLES.len()) % SYLLABLES.len()];
    format!("{a}{b}x")
}

/// A random story over a Zipf-distributed vocabulary, so some words recur in
/// many paragraphs and questions are answered by several of them.
pub fn random_cluster(seed: u64, n_paragraphs: usize) -> StoryCluster {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab: Vec<String> = (0..60).map(synthetic_word).collect();
    let zipf = WeightedIndex::new((1..=vocab.len()).map(|r| 1.0 / r as f64)).expect("positive weights");
    let n_articles = rng.random_range(1..=3usize).min(n_paragraphs.max(1));
    let mut bodies = vec![Vec::new(); n_articles];
    for i in 0..n_paragraphs {
        let len = rng.random_range(12..=30);
        let words: Vec<&str> = (0..len).map(|_| vocab[zipf.sample(&mut rng)].as_str()).collect();
        let mut text = words.join(" ");
        text[..1].make_ascii_uppercase();
        text.push('.');
        bodies[i % n_articles].push(text);
    }
    let articles = bodies
        .into_iter()
        .enumerate()
        .map(|(i, paras)| Article {
            article_id: format!("r{i}"),
            source_name: "Synthetic".into(),
            headline: format!("Synthetic story {seed} part {i}"),
            published_at: chrono::DateTime::UNIX_EPOCH,
            human_summary: None,
            body: paras.join("\n"),
        })
        .collect();
    StoryCluster::new(format!("random-{seed}"), format!("synthetic story {seed}"), articles)
        .expect("at least one article")
}

/// A random bipartite graph with `n_q` questions, `n_p` paragraphs and each
/// edge present with probability `density`.
pub fn random_graph(seed: u64, n_q: usize, n_p: usize, density: f64) -> QAGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let questions: Vec<QuestionCandidate> = (0..n_q)
        .map(|i| {
            let extra = rng.random_range(1..6);
            let text = format!("What {}?", vec!["thing"; extra].join(" "));
            QuestionCandidate {
                question_id: format!("q{i:03}"),
                source_paragraph_id: format!("p{:03}", i % n_p.max(1)),
                interrogative: Interrogative::What,
                word_count: word_count(&text),
                text,
                repaired: false,
            }
        })
        .collect();
    let paragraphs: Vec<Paragraph> = (0..n_p)
        .map(|i| {
            let len = rng.random_range(10..=45);
            Paragraph::new(format!("p{i:03}"), "a".into(), format!("Answer {}", vec!["word"; len - 1].join(" ")))
        })
        .collect();
    let mut edges = Vec::new();
    for q in &questions {
        for p in &paragraphs {
            if rng.random_bool(density) {
                edges.push(Edge {
                    question_id: q.question_id.clone(),
                    paragraph_id: p.paragraph_id.clone(),
                    span_text: "Answer".into(),
                    span_score: (rng.random_range(0..100) as f64) / 10.0,
                });
            }
        }
    }
    QAGraph::new(questions, paragraphs, edges).expect("generated graph is well formed")
}
