//! The question–paragraph answer graph and Q&A session selection.
//!
//! Candidate questions are generated from every eligible paragraph, then each
//! (question, paragraph) pair is put to the answerer; an edge records that the
//! paragraph answers the question. A question's degree approximates how
//! central it is to the story. [`select_session`] repeatedly takes the
//! highest-degree question with its best-scoring paragraph, then drops that
//! paragraph and every question it answers so content is not repeated.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Paragraph, StoryCluster};
use crate::providers::{
    constrained_question, fan_out, Interrogative, ProviderError, QuestionAnswerer, QuestionCandidate, QuestionGenerator,
};
use crate::text::word_count;

/// Graph construction fails when more than this share of pairs errored.
pub const MAX_FAILURE_RATE: f64 = 0.2;

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("story has no paragraph passing the filter")]
    NoEligibleParagraphs,
    #[error("question generation failed for every paragraph: {0}")]
    GenerationFailed(#[source] ProviderError),
    #[error("graph needs at least one question and one paragraph")]
    EmptyInput,
    #[error("{failed} of {total} answer queries failed")]
    GraphIncomplete { failed: usize, total: usize },
    #[error("invalid graph: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub question_id: String,
    pub paragraph_id: String,
    pub span_text: String,
    pub span_score: f64,
}

/// Bipartite answer graph. Questions, paragraphs and edges are kept sorted
/// by id so every traversal is independent of input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphParts")]
pub struct QAGraph {
    questions: Vec<QuestionCandidate>,
    paragraphs: Vec<Paragraph>,
    edges: Vec<Edge>,
    #[serde(default)]
    skipped_pairs: usize,
    #[serde(skip)]
    index: GraphIndex,
}

#[derive(Deserialize)]
struct GraphParts {
    questions: Vec<QuestionCandidate>,
    paragraphs: Vec<Paragraph>,
    edges: Vec<Edge>,
    #[serde(default)]
    skipped_pairs: usize,
}

impl TryFrom<GraphParts> for QAGraph {
    type Error = GraphError;

    fn try_from(p: GraphParts) -> Result<Self, Self::Error> {
        let mut g = QAGraph::new(p.questions, p.paragraphs, p.edges)?;
        g.skipped_pairs = p.skipped_pairs;
        Ok(g)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct GraphIndex {
    /// Per question: (paragraph index, edge index), ascending paragraph id.
    q_adj: Vec<Vec<(usize, usize)>>,
    /// Per paragraph: question indices, ascending question id.
    p_adj: Vec<Vec<usize>>,
}

impl QAGraph {
    /// Validates and canonicalizes a graph.
    pub fn new(
        mut questions: Vec<QuestionCandidate>,
        mut paragraphs: Vec<Paragraph>,
        mut edges: Vec<Edge>,
    ) -> Result<Self, GraphError> {
        questions.sort_by(|a, b| a.question_id.cmp(&b.question_id));
        paragraphs.sort_by(|a, b| a.paragraph_id.cmp(&b.paragraph_id));
        edges.sort_by(|a, b| (&a.question_id, &a.paragraph_id).cmp(&(&b.question_id, &b.paragraph_id)));

        let q_pos: HashMap<&str, usize> =
            questions.iter().enumerate().map(|(i, q)| (q.question_id.as_str(), i)).collect();
        let p_pos: HashMap<&str, usize> =
            paragraphs.iter().enumerate().map(|(i, p)| (p.paragraph_id.as_str(), i)).collect();
        if q_pos.len() != questions.len() {
            return Err(GraphError::Invalid("duplicate question id".into()));
        }
        if p_pos.len() != paragraphs.len() {
            return Err(GraphError::Invalid("duplicate paragraph id".into()));
        }
        if q_pos.keys().any(|k| p_pos.contains_key(k)) {
            return Err(GraphError::Invalid("an id names both a question and a paragraph".into()));
        }

        let mut index = GraphIndex { q_adj: vec![Vec::new(); questions.len()], p_adj: vec![Vec::new(); paragraphs.len()] };
        for (ei, e) in edges.iter().enumerate() {
            let (Some(&qi), Some(&pi)) = (q_pos.get(e.question_id.as_str()), p_pos.get(e.paragraph_id.as_str())) else {
                return Err(GraphError::Invalid(format!(
                    "edge {} -- {} does not join a question to a paragraph",
                    e.question_id, e.paragraph_id
                )));
            };
            if index.q_adj[qi].last().is_some_and(|&(last, _)| last == pi) {
                return Err(GraphError::Invalid(format!("duplicate edge {} -- {}", e.question_id, e.paragraph_id)));
            }
            if e.span_text.is_empty() || !paragraphs[pi].text.contains(e.span_text.as_str()) {
                return Err(GraphError::Invalid(format!("span of edge {} -- {} is not in the paragraph", e.question_id, e.paragraph_id)));
            }
            if !e.span_score.is_finite() {
                return Err(GraphError::Invalid("non-finite span score".into()));
            }
            index.q_adj[qi].push((pi, ei));
            index.p_adj[pi].push(qi);
        }
        Ok(QAGraph { questions, paragraphs, edges, skipped_pairs: 0, index })
    }

    pub fn questions(&self) -> &[QuestionCandidate] {
        &self.questions
    }

    pub fn paragraphs(&self) -> &[Paragraph] {
        &self.paragraphs
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Pairs skipped because the answerer errored.
    pub fn skipped_pairs(&self) -> usize {
        self.skipped_pairs
    }

    pub fn question_degree(&self, question_id: &str) -> usize {
        self.question_index(question_id).map_or(0, |i| self.index.q_adj[i].len())
    }

    pub fn paragraph_degree(&self, paragraph_id: &str) -> usize {
        self.paragraphs
            .binary_search_by(|p| p.paragraph_id.as_str().cmp(paragraph_id))
            .map_or(0, |i| self.index.p_adj[i].len())
    }

    pub fn edge(&self, question_id: &str, paragraph_id: &str) -> Option<&Edge> {
        let qi = self.question_index(question_id)?;
        self.index.q_adj[qi]
            .iter()
            .map(|&(_, ei)| &self.edges[ei])
            .find(|e| e.paragraph_id == paragraph_id)
    }

    fn question_index(&self, question_id: &str) -> Option<usize> {
        self.questions.binary_search_by(|q| q.question_id.as_str().cmp(question_id)).ok()
    }

    /// Graphviz rendering for inspection.
    pub fn to_dot(&self) -> String {
        let esc = |s: &str| s.replace('\\', "\\\\").replace('"', "\\\"");
        let mut out = String::from("graph qa {\n  rankdir=LR;\n");
        for q in &self.questions {
            let _ = writeln!(out, "  \"{}\" [shape=box, label=\"{}\"];", esc(&q.question_id), esc(&q.text));
        }
        for p in &self.paragraphs {
            let _ = writeln!(
                out,
                "  \"{}\" [shape=ellipse, label=\"{} ({} words)\"];",
                esc(&p.paragraph_id),
                esc(&p.paragraph_id),
                p.word_count
            );
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  \"{}\" -- \"{}\" [label=\"{:.2}\"];",
                esc(&e.question_id),
                esc(&e.paragraph_id),
                e.span_score
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Result of candidate generation.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateGeneration {
    /// Deduplicated candidates, in paragraph then interrogative order.
    pub candidates: Vec<QuestionCandidate>,
    /// Questions produced before deduplication.
    pub generated: usize,
    /// Generator calls that failed.
    pub failed: usize,
}

/// Asks for one question per interrogative for every eligible paragraph.
pub fn generate_candidates(
    cluster: &StoryCluster,
    qgen: &dyn QuestionGenerator,
    parallelism: usize,
) -> Result<CandidateGeneration, GraphError> {
    let eligible: Vec<&Paragraph> = cluster.filtered_paragraphs().collect();
    if eligible.is_empty() {
        return Err(GraphError::NoEligibleParagraphs);
    }
    let texts: Vec<&str> = cluster.paragraphs.iter().map(|p| p.text.as_str()).collect();
    let bound = qgen.with_corpus(&texts);
    let qgen: &dyn QuestionGenerator = bound.as_deref().unwrap_or(qgen);

    let tasks: Vec<(&Paragraph, usize, Interrogative)> = eligible
        .iter()
        .flat_map(|p| Interrogative::ALL.into_iter().enumerate().map(move |(i, w)| (*p, i, w)))
        .collect();
    let results = fan_out(&tasks, parallelism, |(p, _, w)| constrained_question(qgen, &p.text, *w));

    let mut seen = HashSet::new();
    let mut candidates = Vec::new();
    let mut generated = 0;
    let mut failed = 0;
    let mut last_err = None;
    for ((p, i, w), r) in tasks.iter().zip(results) {
        match r {
            Ok(q) => {
                generated += 1;
                if seen.insert(q.text.trim().to_lowercase()) {
                    candidates.push(QuestionCandidate {
                        question_id: format!("{}-q{}", p.paragraph_id, i),
                        source_paragraph_id: p.paragraph_id.clone(),
                        interrogative: *w,
                        word_count: word_count(&q.text),
                        text: q.text,
                        repaired: q.repaired,
                    });
                }
            }
            Err(e) => {
                failed += 1;
                last_err = Some(e);
            }
        }
    }
    if generated == 0 {
        return Err(GraphError::GenerationFailed(
            last_err.unwrap_or_else(|| ProviderError::Unavailable("no output".into())),
        ));
    }
    Ok(CandidateGeneration { candidates, generated, failed })
}

/// Queries the answerer for every (question, paragraph) pair.
pub fn build_graph(
    candidates: &[QuestionCandidate],
    paragraphs: &[Paragraph],
    qa: &dyn QuestionAnswerer,
    parallelism: usize,
) -> Result<QAGraph, GraphError> {
    if candidates.is_empty() || paragraphs.is_empty() {
        return Err(GraphError::EmptyInput);
    }
    let pairs: Vec<(&QuestionCandidate, &Paragraph)> =
        candidates.iter().flat_map(|q| paragraphs.iter().map(move |p| (q, p))).collect();
    let verdicts = fan_out(&pairs, parallelism, |(q, p)| qa.answer_question(&p.text, &q.text));

    let mut edges = Vec::new();
    let mut failed = 0;
    for ((q, p), v) in pairs.iter().zip(verdicts) {
        match v {
            Ok(v) if v.has_answer => match v.span_text {
                Some(span) if !span.is_empty() && p.text.contains(span.as_str()) => edges.push(Edge {
                    question_id: q.question_id.clone(),
                    paragraph_id: p.paragraph_id.clone(),
                    span_text: span,
                    span_score: v.span_score,
                }),
                _ => failed += 1,
            },
            Ok(_) => {}
            Err(_) => failed += 1,
        }
    }
    let total = pairs.len();
    if failed as f64 > MAX_FAILURE_RATE * total as f64 {
        return Err(GraphError::GraphIncomplete { failed, total });
    }
    let mut g = QAGraph::new(candidates.to_vec(), paragraphs.to_vec(), edges)?;
    g.skipped_pairs = failed;
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QAPair {
    pub question: QuestionCandidate,
    pub paragraph: Paragraph,
    pub span_text: String,
    pub span_score: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct QASession {
    pub pairs: Vec<QAPair>,
    pub total_words: usize,
}

impl QASession {
    fn push(&mut self, g: &QAGraph, qi: usize, pi: usize) {
        let q = &g.questions[qi];
        let p = &g.paragraphs[pi];
        let e = g.edge(&q.question_id, &p.paragraph_id).expect("pair comes from an edge");
        self.total_words += q.word_count + p.word_count;
        self.pairs.push(QAPair {
            question: q.clone(),
            paragraph: p.clone(),
            span_text: e.span_text.clone(),
            span_score: e.span_score,
        });
    }
}

/// Mutable view used while a session is being drawn from a graph.
struct Working<'g> {
    g: &'g QAGraph,
    q_alive: Vec<bool>,
    p_alive: Vec<bool>,
}

impl<'g> Working<'g> {
    fn new(g: &'g QAGraph) -> Self {
        Working { g, q_alive: vec![true; g.questions.len()], p_alive: vec![true; g.paragraphs.len()] }
    }

    fn live_neighbors(&self, qi: usize) -> impl Iterator<Item = (usize, &'g Edge)> + '_ {
        self.g.index.q_adj[qi].iter().filter(|(pi, _)| self.p_alive[*pi]).map(|&(pi, ei)| (pi, &self.g.edges[ei]))
    }

    fn degree(&self, qi: usize) -> (usize, f64) {
        self.live_neighbors(qi).fold((0, 0.0), |(d, s), (_, e)| (d + 1, s + e.span_score))
    }

    fn paragraph_degree(&self, pi: usize) -> usize {
        self.g.index.p_adj[pi].iter().filter(|&&qi| self.q_alive[qi]).count()
    }

    /// Live questions that still have a live neighbor, ascending id.
    fn answerable(&self) -> Vec<usize> {
        (0..self.g.questions.len()).filter(|&qi| self.q_alive[qi] && self.degree(qi).0 > 0).collect()
    }

    /// Removes the paragraph and every question it answers.
    fn consume(&mut self, pi: usize) {
        self.p_alive[pi] = false;
        for &qi in &self.g.index.p_adj[pi] {
            self.q_alive[qi] = false;
        }
    }
}

/// Greedy selection: highest-degree question first, answered by its
/// best-scoring paragraph, until `target_words` is reached or no question
/// has an answer left.
///
/// Question ties: larger summed span score, then smaller id. Paragraph ties:
/// more live questions, then smaller id.
pub fn select_session(graph: &QAGraph, target_words: usize) -> QASession {
    let mut w = Working::new(graph);
    let mut session = QASession::default();
    while session.total_words < target_words {
        let best_q = w.answerable().into_iter().max_by(|&a, &b| {
            let (da, sa) = w.degree(a);
            let (db, sb) = w.degree(b);
            da.cmp(&db).then(sa.total_cmp(&sb)).then(b.cmp(&a))
        });
        let Some(qi) = best_q else { break };
        let pi = w
            .live_neighbors(qi)
            .max_by(|(pa, ea), (pb, eb)| {
                ea.span_score
                    .total_cmp(&eb.span_score)
                    .then(w.paragraph_degree(*pa).cmp(&w.paragraph_degree(*pb)))
                    .then(pb.cmp(pa))
            })
            .map(|(pi, _)| pi)
            .expect("answerable question has a live neighbor");
        session.push(graph, qi, pi);
        w.consume(pi);
    }
    session
}

/// Same loop as [`select_session`] with the question and the paragraph drawn
/// uniformly at random from the valid options.
pub fn select_session_random(graph: &QAGraph, target_words: usize, seed: u64) -> QASession {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Working::new(graph);
    let mut session = QASession::default();
    while session.total_words < target_words {
        let options = w.answerable();
        if options.is_empty() {
            break;
        }
        let qi = options[rng.random_range(0..options.len())];
        let neighbors: Vec<usize> = w.live_neighbors(qi).map(|(pi, _)| pi).collect();
        let pi = neighbors[rng.random_range(0..neighbors.len())];
        session.push(graph, qi, pi);
        w.consume(pi);
    }
    session
}

/// Up to `n` questions the session left untouched, ranked like
/// [`select_session`] ranks questions but on full-graph degrees.
pub fn recommend_questions(graph: &QAGraph, session: &QASession, n: usize) -> Vec<QuestionCandidate> {
    let used: HashSet<&str> = session.pairs.iter().map(|p| p.question.question_id.as_str()).collect();
    let session_paragraphs: HashSet<&str> = session.pairs.iter().map(|p| p.paragraph.paragraph_id.as_str()).collect();
    let mut ranked: Vec<(usize, f64, usize)> = (0..graph.questions.len())
        .filter(|&qi| {
            let adj = &graph.index.q_adj[qi];
            !adj.is_empty()
                && !used.contains(graph.questions[qi].question_id.as_str())
                && adj.iter().all(|&(pi, _)| !session_paragraphs.contains(graph.paragraphs[pi].paragraph_id.as_str()))
        })
        .map(|qi| {
            let adj = &graph.index.q_adj[qi];
            (adj.len(), adj.iter().map(|&(_, ei)| graph.edges[ei].span_score).sum(), qi)
        })
        .collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.total_cmp(&a.1)).then(a.2.cmp(&b.2)));
    ranked.into_iter().take(n).map(|(_, _, qi)| graph.questions[qi].clone()).collect()
}

/// Sum of full-graph degrees of the session's questions.
pub fn session_question_degree(graph: &QAGraph, session: &QASession) -> usize {
    session.pairs.iter().map(|p| graph.question_degree(&p.question.question_id)).sum()
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((&self.question_id, &self.paragraph_id).cmp(&(&other.question_id, &other.paragraph_id)))
    }
}
