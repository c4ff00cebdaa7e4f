//! The podcast HTTP API.
//!
//! ```text
//! GET  /v1/stories
//! POST /v1/podcasts                         {story_ids, duration_s, condition, with_breaks?, seed?} -> 201 {podcast_id}
//! GET  /v1/podcasts/{id}/manifest
//! GET  /v1/podcasts/{id}/script
//! GET  /v1/podcasts/{id}/audio/{line_id}
//! POST /v1/podcasts/{id}/questions          {segment_id, text, at_line, origin?}
//! POST /v1/podcasts/{id}/events             {kind, at_line} -> 204
//! GET  /v1/podcasts/{id}/events
//! ```

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use podgen::assembler::AssemblyError;
use podgen::corpus::{CorpusError, StorySummary};
use podgen::liveqa::{resume_point, LiveAnswer, LiveQaError, ListenerQuestion, QuestionGate, QuestionOrigin, ResumePoint};
use podgen::providers::Codec;
use podgen::{Condition, Engine, EngineError, PodcastManifest, PodcastRequest, ScriptLine};
use serde::{Deserialize, Serialize};

use crate::events::{EventKind, InteractionEvent};
use crate::settings::Settings;
use crate::store::{DataDir, PodcastConfig, QuestionRecord};

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into() }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_request", message)
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", message)
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(status = %self.status, "{}", self.message);
        }
        let body = serde_json::json!({ "error": self.code, "message": self.message });
        (self.status, Json(body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        match &e {
            EngineError::InvalidRequest(_)
            | EngineError::Assembly(
                AssemblyError::BudgetTooSmall { .. }
                | AssemblyError::ReferenceUnavailable(_)
                | AssemblyError::InvalidReference { .. }
                | AssemblyError::NoSegments,
            ) => ApiError::bad_request(e.to_string()),
            _ => ApiError::new(StatusCode::BAD_GATEWAY, "generation_failed", e.to_string()),
        }
    }
}

impl From<LiveQaError> for ApiError {
    fn from(e: LiveQaError) -> Self {
        match e {
            LiveQaError::EmptyQuestion => ApiError::bad_request(e.to_string()),
            LiveQaError::LineUnknown(_) => ApiError::not_found(e.to_string()),
            LiveQaError::Busy => ApiError::new(StatusCode::CONFLICT, "busy", e.to_string()),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Live state of one generated podcast.
struct Session {
    manifest: PodcastManifest,
    segments: HashSet<String>,
    gate: QuestionGate,
    /// Serializes event and question log appends.
    log: tokio::sync::Mutex<()>,
    questions_asked: AtomicUsize,
    replies: RwLock<HashMap<String, ScriptLine>>,
}

impl Session {
    fn new(manifest: PodcastManifest, asked: Vec<QuestionRecord>) -> Self {
        let segments = manifest.segment_offsets.iter().map(|o| o.segment_id.clone()).collect();
        let replies = asked.iter().flat_map(|r| r.reply_lines.iter().map(|l| (l.line_id.clone(), l.clone()))).collect();
        Session {
            manifest,
            segments,
            gate: QuestionGate::default(),
            log: tokio::sync::Mutex::new(()),
            questions_asked: AtomicUsize::new(asked.len()),
            replies: RwLock::new(replies),
        }
    }

    fn line(&self, line_id: &str) -> Option<ScriptLine> {
        self.manifest
            .line(line_id)
            .cloned()
            .or_else(|| self.replies.read().expect("replies lock").get(line_id).cloned())
    }
}

pub struct AppState {
    data: DataDir,
    engine: Arc<Engine>,
    sessions: Mutex<HashMap<String, Arc<Session>>>,
}

impl AppState {
    pub fn new(settings: &Settings) -> anyhow::Result<Self> {
        Ok(AppState { data: settings.data(), engine: Arc::new(settings.engine()?), sessions: Mutex::new(HashMap::new()) })
    }

    /// The session for `podcast_id`, loading it from disk after a restart.
    fn session(&self, podcast_id: &str) -> ApiResult<Arc<Session>> {
        if let Some(s) = self.sessions.lock().expect("sessions lock").get(podcast_id) {
            return Ok(s.clone());
        }
        if !self.data.exists(podcast_id) {
            return Err(ApiError::not_found(format!("unknown podcast `{podcast_id}`")));
        }
        let manifest = self.data.manifest(podcast_id).map_err(ApiError::internal)?;
        let asked = self.data.questions(podcast_id).map_err(ApiError::internal)?;
        let mut sessions = self.sessions.lock().expect("sessions lock");
        let s = sessions.entry(podcast_id.to_string()).or_insert_with(|| Arc::new(Session::new(manifest, asked)));
        Ok(s.clone())
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/stories", get(list_stories))
        .route("/v1/podcasts", post(create_podcast))
        .route("/v1/podcasts/{id}/manifest", get(get_manifest))
        .route("/v1/podcasts/{id}/script", get(get_script))
        .route("/v1/podcasts/{id}/audio/{line_id}", get(get_audio))
        .route("/v1/podcasts/{id}/questions", post(ask_question))
        .route("/v1/podcasts/{id}/events", post(post_event).get(get_events))
        .with_state(state)
}

async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> ApiResult<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f).await.map_err(ApiError::internal)?
}

async fn list_stories(State(state): State<Arc<AppState>>) -> ApiResult<Json<Vec<StorySummary>>> {
    let data = state.data.clone();
    let list = blocking(move || data.stories().and_then(|s| Ok(s.list()?)).map_err(ApiError::internal)).await?;
    Ok(Json(list))
}

#[derive(Debug, Deserialize)]
pub struct CreatePodcast {
    pub story_ids: Vec<String>,
    pub duration_s: u32,
    pub condition: Condition,
    #[serde(default)]
    pub with_breaks: bool,
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub podcast_id: String,
}

async fn create_podcast(
    State(state): State<Arc<AppState>>,
    body: Result<Json<CreatePodcast>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<Created>)> {
    let Json(body) = body?;
    let podcast_id = uuid::Uuid::new_v4().simple().to_string();
    let request = PodcastRequest {
        story_ids: body.story_ids,
        duration_s: body.duration_s,
        condition: body.condition,
        with_breaks: body.with_breaks,
        seed: body.seed.unwrap_or_else(rand_seed),
    };
    let (data, engine, id) = (state.data.clone(), state.engine.clone(), podcast_id.clone());
    let manifest = blocking(move || {
        let store = data.stories().map_err(ApiError::internal)?;
        let clusters = request
            .story_ids
            .iter()
            .map(|sid| match store.load(sid) {
                Ok(c) => Ok(c),
                Err(CorpusError::NotFound(_)) => Err(ApiError::bad_request(format!("unknown story `{sid}`"))),
                Err(e) => Err(ApiError::internal(e)),
            })
            .collect::<ApiResult<Vec<_>>>()?;
        let (script, manifest) = engine.generate(&id, &clusters, &request, &data.audio_root())?;
        data.save(&PodcastConfig { podcast_id: id, request }, &script, &manifest).map_err(ApiError::internal)?;
        Ok(manifest)
    })
    .await?;
    state.sessions.lock().expect("sessions lock").insert(podcast_id.clone(), Arc::new(Session::new(manifest, Vec::new())));
    tracing::info!(%podcast_id, "podcast generated");
    Ok((StatusCode::CREATED, Json(Created { podcast_id })))
}

fn rand_seed() -> u64 {
    let (hi, _) = uuid::Uuid::new_v4().as_u64_pair();
    hi
}

async fn get_manifest(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<PodcastManifest>> {
    let session = state.session(&id)?;
    if cfg!(debug_assertions) {
        session.manifest.validate().map_err(ApiError::internal)?;
    }
    Ok(Json(session.manifest.clone()))
}

async fn get_script(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    state.session(&id)?;
    let script = state.data.script(&id).map_err(ApiError::internal)?;
    Ok(([(header::CONTENT_TYPE, "application/json")], script.to_json()).into_response())
}

async fn get_audio(
    State(state): State<Arc<AppState>>,
    UrlPath((id, line_id)): UrlPath<(String, String)>,
) -> ApiResult<Response> {
    let session = state.session(&id)?;
    let line = session.line(&line_id).ok_or_else(|| ApiError::not_found(format!("unknown line `{line_id}`")))?;
    let path = state.data.audio_root().join(&line.audio_ref);
    let codec = Path::new(&line.audio_ref)
        .extension()
        .and_then(|e| e.to_str())
        .and_then(Codec::from_extension)
        .ok_or_else(|| ApiError::internal(format!("unknown audio type for {}", line.audio_ref)))?;
    let bytes = tokio::fs::read(&path).await.map_err(ApiError::internal)?;
    Ok(([(header::CONTENT_TYPE, codec.content_type())], bytes).into_response())
}

#[derive(Debug, Deserialize)]
pub struct AskQuestion {
    pub segment_id: String,
    pub text: String,
    pub at_line: String,
    #[serde(default = "typed")]
    pub origin: QuestionOrigin,
}

fn typed() -> QuestionOrigin {
    QuestionOrigin::Typed
}

/// Reply to a listener question.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnswerReply {
    pub question_id: String,
    #[serde(flatten)]
    pub answer: LiveAnswer,
    /// Holding line then reply, ready to play.
    pub reply_lines: Vec<ScriptLine>,
    /// `None` when the question came after the last line.
    pub resume_at_line: Option<String>,
}

async fn ask_question(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<AskQuestion>, JsonRejection>,
) -> ApiResult<Json<AnswerReply>> {
    let session = state.session(&id)?;
    let Json(body) = body?;
    if body.text.trim().is_empty() {
        return Err(LiveQaError::EmptyQuestion.into());
    }
    if !session.segments.contains(&body.segment_id) {
        return Err(ApiError::bad_request(format!("segment `{}` is not part of podcast `{id}`", body.segment_id)));
    }
    let resume = resume_point(&session.manifest, &body.at_line)?;
    let _guard = session.gate.try_begin()?;

    let n = session.questions_asked.fetch_add(1, Ordering::SeqCst);
    let question = ListenerQuestion {
        question_id: format!("reply{n}"),
        podcast_id: id.clone(),
        segment_id: body.segment_id,
        text: body.text,
        asked_at_line: body.at_line,
        origin: body.origin,
    };
    let (data, engine, q) = (state.data.clone(), state.engine.clone(), question.clone());
    let (answer, lines) = blocking(move || {
        let cluster = data.stories().and_then(|s| Ok(s.load(&q.segment_id)?)).map_err(ApiError::internal)?;
        let answer = engine.answer(&q.text, &cluster)?;
        let lines = engine.render_reply(&q.podcast_id, &q.question_id, &q.segment_id, &answer, &data.audio_root())?;
        Ok((answer, lines))
    })
    .await?;

    {
        let _log = session.log.lock().await;
        let mut replies = session.replies.write().expect("replies lock");
        replies.extend(lines.iter().map(|l| (l.line_id.clone(), l.clone())));
        drop(replies);
        let record = QuestionRecord { question: question.clone(), reply_lines: lines.clone() };
        state.data.append_question(&id, &record).map_err(ApiError::internal)?;
        let event = InteractionEvent {
            podcast_id: id.clone(),
            kind: EventKind::QuestionAsked,
            at_line: question.asked_at_line.clone(),
            timestamp: Utc::now(),
        };
        state.data.append_event(&event).map_err(ApiError::internal)?;
    }
    Ok(Json(AnswerReply {
        question_id: question.question_id,
        answer,
        reply_lines: lines,
        resume_at_line: match resume {
            ResumePoint::Line(l) => Some(l),
            ResumePoint::EndOfPodcast => None,
        },
    }))
}

#[derive(Debug, Deserialize)]
pub struct PostEvent {
    pub kind: EventKind,
    pub at_line: String,
}

async fn post_event(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<PostEvent>, JsonRejection>,
) -> ApiResult<StatusCode> {
    let session = state.session(&id)?;
    let Json(body) = body?;
    if session.line(&body.at_line).is_none() {
        return Err(ApiError::not_found(format!("unknown line `{}`", body.at_line)));
    }
    let event = InteractionEvent { podcast_id: id, kind: body.kind, at_line: body.at_line, timestamp: Utc::now() };
    let _log = session.log.lock().await;
    state.data.append_event(&event).map_err(ApiError::internal)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn get_events(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<Json<Vec<InteractionEvent>>> {
    let session = state.session(&id)?;
    let _log = session.log.lock().await;
    Ok(Json(state.data.events(&id).map_err(ApiError::internal)?))
}

/// Binds `addr` and serves until ctrl-c. Build `state` outside the runtime:
/// the blocking HTTP provider client must not be created or dropped on it.
pub async fn serve(state: Arc<AppState>, addr: std::net::SocketAddr) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
