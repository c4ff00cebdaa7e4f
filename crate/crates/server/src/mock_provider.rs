//! The built-in mock providers served over the provider HTTP contract, for
//! exercising the HTTP client without real models.

use std::sync::Arc;

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use podgen::providers::http::{
    AnswerRequest, AnswerResponse, ErrorBody, QuestionRequest, QuestionResponse, SpeechRequest, SpeechResponse,
    SummarizeRequest, SummarizeResponse, VOICE_UNKNOWN,
};
use podgen::providers::mock::{MockQuestionAnswerer, MockQuestionGenerator, MockSpeechSynthesizer, MockSummarizer};
use podgen::providers::{Interrogative, ProviderError, QuestionAnswerer, QuestionGenerator, SpeechSynthesizer, Summarizer};

struct Failure(ProviderError);

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        let (status, error) = match &self.0 {
            ProviderError::VoiceUnknown(_) => (StatusCode::BAD_REQUEST, VOICE_UNKNOWN),
            ProviderError::Precondition(_) => (StatusCode::BAD_REQUEST, "precondition"),
            ProviderError::Protocol(_) => (StatusCode::BAD_REQUEST, "protocol"),
            ProviderError::Unavailable(_) => (StatusCode::SERVICE_UNAVAILABLE, "unavailable"),
        };
        let message = match self.0 {
            ProviderError::VoiceUnknown(v) => v,
            e => e.to_string(),
        };
        (status, Json(ErrorBody { error: error.into(), message })).into_response()
    }
}

type Reply<T> = Result<Json<T>, Failure>;

pub fn router() -> Router {
    let tts = Arc::new(MockSpeechSynthesizer::default());
    Router::new()
        .route("/v1/summarize", post(summarize))
        .route("/v1/question", post(question))
        .route("/v1/answer", post(answer))
        .route("/v1/speech", post(move |body| speech(tts.clone(), body)))
}

async fn summarize(Json(r): Json<SummarizeRequest>) -> Reply<SummarizeResponse> {
    let s = MockSummarizer.summarize(&r.body).map_err(Failure)?;
    Ok(Json(SummarizeResponse { summary: s.summary, likelihood: s.likelihood }))
}

async fn question(Json(r): Json<QuestionRequest>) -> Reply<QuestionResponse> {
    let w: Interrogative = r.interrogative.parse().map_err(Failure)?;
    let question = MockQuestionGenerator::default().generate_question(&r.paragraph, w).map_err(Failure)?;
    Ok(Json(QuestionResponse { question }))
}

async fn answer(Json(r): Json<AnswerRequest>) -> Reply<AnswerResponse> {
    let v = MockQuestionAnswerer.answer_question(&r.paragraph, &r.question).map_err(Failure)?;
    Ok(Json(AnswerResponse::from_verdict(&v)))
}

async fn speech(tts: Arc<MockSpeechSynthesizer>, Json(r): Json<SpeechRequest>) -> Reply<SpeechResponse> {
    let s = tts.synthesize(&r.ssml, &r.voice).map_err(Failure)?;
    Ok(Json(SpeechResponse::from_result(&s)))
}

/// Binds `addr` and serves the mock providers until ctrl-c.
pub async fn serve(addr: std::net::SocketAddr) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("mock providers on http://{}", listener.local_addr()?);
    axum::serve(listener, router())
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
