//! Runs the podcast API on a scratch data directory and walks through a
//! listening session: create a podcast, fetch its manifest, ask a question,
//! log a few events and read them back.
//!
//! cargo run -p podgen-server --example api_walkthrough

use std::sync::Arc;

use podgen::{fixtures, PodcastManifest};
use podgen_server::api::AnswerReply;
use podgen_server::{router, AppState, Settings};
use serde_json::{json, Value};

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let data = std::env::temp_dir().join(format!("podgen-example-api-{}", std::process::id()));
    let settings = Settings { data_dir: data.clone(), ..Settings::default() };
    let store = settings.data().stories()?;
    for e in std::fs::read_dir(fixtures::stories_dir())? {
        store.ingest(&std::fs::read_to_string(e?.path())?)?;
    }

    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let base = format!("http://{}", listener.local_addr()?);
    let app = router(Arc::new(AppState::new(&settings)?));
    tokio::spawn(async move { axum::serve(listener, app).await });

    let http = reqwest::Client::new();
    let stories: Vec<Value> = http.get(format!("{base}/v1/stories")).send().await?.json().await?;
    println!("{} stories available", stories.len());

    let created: Value = http
        .post(format!("{base}/v1/podcasts"))
        .json(&json!({"story_ids": ["rohingya", "iceberg"], "duration_s": 120, "condition": "qa_best", "with_breaks": true, "seed": 1}))
        .send()
        .await?
        .json()
        .await?;
    let id = created["podcast_id"].as_str().unwrap_or_default().to_string();
    let manifest: PodcastManifest = http.get(format!("{base}/v1/podcasts/{id}/manifest")).send().await?.json().await?;
    println!("podcast {id}: {} lines, {} ms", manifest.lines.len(), manifest.total_duration_ms);

    let at = &manifest.lines[3];
    let reply: AnswerReply = http
        .post(format!("{base}/v1/podcasts/{id}/questions"))
        .json(&json!({"segment_id": "rohingya", "text": "Where will Rohingya refugees be deported?", "at_line": at.line_id, "origin": "typed"}))
        .send()
        .await?
        .json()
        .await?;
    for l in &reply.reply_lines {
        println!("  [{}] {}", l.line_id, l.text);
    }
    println!("  resume at {:?}", reply.resume_at_line);

    for kind in ["pause", "play", "transcript_open", "skip"] {
        http.post(format!("{base}/v1/podcasts/{id}/events")).json(&json!({"kind": kind, "at_line": at.line_id})).send().await?;
    }
    let events: Vec<Value> = http.get(format!("{base}/v1/podcasts/{id}/events")).send().await?.json().await?;
    for e in &events {
        println!("  event {} at {}", e["kind"], e["at_line"]);
    }
    println!("data kept in {}", data.display());
    Ok(())
}
