//! Generates a podcast through the HTTP provider client, talking to the
//! built-in mock provider server on a local port.
//!
//! cargo run -p podgen-server --example http_providers

use podgen::providers::http::HttpProvider;
use podgen::{fixtures, Condition, Engine, EngineConfig, PodcastRequest, Providers};
use podgen_server::mock_provider;

fn main() -> anyhow::Result<()> {
    let rt = tokio::runtime::Runtime::new()?;
    let listener = rt.block_on(tokio::net::TcpListener::bind("127.0.0.1:0"))?;
    let base = format!("http://{}", listener.local_addr()?);
    rt.spawn(async move { axum::serve(listener, mock_provider::router()).await });
    println!("mock providers at {base}");

    let engine = Engine::new(Providers::http(HttpProvider::new(&base)?), EngineConfig::default());
    let stories = fixtures::load_fixture_stories()?;
    let request = PodcastRequest {
        story_ids: vec!["suez".into(), "tesla-ntsb".into()],
        duration_s: 120,
        condition: Condition::QaBest,
        with_breaks: false,
        seed: 0,
    };
    let out = std::env::temp_dir().join("podgen-example-http");
    let (script, manifest) = engine.generate("over-http", &stories, &request, &out)?;
    for seg in &script.segments {
        println!("{}: {} units, {} ms", seg.segment_id, seg.units.len(), manifest.segment_duration_ms(&seg.segment_id));
    }
    println!("{} lines, {} ms total, audio in {}", manifest.lines.len(), manifest.total_duration_ms, out.display());
    Ok(())
}
