//! Generates a five-minute podcast from the shipped stories with mock
//! providers and prints each segment's words and rendered duration.
//!
//! cargo run -p podgen --example generate_podcast -- [condition] [seed]

use podgen::{fixtures, Condition, Engine, PodcastRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let condition: Condition = args.next().as_deref().unwrap_or("qa_best").parse()?;
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);

    let stories = fixtures::load_fixture_stories()?;
    let request = PodcastRequest {
        story_ids: stories.iter().take(5).map(|s| s.story_id.clone()).collect(),
        duration_s: 300,
        condition,
        with_breaks: false,
        seed,
    };
    let out = std::env::temp_dir().join("podgen-example");
    let engine = Engine::mock();
    let (script, manifest) = engine.generate("example", &stories, &request, &out)?;

    for seg in &script.segments {
        println!(
            "{:<14} {:>3} words {:>6} ms  units: {}",
            seg.segment_id,
            seg.word_count(),
            manifest.segment_duration_ms(&seg.segment_id),
            seg.units.iter().map(|u| format!("{:?}", u.kind)).collect::<Vec<_>>().join(" ")
        );
        for q in &seg.recommended_questions {
            println!("{:>16} {q}", "recommended:");
        }
    }
    println!("total {} ms over {} lines, audio in {}", manifest.total_duration_ms, manifest.lines.len(), out.display());
    Ok(())
}
