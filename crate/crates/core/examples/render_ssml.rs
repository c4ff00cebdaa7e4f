//! Shows the SSML each sentence of a segment is synthesized from.
//!
//! cargo run -p podgen --example render_ssml -- [story_id]

use podgen::speech::render_ssml;
use podgen::{fixtures, Condition, Engine, PodcastRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let story = std::env::args().nth(1).unwrap_or_else(|| "swiss-burqa".into());
    let stories = fixtures::load_fixture_stories()?;
    let request = PodcastRequest {
        story_ids: vec![story],
        duration_s: 60,
        condition: Condition::QaBest,
        with_breaks: true,
        seed: 0,
    };
    let script = Engine::mock().build_script("ssml", &stories, &request)?;
    let seg = &script.segments[0];
    for unit in &seg.units {
        for s in render_ssml(unit, seg.quote.as_ref()) {
            println!("{:<12} {:?}  {}", format!("{:?}", unit.kind), unit.voice_role, s.ssml.to_xml());
        }
    }
    Ok(())
}
