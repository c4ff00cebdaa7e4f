//! Cuts a generated segment down to smaller word budgets.
//!
//! cargo run -p podgen --example truncate_segment -- [story_id]

use podgen::assembler::truncate_segment;
use podgen::{fixtures, Condition, Engine, PodcastRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let story = std::env::args().nth(1).unwrap_or_else(|| "suez".into());
    let stories = fixtures::load_fixture_stories()?;
    let request = PodcastRequest {
        story_ids: vec![story],
        duration_s: 120,
        condition: Condition::QaBest,
        with_breaks: false,
        seed: 0,
    };
    let seg = Engine::mock().build_script("cut", &stories, &request)?.segments.remove(0);
    for budget in [seg.word_count(), 200, 135, 90, 45] {
        let cut = truncate_segment(&seg, budget);
        let kinds: Vec<String> = cut.units.iter().map(|u| format!("{:?}", u.kind)).collect();
        println!("budget {budget:>3}: {:>3} words  {}", cut.word_count(), kinds.join(" "));
    }
    Ok(())
}
