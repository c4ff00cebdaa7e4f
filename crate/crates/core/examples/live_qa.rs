//! Asks listener questions against a story and prints the spoken reply and
//! where playback would resume.
//!
//! cargo run -p podgen --example live_qa -- "Where will Rohingya refugees be deported?"

use podgen::liveqa::resume_point;
use podgen::{fixtures, Condition, Engine, PodcastRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let questions: Vec<String> = std::env::args().skip(1).collect();
    let questions = if questions.is_empty() {
        vec!["Where will Rohingya refugees be deported?".to_string(), "Who won the cup final?".to_string()]
    } else {
        questions
    };
    let stories = fixtures::load_fixture_stories()?;
    let engine = Engine::mock();
    let request = PodcastRequest {
        story_ids: vec!["rohingya".into()],
        duration_s: 60,
        condition: Condition::QaBest,
        with_breaks: false,
        seed: 0,
    };
    let out = std::env::temp_dir().join("podgen-example-live");
    let (_, manifest) = engine.generate("live", &stories, &request, &out)?;
    let cluster = fixtures::fixture_story("rohingya")?;
    let interrupted = &manifest.lines[3];

    for q in &questions {
        let a = engine.answer(q, &cluster)?;
        println!("Q: {q}");
        println!("   {:?}, margin {:?}", a.status, a.margin);
        println!("   {}", a.holding_text);
        println!("   {}", a.reply_text);
    }
    println!("interrupted at {}, resuming at {:?}", interrupted.line_id, resume_point(&manifest, &interrupted.line_id)?);
    Ok(())
}
