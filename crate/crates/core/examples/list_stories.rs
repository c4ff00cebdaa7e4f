//! Ingests the shipped stories into a fresh store and lists them with their
//! selected headline and paragraph filter counts.
//!
//! cargo run -p podgen --example list_stories

use podgen::corpus::{select_headline, StoryStore};
use podgen::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("podgen-example-store");
    let store = StoryStore::open(&dir)?;
    for entry in std::fs::read_dir(fixtures::stories_dir())? {
        store.ingest(&std::fs::read_to_string(entry?.path())?)?;
    }
    for s in store.list()? {
        let cluster = store.load(&s.story_id)?;
        let kept = cluster.filtered_paragraphs().count();
        println!("{:<14} {} articles, {kept}/{} paragraphs usable", s.story_id, s.n_articles, cluster.paragraphs.len());
        println!("{:14} headline: {}", "", select_headline(&cluster));
    }
    println!("store at {}", dir.display());
    Ok(())
}
