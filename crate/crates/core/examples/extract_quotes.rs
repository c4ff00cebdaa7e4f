//! Finds attributed quotations in every shipped story and shows the one a
//! segment would end on.
//!
//! cargo run -p podgen --example extract_quotes

use podgen::assembler::quote_texts;
use podgen::fixtures;
use podgen::quotes::{cluster_quotes, mention_count, pick_segment_quote};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for cluster in fixtures::load_fixture_stories()? {
        let quotes = cluster_quotes(&cluster);
        println!("{} ({} quotes)", cluster.story_id, quotes.len());
        for q in &quotes {
            println!("  {} [{} mentions]: \"{}\"", q.author, mention_count(&cluster, q.surname()), q.quote_text);
        }
        if let Some(q) = pick_segment_quote(&quotes, &cluster) {
            let (intro, body) = quote_texts(&q);
            println!("  -> {intro} {body}");
        }
    }
    Ok(())
}
