//! Builds the question/paragraph answer graph for one story and prints it as
//! JSON or Graphviz DOT.
//!
//! cargo run -p podgen --example qa_graph -- [story_id] [json|dot]

use podgen::providers::mock::{MockQuestionAnswerer, MockQuestionGenerator};
use podgen::{fixtures, qagraph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let story = args.next().unwrap_or_else(|| "iceberg".into());
    let format = args.next().unwrap_or_else(|| "json".into());

    let cluster = fixtures::fixture_story(&story)?;
    let gen = qagraph::generate_candidates(&cluster, &MockQuestionGenerator::default(), 8)?;
    let paragraphs: Vec<_> = cluster.filtered_paragraphs().cloned().collect();
    let graph = qagraph::build_graph(&gen.candidates, &paragraphs, &MockQuestionAnswerer, 8)?;
    eprintln!(
        "{} questions ({} generated), {} paragraphs, {} edges",
        graph.questions().len(),
        gen.generated,
        graph.paragraphs().len(),
        graph.edges().len()
    );
    match format.as_str() {
        "dot" => println!("{}", graph.to_dot()),
        _ => println!("{}", serde_json::to_string_pretty(&graph)?),
    }
    Ok(())
}
