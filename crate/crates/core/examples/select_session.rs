//! Greedy against random Q&A session selection on seeded random graphs.
//!
//! cargo run -p podgen --example select_session -- [runs] [target_words]

use podgen::{fixtures, qagraph};

fn main() {
    let mut args = std::env::args().skip(1);
    let runs: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let target: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);

    let g = fixtures::random_graph(0, 20, 10, 0.2);
    let greedy = qagraph::select_session(&g, target);
    println!("seed 0 greedy session ({} words):", greedy.total_words);
    for p in &greedy.pairs {
        println!("  {} (degree {}) -> {}", p.question.question_id, g.question_degree(&p.question.question_id), p.paragraph.paragraph_id);
    }

    let (mut wins, mut sum_g, mut sum_r) = (0, 0, 0);
    for seed in 0..runs {
        let g = fixtures::random_graph(seed, 20, 10, 0.2);
        let a = qagraph::session_question_degree(&g, &qagraph::select_session(&g, target));
        let b = qagraph::session_question_degree(&g, &qagraph::select_session_random(&g, target, seed));
        sum_g += a;
        sum_r += b;
        wins += usize::from(a > b);
    }
    println!(
        "over {runs} graphs greedy wins {wins}, mean question degree {:.2} vs {:.2}",
        sum_g as f64 / runs as f64,
        sum_r as f64 / runs as f64
    );
}
