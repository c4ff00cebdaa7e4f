//! Interactive news podcasts from clusters of news articles.
//!
//! A podcast is a greeting, one segment per story and a closing. Each
//! segment opens with a headline and a summary, continues with a Q&A session
//! chosen from a question–paragraph answer graph, and ends on a quotation.
//! Every sentence is synthesized separately so a player can show a live
//! transcript and stop for listener questions.
//!
//! ```no_run
//! use podgen::{fixtures, Condition, Engine, PodcastRequest};
//!
//! let stories = fixtures::load_fixture_stories().unwrap();
//! let request = PodcastRequest {
//!     story_ids: stories.iter().take(3).map(|s| s.story_id.clone()).collect(),
//!     duration_s: 180,
//!     condition: Condition::QaBest,
//!     with_breaks: false,
//!     seed: 7,
//! };
//! let engine = Engine::mock();
//! let (script, manifest) = engine.generate("demo", &stories, &request, "out/audio".as_ref()).unwrap();
//! println!("{} lines, {} ms", manifest.lines.len(), manifest.total_duration_ms);
//! # let _ = script;
//! ```

pub mod assembler;
pub mod corpus;
pub mod engine;
pub mod fixtures;
pub mod liveqa;
pub mod providers;
pub mod qagraph;
pub mod quotes;
pub mod speech;
pub mod text;

pub use assembler::{Condition, PodcastScript, ScriptUnit, SegmentScript, UnitKind, VoiceRole};
pub use corpus::{StoryCluster, StoryStore};
pub use engine::{Engine, EngineConfig, EngineError, PodcastRequest};
pub use providers::Providers;
pub use speech::{PodcastManifest, ScriptLine};
