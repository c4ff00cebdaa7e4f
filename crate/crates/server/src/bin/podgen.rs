use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use podgen::providers::{DEFAULT_PARALLELISM, DEFAULT_WORDS_PER_SECOND};
use podgen::liveqa::DEFAULT_TAU;
use podgen::text::fnv1a;
use podgen::{qagraph, Condition, PodcastRequest, StoryStore};
use podgen_server::events::{stats, InteractionEvent, StatsTable};
use podgen_server::store::read_lines;
use podgen_server::{api, mock_provider, AppState, Settings};

#[derive(Parser)]
#[command(name = "podgen", version, about = "Generate and serve interactive news podcasts")]
struct Cli {
    /// Data directory holding stories, generated podcasts and audio.
    #[arg(long, global = true, env = "PODGEN_DATA", default_value = "data")]
    data: PathBuf,
    /// Base URL of an HTTP model provider; built-in mocks when unset.
    #[arg(long, global = true, env = "PODGEN_PROVIDER_URL")]
    provider_url: Option<String>,
    /// Margin a live answer must exceed to be accepted.
    #[arg(long, global = true, env = "PODGEN_TAU", default_value_t = DEFAULT_TAU)]
    tau: f64,
    /// Speech rate used for word budgets and mock audio.
    #[arg(long, global = true, env = "PODGEN_WPS", default_value_t = DEFAULT_WORDS_PER_SECOND)]
    wps: f64,
    /// Maximum provider calls in flight.
    #[arg(long, global = true, env = "PODGEN_PARALLELISM", default_value_t = DEFAULT_PARALLELISM)]
    parallelism: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate story files and copy them into the data directory.
    Ingest {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Generate a podcast: script.json, manifest.json and audio/ under --out.
    Generate {
        /// Comma-separated story ids, in playback order.
        #[arg(long, value_delimiter = ',', required = true)]
        stories: Vec<String>,
        /// Target length in seconds.
        #[arg(long, default_value_t = 300)]
        duration: u32,
        #[arg(long, default_value = "qa_best")]
        condition: Condition,
        /// Add a question break after every segment.
        #[arg(long)]
        breaks: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the podcast API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
        bind: IpAddr,
    },
    /// Count pauses, skips, transcript opens and questions per podcast.
    Stats {
        /// An events.jsonl file.
        #[arg(long)]
        events: PathBuf,
        /// Also count plays, seeks and transcript closes.
        #[arg(long)]
        all: bool,
    },
    /// Print a story's question/paragraph answer graph.
    Graph {
        #[arg(long)]
        story: String,
        #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
        format: GraphFormat,
    },
    /// Serve the built-in mock providers over the provider HTTP contract.
    MockProviders {
        #[arg(long, default_value_t = 8090)]
        port: u16,
        #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
        bind: IpAddr,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Json,
    Dot,
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn runtime() -> anyhow::Result<tokio::runtime::Runtime> {
    Ok(tokio::runtime::Builder::new_multi_thread().enable_all().build()?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let settings = Settings {
        data_dir: cli.data,
        provider_url: cli.provider_url,
        tau: cli.tau,
        words_per_second: cli.wps,
        parallelism: cli.parallelism,
    };
    match cli.command {
        Command::Ingest { files } => {
            let store = settings.data().stories()?;
            for f in files {
                let raw = std::fs::read_to_string(&f).with_context(|| format!("reading {}", f.display()))?;
                let c = store.ingest(&raw).with_context(|| format!("ingesting {}", f.display()))?;
                let usable = c.filtered_paragraphs().count();
                println!("{}: {} articles, {usable}/{} paragraphs usable", c.story_id, c.articles.len(), c.paragraphs.len());
            }
        }
        Command::Generate { stories, duration, condition, breaks, seed, out } => {
            let store = settings.data().stories()?;
            let clusters = stories.iter().map(|id| store.load(id)).collect::<Result<Vec<_>, _>>()?;
            let request = PodcastRequest { story_ids: stories, duration_s: duration, condition, with_breaks: breaks, seed };
            let podcast_id = format!("{condition}-{:016x}", fnv1a(serde_json::to_string(&request)?.as_bytes()));
            let engine = settings.engine()?;
            let (script, manifest) = engine.generate(&podcast_id, &clusters, &request, &out.join("audio"))?;
            std::fs::write(out.join("script.json"), script.to_json())?;
            std::fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
            println!(
                "{podcast_id}: {} segments, {} lines, {:.1} s -> {}",
                script.segments.len(),
                manifest.lines.len(),
                manifest.total_duration_ms as f64 / 1000.0,
                out.display()
            );
        }
        Command::Serve { port, bind } => {
            let state = Arc::new(AppState::new(&settings)?);
            runtime()?.block_on(api::serve(state, SocketAddr::new(bind, port)))?;
        }
        Command::Stats { events, all } => {
            anyhow::ensure!(events.is_file(), "{} does not exist", events.display());
            let log: Vec<InteractionEvent> = read_lines(&events)?;
            print!("{}", StatsTable { stats: &stats(&log), all });
        }
        Command::Graph { story, format } => {
            let cluster = StoryStore::open(settings.data().root().join("stories"))?.load(&story)?;
            let providers = settings.providers()?;
            let gen = qagraph::generate_candidates(&cluster, providers.question_generator.as_ref(), settings.parallelism)?;
            let paragraphs: Vec<_> = cluster.filtered_paragraphs().cloned().collect();
            let graph = qagraph::build_graph(
                &gen.candidates,
                &paragraphs,
                providers.question_answerer.as_ref(),
                settings.parallelism,
            )?;
            match format {
                GraphFormat::Json => println!("{}", serde_json::to_string_pretty(&graph)?),
                GraphFormat::Dot => print!("{}", graph.to_dot()),
            }
        }
        Command::MockProviders { port, bind } => {
            runtime()?.block_on(mock_provider::serve(SocketAddr::new(bind, port)))?;
        }
    }
    Ok(())
}
