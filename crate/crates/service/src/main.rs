use std::net::SocketAddr;
use std::num::NonZeroUsize;
use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;
use votesearch_service::{router, AppState, ServiceConfig, DEFAULT_MEMO_CAPACITY, DEFAULT_NODE_CAP};

#[derive(Parser, Debug)]
#[command(name = "votesearch-service", version, about = "HTTP search service over a global election cache")]
struct Args {
    /// Cache written by `votesearch ingest`
    #[arg(long, default_value = "votesearch.cache")]
    cache: PathBuf,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Largest extension /embedding will lay out
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    node_cap: usize,
    /// Rank tables kept by the /embedding memo
    #[arg(long, default_value_t = NonZeroUsize::new(DEFAULT_MEMO_CAPACITY).unwrap())]
    memo_capacity: NonZeroUsize,
    /// Worker threads for request handling and solvers [default: all cores]
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let mut runtime = tokio::runtime::Builder::new_multi_thread();
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
        runtime.worker_threads(n.max(1));
    }
    let global = votesearch_core::cache::load(&args.cache)
        .with_context(|| format!("cannot load cache {}", args.cache.display()))?;
    log::info!(
        "loaded {} agents and {} movies from {}",
        global.election.n_agents(),
        global.election.n_resources(),
        args.cache.display()
    );
    let state = AppState::new(
        global,
        ServiceConfig {
            node_cap: args.node_cap,
            memo_capacity: args.memo_capacity,
        },
    );
    runtime.enable_all().build()?.block_on(async move {
        let addr: SocketAddr = format!("{}:{}", args.host, args.port)
            .parse()
            .with_context(|| format!("invalid address {}:{}", args.host, args.port))?;
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("cannot bind {addr}"))?;
        log::info!("listening on http://{addr}");
        axum::serve(listener, router(state))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}
