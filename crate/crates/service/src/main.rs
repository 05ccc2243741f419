use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use econreason::corpus::Corpus;
use econreason_service::{router, AppState};

#[derive(Parser, Debug)]
#[command(name = "econreason-service", version, about = "HTTP API for the econreason classifier")]
struct Args {
    /// Address to listen on.
    #[arg(long, env = "ECONREASON_LISTEN", default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Largest per-request timeout in seconds; also the default.
    #[arg(long, env = "ECONREASON_MAX_TIMEOUT", default_value_t = 60.0)]
    max_timeout: f64,
    /// Serve examples from this directory instead of the bundled corpus.
    #[arg(long, env = "ECONREASON_CORPUS_DIR")]
    corpus_dir: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    if !(args.max_timeout.is_finite() && args.max_timeout > 0.0) {
        eprintln!("error: --max-timeout must be a positive number of seconds");
        return ExitCode::from(1);
    }
    let corpus = match &args.corpus_dir {
        None => Corpus::bundled(),
        Some(d) => match Corpus::from_dir(d) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: cannot read corpus {}: {e}", d.display());
                return ExitCode::from(1);
            }
        },
    };
    let state = AppState::new(corpus, Duration::from_secs_f64(args.max_timeout));
    let listener = match tokio::net::TcpListener::bind(args.listen).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: cannot bind {}: {e}", args.listen);
            return ExitCode::from(1);
        }
    };
    eprintln!("listening on {}", args.listen);
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    if let Err(e) = axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
