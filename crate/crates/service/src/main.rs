use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::Parser;
use fdakit_service::{router, AppState, Store};

#[derive(Debug, Parser)]
#[command(name = "fdakit-service", version, about = "HTTP analysis service for functional data")]
struct Args {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    /// Persist uploaded and derived datasets as JSON files here
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

#[tokio::main]
async fn main() {
    let args = Args::parse();
    let store = match &args.data_dir {
        Some(dir) => match Store::persistent(dir) {
            Ok(store) => store,
            Err(e) => {
                eprintln!("{}", serde_json::json!({ "error": e.name(), "message": e.to_string() }));
                std::process::exit(2);
            }
        },
        None => Store::in_memory(),
    };
    let app = router(Arc::new(AppState::new(store)));
    let addr = SocketAddr::new(args.host, args.port);
    let listener = match tokio::net::TcpListener::bind(addr).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": "IoError", "message": e.to_string() }));
            std::process::exit(2);
        }
    };
    eprintln!("listening on http://{addr}");
    if let Err(e) = axum::serve(listener, app).await {
        eprintln!("{}", serde_json::json!({ "error": "IoError", "message": e.to_string() }));
        std::process::exit(2);
    }
}
