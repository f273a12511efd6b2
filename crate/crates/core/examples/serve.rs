//! Serves the HTTP API over a one-day synthetic replay at 60x speed. Nothing
//! is dispatched automatically: post commands to move batches.
//!
//! cargo run --example serve -- [port]
//! curl localhost:8080/api/v1/plan
//! curl -XPOST localhost:8080/api/v1/dispatch -d '{"vehicle_id":"v1","delivery_id":"d1"}' -H 'content-type: application/json'

use std::sync::Arc;

use delivery_dispatch::data::{generate_dataset, GeneratorSpec};
use delivery_dispatch::sim::{Mode, RunConfig};
use delivery_dispatch::tsb::{router, spawn_replay, App, Session, SessionHandle};

#[tokio::main]
async fn main() {
    let port: u16 = std::env::args().nth(1).map_or(8080, |s| s.parse().expect("port"));
    let ds = generate_dataset(&GeneratorSpec { days: 1, ..Default::default() });
    let session = Session::new("r1", Arc::new(ds), RunConfig::realtime(Mode::Optimized, 1.6666, 0)).unwrap();
    let handle = SessionHandle::new(session);
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await.unwrap();
    println!("listening on {}", listener.local_addr().unwrap());
    spawn_replay(Arc::clone(&handle), 60.0);
    axum::serve(listener, router(App::new(vec![handle]))).await.unwrap();
}
