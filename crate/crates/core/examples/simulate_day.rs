//! Replays one synthetic day in optimized mode, audits the run log and
//! prints the KPIs and episode timings. With a path argument the log is
//! written there as JSON lines.
//!
//! cargo run --release --example simulate_day -- [log.jsonl]

use delivery_dispatch::data::{compute_kpis, generate_dataset, GeneratorSpec};
use delivery_dispatch::sim::{audit_log, run, to_jsonl, Mode, RunConfig};

fn main() {
    let ds = generate_dataset(&GeneratorSpec { days: 1, rng_seed: 3, ..Default::default() });
    let factor = 1.6666;
    let out = run(&ds, RunConfig::deterministic(Mode::Optimized, factor, 3)).unwrap();

    let violations = audit_log(&out.log, &ds, factor);
    println!("{} orders, {} log events, {} audit findings", ds.orders.len(), out.log.len(), violations.len());
    for v in violations.iter().take(5) {
        println!("  {v:?}");
    }
    let k = compute_kpis(&out.log, &ds).totals;
    println!(
        "delivered {}, late {} (over 10 min {}), total delay {} min, driven {} km",
        k.delivered,
        k.pd,
        k.p10d,
        k.td / 60,
        k.dd / 1000
    );
    let eps = &out.stats.episodes;
    let failed = eps.iter().filter(|e| e.failed).count();
    let relaxed = eps.iter().filter(|e| e.applied_delay.is_some_and(|d| d > 0)).count();
    println!(
        "{} episodes, {relaxed} needed relaxation, {failed} failed, p95 {:.2} ms",
        eps.len(),
        out.stats.wall_percentile_ms(0.95).unwrap_or(0.0)
    );
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, to_jsonl(&out.log)).unwrap();
        println!("log written to {path}");
    }
}
