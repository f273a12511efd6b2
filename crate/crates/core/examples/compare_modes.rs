//! Simulates a synthetic dataset in baseline and optimized mode and prints
//! the KPI ratios.
//!
//! cargo run --release --example compare_modes -- [days] [seed]

use std::time::Instant;

use delivery_dispatch::data::{compare, compute_kpis, generate_dataset, GeneratorSpec};
use delivery_dispatch::sim::{audit_log, calibrate, run, Mode, RunConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let days = args.next().map_or(7, |s| s.parse().expect("days"));
    let seed = args.next().map_or(1, |s| s.parse().expect("seed"));
    let ds = generate_dataset(&GeneratorSpec { days, rng_seed: seed, ..Default::default() });
    let factor = calibrate(&ds, &ds.provider().unwrap()).unwrap().factor;
    println!("{} orders over {days} days, calibration factor {factor:.4}", ds.orders.len());

    let mut reports = Vec::new();
    for mode in [Mode::Baseline, Mode::Optimized] {
        let started = Instant::now();
        let out = run(&ds, RunConfig::deterministic(mode, factor, seed)).unwrap();
        let violations = audit_log(&out.log, &ds, factor);
        let k = compute_kpis(&out.log, &ds);
        println!(
            "{mode:?}: {:.1}s, {} events, {} episodes (p95 {:.1} ms), {} audit violations, {} failed days, totals {:?}",
            started.elapsed().as_secs_f64(),
            out.log.len(),
            out.stats.episodes.len(),
            out.stats.wall_percentile_ms(0.95).unwrap_or(0.0),
            violations.len(),
            out.failed_days.len(),
            k.totals
        );
        for v in violations.iter().take(5) {
            println!("  {}: {}", v.index, v.message);
        }
        reports.push(k);
    }
    print!("{}", compare(&reports[1], &reports[0]).to_csv());
}
