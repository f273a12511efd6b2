//! Writes the standard synthetic dataset (or a shorter one) to a directory.
//!
//! cargo run --example generate_dataset -- out-dir [days] [seed]

use delivery_dispatch::data::{generate_dataset, Dataset, GeneratorSpec};

fn main() {
    let mut args = std::env::args().skip(1);
    let dir = args.next().expect("usage: generate_dataset DIR [days] [seed]");
    let days = args.next().map_or(61, |s| s.parse().expect("days"));
    let seed = args.next().map_or(0, |s| s.parse().expect("seed"));
    let ds = generate_dataset(&GeneratorSpec { days, rng_seed: seed, ..Default::default() });
    ds.write(dir.as_ref()).unwrap();
    let back = Dataset::load(dir.as_ref()).unwrap();
    assert_eq!(back, ds);
    println!(
        "{} orders, {} vehicles, {} historical trips written to {dir}",
        ds.orders.len(),
        ds.vehicles.len(),
        ds.hist_trips().len()
    );
}
