//! Recovers the travel-time factor hidden in a synthetic dataset's history.
//!
//! cargo run --release --example calibrate -- [factor]

use delivery_dispatch::data::{generate_dataset, GeneratorSpec};
use delivery_dispatch::sim::calibrate;

fn main() {
    let factor = std::env::args().nth(1).map_or(1.35, |s| s.parse().expect("factor"));
    let ds = generate_dataset(&GeneratorSpec { days: 10, calibration_factor: factor, ..Default::default() });
    let c = calibrate(&ds, &ds.provider().unwrap()).unwrap();
    println!(
        "injected {factor}, recovered {:.4} from {} legs ({} s historical vs {} s estimated)",
        c.factor, c.legs_used, c.historical_seconds, c.estimated_seconds
    );
}
