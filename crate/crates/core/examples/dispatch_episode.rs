//! One planning episode: six ready orders, two vehicles, deadlines that are
//! too tight for the first attempt. Prints the relaxation the loop needed,
//! the batches and the plan.
//!
//! cargo run --example dispatch_episode

use delivery_dispatch::data::{HaversineProvider, Location};
use delivery_dispatch::dispatch::{decide, DispatchState, LoopConfig, Order};
use delivery_dispatch::plan::emit_plan_text;
use delivery_dispatch::routing::Vehicle;
use delivery_dispatch::solver::SolverConfig;

fn main() {
    let depot = Location::new(50.0755, 14.4378);
    let noon = 12 * 3600;
    let mut state = DispatchState::new(depot, noon);
    let spots = [(0.010, 0.004), (0.012, 0.010), (-0.008, 0.015), (-0.015, -0.002), (0.003, -0.020), (0.018, -0.012)];
    for (i, (dlat, dlon)) in spots.iter().enumerate() {
        let id = format!("A{}", 101 + i);
        state.active_customers.insert(
            id.clone(),
            Order {
                id,
                placed_at: noon - 1500,
                ready_at: noon,
                deadline: noon + 300 + 60 * i as i64,
                location: Location::new(depot.lat + dlat, depot.lon + dlon),
                demand: 1,
            },
        );
    }
    for v in ["bike-1", "bike-2"] {
        state.available_vehicles.insert(v.into(), Vehicle::unlimited(v));
    }

    match decide(&state, &HaversineProvider::default(), &SolverConfig::default(), &LoopConfig::default()) {
        Ok(d) => {
            println!("solved after {} attempts, every deadline moved by {} s, {:?}", d.attempts, d.applied_delay, d.wall);
            for b in d.batches() {
                let etas: Vec<String> = b.etas.iter().map(|t| format!("+{}s", t - noon)).collect();
                println!("  {} on {}: {:?} at {}", b.delivery_id, b.vehicle_id, b.orders, etas.join(" "));
            }
            print!("{}", emit_plan_text(&d.plan.actions));
        }
        Err(e) => println!("{e}"),
    }
}
