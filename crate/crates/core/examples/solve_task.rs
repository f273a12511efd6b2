//! Solves one VRPTW task with the heuristic and, when small enough, the
//! exhaustive solver. Reads a task JSON file, or builds a five-stop example.
//!
//! cargo run --example solve_task
//! cargo run --example solve_task -- task.json

use std::time::Duration;

use delivery_dispatch::routing::{validate_solution, Customer, TravelGraph, Vehicle, VrptwTask};
use delivery_dispatch::solver::{solve, solve_exact, SolverConfig, MAX_EXACT_CUSTOMERS, MAX_EXACT_VEHICLES};

fn example() -> VrptwTask {
    // depot at the origin, customers on a ring; seconds = meters / 6
    let pos = [(0, 0), (1200, 0), (900, 900), (-600, 1100), (-1000, -300), (200, -1400), (0, 0)];
    let graph = TravelGraph::from_fn(pos.len(), |i, j| {
        let d = (((pos[i].0 - pos[j].0) as f64).powi(2) + ((pos[i].1 - pos[j].1) as f64).powi(2)).sqrt() as i64;
        (d / 6, d)
    });
    let closes = [600, 900, 1500, 700, 1800];
    VrptwTask {
        vehicles: vec![Vehicle::unlimited("bike-1"), Vehicle::unlimited("bike-2")],
        customers: closes
            .iter()
            .enumerate()
            .map(|(i, &close)| Customer { id: format!("order-{}", i + 1), node: i + 1, demand: 1, window_open: 0, window_close: close })
            .collect(),
        graph,
        horizon_open: 0,
        horizon_close: 4 * 3600,
    }
}

fn main() {
    let task = match std::env::args().nth(1) {
        Some(path) => VrptwTask::from_json(&std::fs::read_to_string(&path).expect("readable task")).expect("task JSON"),
        None => example(),
    };
    task.check(true).expect("well-formed task");

    let config = SolverConfig { time_budget: Duration::from_millis(50), ..Default::default() };
    let out = solve(&task, &config);
    println!("heuristic: {:?} in {:?}, {:?}", out.status, out.elapsed, out.stats);
    if let Some(sol) = &out.solution {
        for r in &sol.routes {
            println!("  {}: path {:?} times {:?}", r.vehicle_id, r.path, r.delivery_times);
        }
        println!("  time objective {} s, distance {} m", sol.objective_time, sol.objective_distance);
        println!("  validator: {} violations", validate_solution(&task, sol).violations.len());
    }
    if !out.unrouted.is_empty() {
        println!("  unrouted nodes {:?}", out.unrouted);
    }

    if task.customers.len() <= MAX_EXACT_CUSTOMERS && task.vehicles.len() <= MAX_EXACT_VEHICLES {
        let exact = solve_exact(&task).unwrap();
        match exact.solution.as_ref().filter(|_| exact.is_solved()) {
            Some(sol) => println!("exact optimum: {} s", sol.objective_time),
            None => println!("exact: no feasible solution"),
        }
    }
}
