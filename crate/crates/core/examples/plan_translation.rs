//! Turns a two-route solution into a delivery plan, validates it, and prints
//! it as PDDL plan text. With `domain` as the argument, prints the domain
//! file instead.
//!
//! cargo run --example plan_translation
//! cargo run --example plan_translation -- domain > domain.pddl

use delivery_dispatch::plan::{emit_pddl, emit_plan_text, parse_plan_text, translate, validate_plan, ActionName, PlanVerdict};
use delivery_dispatch::routing::{Customer, Route, RouteSolution, TravelGraph, Vehicle, VrptwTask};

fn main() {
    if std::env::args().nth(1).as_deref() == Some("domain") {
        print!("{}", emit_pddl());
        return;
    }
    let task = VrptwTask {
        vehicles: vec![Vehicle::unlimited("bike-1"), Vehicle::unlimited("bike-2")],
        customers: ["A17", "A18", "A19"]
            .iter()
            .enumerate()
            .map(|(i, id)| Customer { id: id.to_string(), node: i + 1, demand: 1, window_open: 0, window_close: 3600 })
            .collect(),
        graph: TravelGraph::from_fn(5, |i, j| if i == j { (0, 0) } else { (300, 2000) }),
        horizon_open: 0,
        horizon_close: 24 * 3600,
    };
    let routes = vec![
        Route { vehicle_id: "bike-1".into(), path: vec![0, 2, 1, 4], delivery_times: vec![0, 300, 600, 900] },
        Route { vehicle_id: "bike-2".into(), path: vec![0, 3, 4], delivery_times: vec![0, 300, 600] },
    ];
    let solution = RouteSolution::from_routes(&task, routes);
    let plan = translate(&solution, &task.customers, &task.vehicles).expect("known vehicles and orders");

    let text = emit_plan_text(&plan.actions);
    print!("{text}");
    assert_eq!(parse_plan_text(&text).unwrap(), plan.actions);
    println!("; {:?}", validate_plan(&plan));

    // deliver before driving there: rejected at that action
    let mut broken = plan.clone();
    let i = broken.actions.iter().position(|a| a.name == ActionName::DeliverOrder).unwrap();
    broken.actions.swap(i - 1, i);
    if let PlanVerdict::Invalid { index, code, message } = validate_plan(&broken) {
        println!("; swapped plan: action {index} fails with {code}: {message}");
    }
}
