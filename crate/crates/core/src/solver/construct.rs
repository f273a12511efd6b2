//! Path-cheapest-arc construction.
//!
//! Routes are grown one vehicle at a time: starting at the depot, the route is
//! extended by the unrouted customer reachable through the cheapest feasible
//! arc (travel time) until no customer can be appended, then the next vehicle
//! starts. Ties go to the lowest customer node.

use crate::routing::{schedule_route, Route, RouteSolution, Seconds, VrptwTask};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    /// One route per vehicle, in `task.vehicles` order.
    pub solution: RouteSolution,
    /// Customer nodes that could not be appended anywhere.
    pub unrouted: Vec<usize>,
    pub nodes_inserted: usize,
}

impl Construction {
    pub fn is_complete(&self) -> bool {
        self.unrouted.is_empty()
    }
}

pub fn construct_cheapest_arc(task: &VrptwTask) -> Construction {
    let k = task.customer_count();
    let ret = task.return_node();
    let mut routed = vec![false; k + 1];
    let mut remaining = k;
    let mut routes = Vec::with_capacity(task.vehicles.len());

    for vehicle in &task.vehicles {
        let mut path = vec![0usize];
        let mut at = 0usize;
        let mut t: Seconds = task.horizon_open;
        let mut load = 0u64;
        while remaining > 0 {
            let mut best: Option<(Seconds, usize, Seconds)> = None;
            for node in 1..=k {
                if routed[node] {
                    continue;
                }
                let c = &task.customers[node - 1];
                if !vehicle.fits(load + c.demand) {
                    continue;
                }
                let arc = task.graph.time(at, node);
                let arrival = (t + arc).max(c.window_open);
                if arrival > c.window_close {
                    continue;
                }
                let back = (arrival + task.graph.time(node, ret)).max(task.horizon_open);
                if back > task.horizon_close {
                    continue;
                }
                if best.is_none_or(|(b, _, _)| arc < b) {
                    best = Some((arc, node, arrival));
                }
            }
            let Some((_, node, arrival)) = best else { break };
            routed[node] = true;
            remaining -= 1;
            load += task.customers[node - 1].demand;
            path.push(node);
            at = node;
            t = arrival;
        }
        path.push(ret);
        let route = match schedule_route(task, &vehicle.id, &path) {
            Ok(outcome) => outcome.feasible(),
            Err(_) => None,
        };
        // An empty route can still be infeasible if the horizon is too short to
        // return; keep the shape so the caller sees the vehicle.
        routes.push(route.unwrap_or_else(|| Route::empty(vehicle.id.clone(), task)));
    }

    let unrouted: Vec<usize> = (1..=k).filter(|&n| !routed[n]).collect();
    Construction {
        solution: RouteSolution::from_routes(task, routes),
        nodes_inserted: k - unrouted.len(),
        unrouted,
    }
}
