//! Full feasibility check of a solution against its task.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::model::{RouteSolution, VrptwTask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ViolationCode {
    Partition,
    Capacity,
    Window,
    Horizon,
    Shape,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationCode::Partition => "PARTITION",
            ViolationCode::Capacity => "CAPACITY",
            ViolationCode::Window => "WINDOW",
            ViolationCode::Horizon => "HORIZON",
            ViolationCode::Shape => "SHAPE",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    /// Index into `solution.routes`, when the violation belongs to one route.
    pub route: Option<usize>,
    pub node: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

/// Reports every violated condition, not just the first.
pub fn validate_solution(task: &VrptwTask, solution: &RouteSolution) -> Verdict {
    let mut out = Vec::new();
    let mut push = |code, route, node, message: String| {
        out.push(Violation { code, route, node, message });
    };
    let ret = task.return_node();

    // one route per vehicle
    let mut per_vehicle: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &solution.routes {
        *per_vehicle.entry(r.vehicle_id.as_str()).or_default() += 1;
    }
    for v in &task.vehicles {
        match per_vehicle.get(v.id.as_str()) {
            None => push(ViolationCode::Shape, None, None, format!("vehicle `{}` has no route", v.id)),
            Some(&n) if n > 1 => push(ViolationCode::Shape, None, None, format!("vehicle `{}` has {n} routes", v.id)),
            _ => {}
        }
    }

    let mut visits = vec![0usize; ret + 1];
    for (ri, route) in solution.routes.iter().enumerate() {
        let vehicle = task.vehicle(&route.vehicle_id);
        if vehicle.is_none() {
            push(ViolationCode::Shape, Some(ri), None, format!("unknown vehicle `{}`", route.vehicle_id));
        }
        let path = &route.path;
        if path.len() < 2 || path[0] != 0 || *path.last().unwrap() != ret {
            push(ViolationCode::Shape, Some(ri), None, format!("path {path:?} does not run depot to depot"));
        }
        if route.delivery_times.len() != path.len() {
            push(
                ViolationCode::Shape,
                Some(ri),
                None,
                format!("{} delivery times for {} path nodes", route.delivery_times.len(), path.len()),
            );
        }
        let interior = if path.len() >= 2 { &path[1..path.len() - 1] } else { &[][..] };
        let mut load = 0u64;
        let mut bad_node = false;
        for &node in interior {
            match task.customer_at(node) {
                Some(c) => {
                    visits[node] += 1;
                    load += c.demand;
                }
                None => {
                    bad_node = true;
                    push(ViolationCode::Shape, Some(ri), Some(node), format!("node {node} is not a customer"));
                }
            }
        }
        if let Some(v) = vehicle {
            if !v.fits(load) {
                push(
                    ViolationCode::Capacity,
                    Some(ri),
                    None,
                    format!("load {load} exceeds capacity {:?} of `{}`", v.capacity, v.id),
                );
            }
        }

        // Timing is only meaningful on a well-formed path.
        if bad_node || route.delivery_times.len() != path.len() || path.is_empty() {
            continue;
        }
        let t = &route.delivery_times;
        if path[0] == 0 && t[0] < task.horizon_open {
            push(
                ViolationCode::Horizon,
                Some(ri),
                Some(0),
                format!("departs at {} before horizon open {}", t[0], task.horizon_open),
            );
        }
        for i in 1..path.len() {
            let (prev, node) = (path[i - 1], path[i]);
            if prev > ret || node > ret {
                continue;
            }
            let earliest = t[i - 1] + task.graph.time(prev, node);
            if t[i] < earliest {
                push(
                    ViolationCode::Window,
                    Some(ri),
                    Some(node),
                    format!("time {} at node {node} precedes arrival {earliest}", t[i]),
                );
            }
            if node == ret {
                if t[i] > task.horizon_close {
                    push(
                        ViolationCode::Horizon,
                        Some(ri),
                        Some(node),
                        format!("returns at {} after horizon close {}", t[i], task.horizon_close),
                    );
                }
            } else if let Some(c) = task.customer_at(node) {
                if t[i] < c.window_open || t[i] > c.window_close {
                    push(
                        ViolationCode::Window,
                        Some(ri),
                        Some(node),
                        format!("time {} outside window [{}, {}]", t[i], c.window_open, c.window_close),
                    );
                }
            }
        }
    }

    for node in 1..ret {
        match visits[node] {
            1 => {}
            0 => push(ViolationCode::Partition, None, Some(node), format!("customer node {node} is not served")),
            n => push(ViolationCode::Partition, None, Some(node), format!("customer node {node} served {n} times")),
        }
    }

    Verdict { violations: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::routing::model::{Customer, Route, TravelGraph, Vehicle};
    use crate::routing::schedule::schedule_route;

    fn task() -> VrptwTask {
        let pos = [0i64, 1000, 2000, 3000, 0];
        VrptwTask {
            vehicles: vec![Vehicle::with_capacity("v1", 2), Vehicle::with_capacity("v2", 2)],
            customers: (1..=3)
                .map(|n| Customer {
                    id: format!("c{n}"),
                    node: n,
                    demand: 1,
                    window_open: 0,
                    window_close: 1000,
                })
                .collect(),
            graph: TravelGraph::from_fn(5, |i, j| ((pos[i] - pos[j]).abs() / 10, (pos[i] - pos[j]).abs())),
            horizon_open: 0,
            horizon_close: 2000,
        }
    }

    fn sched(task: &VrptwTask, v: &str, path: &[usize]) -> Route {
        schedule_route(task, v, path).unwrap().feasible().unwrap()
    }

    #[test]
    fn accepts_scheduled_partition() {
        let t = task();
        let s = RouteSolution::from_routes(&t, vec![sched(&t, "v1", &[0, 1, 2, 4]), sched(&t, "v2", &[0, 3, 4])]);
        let verdict = validate_solution(&t, &s);
        assert!(verdict.is_valid(), "{verdict:?}");
    }

    #[test]
    fn duplicate_customer_is_a_partition_violation() {
        let t = task();
        let s = RouteSolution::from_routes(&t, vec![sched(&t, "v1", &[0, 1, 2, 4]), sched(&t, "v2", &[0, 2, 3, 4])]);
        let verdict = validate_solution(&t, &s);
        assert!(verdict.has(ViolationCode::Partition));
        assert!(!verdict.has(ViolationCode::Capacity));
    }

    #[test]
    fn reports_every_violation() {
        let t = task();
        let mut r1 = sched(&t, "v1", &[0, 1, 2, 3, 4]);
        r1.delivery_times[3] = 5000; // outside c3's window
        r1.delivery_times[4] = 5300; // back after horizon close
        let s = RouteSolution::from_routes(&t, vec![r1]);
        let verdict = validate_solution(&t, &s);
        for code in [ViolationCode::Capacity, ViolationCode::Window, ViolationCode::Shape, ViolationCode::Horizon] {
            assert!(verdict.has(code), "missing {code}: {verdict:?}");
        }
    }

    #[test]
    fn unlimited_capacity_never_binds() {
        let mut t = task();
        for v in &mut t.vehicles {
            v.capacity = None;
        }
        let s = RouteSolution::from_routes(&t, vec![sched(&t, "v1", &[0, 1, 2, 3, 4]), Route::empty("v2", &t)]);
        assert!(validate_solution(&t, &s).is_valid());
    }
}
