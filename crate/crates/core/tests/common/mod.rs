//! Instance generators and oracles shared by the integration tests. The
//! oracles are written from the model's definitions and share no code with
//! the library beyond its data types.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use delivery_dispatch::data::Dataset;
use delivery_dispatch::plan::{ActionName, ObjectType, Plan};
use delivery_dispatch::routing::{Customer, Route, RouteSolution, Seconds, TravelGraph, Vehicle, VrptwTask};
use delivery_dispatch::sim::{EntityKind, LogEvent};
use rand::seq::SliceRandom;
use rand::Rng;

/// Customers on a 10 km square; time = distance / 10 m/s.
pub fn random_task<R: Rng>(rng: &mut R, customers: usize, vehicles: usize, window_slack: Seconds) -> VrptwTask {
    let n = customers + 2;
    let mut pos: Vec<(i64, i64)> = (0..n).map(|_| (rng.random_range(0..10_000), rng.random_range(0..10_000))).collect();
    pos[n - 1] = pos[0];
    let graph = TravelGraph::from_fn(n, |i, j| {
        let (dx, dy) = ((pos[i].0 - pos[j].0) as f64, (pos[i].1 - pos[j].1) as f64);
        let d = (dx * dx + dy * dy).sqrt().round() as i64;
        (d / 10, d)
    });
    let customers = (1..=customers)
        .map(|node| {
            let open = rng.random_range(0..1800);
            Customer {
                id: format!("c{node}"),
                node,
                demand: rng.random_range(1..=3),
                window_open: open,
                window_close: open + rng.random_range(0..=window_slack),
            }
        })
        .collect();
    VrptwTask {
        vehicles: (1..=vehicles).map(|i| Vehicle::unlimited(format!("v{i}"))).collect(),
        customers,
        graph,
        horizon_open: 0,
        horizon_close: 6 * 3600,
    }
}

/// A task plus a path that is feasible by construction: windows are placed
/// around a schedule with random waiting.
pub fn feasible_path_task<R: Rng>(rng: &mut R, max_stops: usize) -> (VrptwTask, Vec<usize>) {
    let k = rng.random_range(0..=max_stops);
    let mut task = random_task(rng, k, 1, 0);
    let mut order: Vec<usize> = (1..=k).collect();
    order.shuffle(rng);
    let mut t = task.horizon_open;
    let mut prev = 0;
    for &node in &order {
        t += task.graph.time(prev, node) + rng.random_range(0..300);
        let c = &mut task.customers[node - 1];
        // some windows open after the planned time so the schedule must wait
        c.window_open = (t + rng.random_range(-600..300)).max(0);
        c.window_close = t.max(c.window_open) + rng.random_range(0..600);
        t = t.max(c.window_open);
        prev = node;
    }
    task.horizon_close = t + task.graph.time(prev, k + 1) + rng.random_range(0..600);
    let mut path = vec![0];
    path.extend(order);
    path.push(k + 1);
    (task, path)
}

/// Checks `max(open_i, t_{i-1} + time) <= t_i <= close_i` along a path, with
/// equality on the left (no idle time beyond waiting for a window).
pub fn schedule_is_exact(task: &VrptwTask, path: &[usize], times: &[Seconds]) -> Result<(), String> {
    let ret = task.customers.len() + 1;
    if times.len() != path.len() {
        return Err("length mismatch".into());
    }
    if times[0] != task.horizon_open {
        return Err(format!("departure {} != {}", times[0], task.horizon_open));
    }
    for i in 1..path.len() {
        let (a, b) = if path[i] == ret {
            (task.horizon_open, task.horizon_close)
        } else {
            let c = &task.customers[path[i] - 1];
            (c.window_open, c.window_close)
        };
        let lower = a.max(times[i - 1] + task.graph.time(path[i - 1], path[i]));
        if times[i] != lower {
            return Err(format!("position {i}: t={} expected {lower}", times[i]));
        }
        if times[i] > b {
            return Err(format!("position {i}: t={} after close {b}", times[i]));
        }
    }
    Ok(())
}

/// Conditions a routing solution must meet, read directly off the model
/// definition. Returns the list of broken conditions.
pub fn broken_conditions(task: &VrptwTask, sol: &RouteSolution) -> Vec<String> {
    let mut out = Vec::new();
    let k = task.customers.len();
    let ret = k + 1;
    let ids: Vec<&str> = sol.routes.iter().map(|r| r.vehicle_id.as_str()).collect();
    for v in &task.vehicles {
        let n = ids.iter().filter(|&&id| id == v.id).count();
        if n != 1 {
            out.push(format!("vehicle {} has {n} routes", v.id));
        }
    }
    for id in &ids {
        if !task.vehicles.iter().any(|v| v.id == *id) {
            out.push(format!("route for unknown vehicle {id}"));
        }
    }
    let mut served = vec![0; k + 2];
    for r in &sol.routes {
        let p = &r.path;
        let t = &r.delivery_times;
        if p.len() < 2 || p[0] != 0 || p[p.len() - 1] != ret || t.len() != p.len() {
            out.push(format!("route {} malformed", r.vehicle_id));
            continue;
        }
        if p[1..p.len() - 1].iter().any(|&n| n == 0 || n >= ret) {
            out.push(format!("route {} visits a non-customer", r.vehicle_id));
            continue;
        }
        let mut load = 0;
        for &n in &p[1..p.len() - 1] {
            served[n] += 1;
            load += task.customers[n - 1].demand;
        }
        if let Some(v) = task.vehicles.iter().find(|v| v.id == r.vehicle_id) {
            if v.capacity.is_some_and(|q| load > q) {
                out.push(format!("route {} over capacity", r.vehicle_id));
            }
        }
        if t[0] < task.horizon_open {
            out.push(format!("route {} departs early", r.vehicle_id));
        }
        for i in 1..p.len() {
            let (a, b) = if p[i] == ret {
                (task.horizon_open, task.horizon_close)
            } else {
                let c = &task.customers[p[i] - 1];
                (c.window_open, c.window_close)
            };
            if t[i] < a.max(t[i - 1] + task.graph.time(p[i - 1], p[i])) || t[i] > b {
                out.push(format!("route {} timing at position {i}", r.vehicle_id));
            }
        }
    }
    for (n, &count) in served.iter().enumerate().take(ret).skip(1) {
        if count != 1 {
            out.push(format!("customer node {n} served {count} times"));
        }
    }
    out
}

/// Sum of depot-return times, computed independently.
pub fn time_objective(sol: &RouteSolution) -> Seconds {
    sol.routes.iter().map(|r| *r.delivery_times.last().unwrap()).sum()
}

/// Minimum time objective by dynamic programming over customer subsets:
/// `best[S][last]` is the earliest time a single vehicle can have served `S`
/// ending at `last` (earliest arrival dominates any later one). Subsets are
/// then split over vehicles. Unlimited capacities only.
pub fn dp_optimum(task: &VrptwTask) -> Option<Seconds> {
    assert!(task.vehicles.iter().all(|v| v.capacity.is_none()));
    let k = task.customers.len();
    let ret = k + 1;
    let full = 1usize << k;
    const INF: Seconds = Seconds::MAX / 4;
    let mut best = vec![vec![INF; k]; full];
    for c in 0..k {
        let cu = &task.customers[c];
        let t = (task.horizon_open + task.graph.time(0, c + 1)).max(cu.window_open);
        if t <= cu.window_close {
            best[1 << c][c] = t;
        }
    }
    for s in 1..full {
        for last in 0..k {
            let t = best[s][last];
            if t >= INF {
                continue;
            }
            for nxt in 0..k {
                if s & (1 << nxt) != 0 {
                    continue;
                }
                let cu = &task.customers[nxt];
                let arr = (t + task.graph.time(last + 1, nxt + 1)).max(cu.window_open);
                if arr <= cu.window_close {
                    let ns = s | (1 << nxt);
                    if arr < best[ns][nxt] {
                        best[ns][nxt] = arr;
                    }
                }
            }
        }
    }
    // single-route cost of each subset
    let mut route = vec![INF; full];
    let empty = (task.horizon_open + task.graph.time(0, ret)).max(task.horizon_open);
    if empty <= task.horizon_close {
        route[0] = empty;
    }
    for s in 1..full {
        for last in 0..k {
            if best[s][last] < INF {
                let back = (best[s][last] + task.graph.time(last + 1, ret)).max(task.horizon_open);
                if back <= task.horizon_close && back < route[s] {
                    route[s] = back;
                }
            }
        }
    }
    // split the full set over the vehicles
    let mut cover = route.clone();
    for _ in 1..task.vehicles.len() {
        let mut next = vec![INF; full];
        for s in 0..full {
            let mut sub = s;
            loop {
                let rest = s ^ sub;
                if cover[sub] < INF && route[rest] < INF {
                    next[s] = next[s].min(cover[sub] + route[rest]);
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & s;
            }
        }
        cover = next;
    }
    (cover[full - 1] < INF).then_some(cover[full - 1])
}

/// Assembles a solution from per-vehicle paths using a plain forward pass.
pub fn assemble(task: &VrptwTask, paths: &[(String, Vec<usize>)]) -> RouteSolution {
    let ret = task.customers.len() + 1;
    let routes: Vec<Route> = paths
        .iter()
        .map(|(v, p)| {
            let mut t = vec![task.horizon_open];
            for w in p.windows(2) {
                let open = if w[1] == ret { task.horizon_open } else { task.customers[w[1] - 1].window_open };
                t.push((t[t.len() - 1] + task.graph.time(w[0], w[1])).max(open));
            }
            Route {
                vehicle_id: v.clone(),
                path: p.clone(),
                delivery_times: t,
            }
        })
        .collect();
    let dist = routes
        .iter()
        .map(|r| r.path.windows(2).map(|w| task.graph.dist(w[0], w[1])).sum::<i64>())
        .sum();
    let time = routes.iter().map(|r| *r.delivery_times.last().unwrap()).sum();
    RouteSolution {
        routes,
        objective_distance: dist,
        objective_time: time,
    }
}

/// Declarative plan check: each precondition is a query over the plan prefix
/// rather than a running state. Returns the index of the first action whose
/// conditions fail, `Some(len)` if the goal is unmet, or `None` if valid.
pub fn plan_first_failure(plan: &Plan) -> Option<usize> {
    let acts = &plan.actions;
    let typed = |name: &str, ty: ObjectType| plan.objects.get(name) == Some(&ty);
    // prefix queries
    let before = |i: usize, name: ActionName| acts[..i].iter().enumerate().filter(move |(_, a)| a.name == name);
    let position = |i: usize, v: &str| -> String {
        acts[..i]
            .iter()
            .rev()
            .find(|a| a.name == ActionName::Drive && a.args[0] == v)
            .map_or("depot".to_string(), |a| a.args[2].clone())
    };
    // delivery currently on the road with `v` just before `i`
    let trip = |i: usize, v: &str| -> Option<String> {
        let (di, d) = before(i, ActionName::DispatchDelivery)
            .filter(|(_, a)| a.args[1] == v)
            .map(|(j, a)| (j, a.args[0].clone()))
            .last()?;
        let finished = before(i, ActionName::FinishDelivery).any(|(j, a)| j > di && a.args[0] == d);
        (!finished).then_some(d)
    };
    let group_of = |i: usize, o: &str| -> Option<String> {
        before(i, ActionName::AssignOrder).find(|(_, a)| a.args[0] == o).map(|(_, a)| a.args[1].clone())
    };
    let members = |i: usize, d: &str| -> Vec<String> {
        before(i, ActionName::AssignOrder).filter(|(_, a)| a.args[1] == d).map(|(_, a)| a.args[0].clone()).collect()
    };
    let delivered = |i: usize, o: &str| before(i, ActionName::DeliverOrder).any(|(_, a)| a.args[0] == o);
    let dispatched = |i: usize, d: &str| before(i, ActionName::DispatchDelivery).any(|(_, a)| a.args[0] == d);
    let assigned_to = |i: usize, d: &str| -> Option<String> {
        before(i, ActionName::AssignDelivery).find(|(_, a)| a.args[0] == d).map(|(_, a)| a.args[1].clone())
    };
    let idle = |i: usize, v: &str| trip(i, v).is_none() && position(i, v) == "depot";

    for (i, a) in acts.iter().enumerate() {
        let sig: &[ObjectType] = match a.name {
            ActionName::AssignOrder => &[ObjectType::Order, ObjectType::Delivery],
            ActionName::AssignDelivery | ActionName::DispatchDelivery | ActionName::FinishDelivery => {
                &[ObjectType::Delivery, ObjectType::Vehicle]
            }
            ActionName::Drive => &[ObjectType::Vehicle, ObjectType::Location, ObjectType::Location],
            ActionName::DeliverOrder => &[ObjectType::Order, ObjectType::Vehicle, ObjectType::Location],
        };
        if a.args.len() != sig.len() || a.args.iter().zip(sig).any(|(x, &t)| !typed(x, t)) {
            return Some(i);
        }
        let x = &a.args;
        let ok = match a.name {
            ActionName::AssignOrder => group_of(i, &x[0]).is_none() && !dispatched(i, &x[1]),
            ActionName::AssignDelivery => assigned_to(i, &x[0]).is_none() && idle(i, &x[1]),
            ActionName::DispatchDelivery => {
                assigned_to(i, &x[0]).as_deref() == Some(x[1].as_str())
                    && !dispatched(i, &x[0])
                    && !members(i, &x[0]).is_empty()
                    && idle(i, &x[1])
            }
            ActionName::Drive => trip(i, &x[0]).is_some() && position(i, &x[0]) == x[1],
            ActionName::DeliverOrder => {
                let on_trip = trip(i, &x[1]);
                position(i, &x[1]) == x[2]
                    && on_trip.is_some()
                    && group_of(i, &x[0]) == on_trip
                    && !delivered(i, &x[0])
                    && plan.destinations.get(&x[0]) == Some(&x[2])
            }
            ActionName::FinishDelivery => {
                trip(i, &x[1]).as_deref() == Some(x[0].as_str())
                    && position(i, &x[1]) == "depot"
                    && members(i, &x[0]).iter().all(|o| delivered(i, o))
            }
        };
        if !ok {
            return Some(i);
        }
    }
    let n = acts.len();
    let orders_done = plan
        .objects
        .iter()
        .filter(|(_, &t)| t == ObjectType::Order)
        .all(|(o, _)| delivered(n, o));
    let deliveries_done = plan.objects.iter().filter(|(_, &t)| t == ObjectType::Delivery).all(|(d, _)| {
        before(n, ActionName::FinishDelivery).any(|(_, a)| &a.args[0] == d)
    });
    (!(orders_done && deliveries_done)).then_some(n)
}

/// Per-order delivery tick and per-day driven seconds/meters, recomputed in a
/// single pass over the raw log.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Recount {
    pub td: i64,
    pub pd: u64,
    pub p10d: u64,
    pub dt: i64,
    pub dd: i64,
    pub delivered: u64,
    pub undeliverable: u64,
}

pub fn recount(log: &[LogEvent], ds: &Dataset) -> Recount {
    let epoch = ds.orders.iter().map(|o| o.placed_at.date()).min().unwrap().and_hms_opt(0, 0, 0).unwrap();
    let deadlines: HashMap<&str, i64> =
        ds.orders.iter().map(|o| (o.order_id.as_str(), (o.deadline - epoch).num_seconds())).collect();
    let mut r = Recount::default();
    for e in log {
        match (e.entity_kind, e.transition.as_str()) {
            (EntityKind::Order, "delivered") => {
                r.delivered += 1;
                let late = e.tick * 60 - deadlines[e.entity_id.as_str()];
                if late > 0 {
                    r.td += late;
                    r.pd += 1;
                }
                if late > 600 {
                    r.p10d += 1;
                }
            }
            (EntityKind::Order, "undeliverable") => r.undeliverable += 1,
            (EntityKind::Vehicle, "leg") => {
                r.dt += e.detail["seconds"].as_i64().unwrap();
                r.dd += e.detail["meters"].as_i64().unwrap();
            }
            _ => {}
        }
    }
    r
}

/// `(vehicle, stops)` for every trip started in a run log.
pub fn trips_from_log(log: &[LogEvent]) -> Vec<(String, Vec<String>)> {
    let mut out: Vec<(String, Vec<String>)> = log
        .iter()
        .filter(|e| e.entity_kind == EntityKind::Vehicle && e.transition == "loading")
        .map(|e| {
            let stops = e.detail["orders"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect();
            (e.entity_id.clone(), stops)
        })
        .collect();
    out.sort();
    out
}

/// The route each trip actually drove, from its leg events, in log order.
pub fn driven_stops(log: &[LogEvent]) -> BTreeMap<String, Vec<Vec<String>>> {
    let mut out: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
    for e in log.iter().filter(|e| e.entity_kind == EntityKind::Vehicle && e.transition == "leg") {
        let trips = out.entry(e.entity_id.clone()).or_default();
        if e.detail["from"] == "depot" {
            trips.push(Vec::new());
        }
        let to = e.detail["to"].as_str().unwrap();
        if to != "depot" {
            trips.last_mut().unwrap().push(to.to_string());
        }
    }
    out
}

pub fn distinct<T: Ord + Clone>(xs: &[T]) -> bool {
    xs.iter().cloned().collect::<BTreeSet<_>>().len() == xs.len()
}

/// Tasks shaped like the dispatch loop builds them: every window opens at 0
/// and closes at a deadline some way past the direct drive from the depot.
pub fn deadline_task<R: Rng>(rng: &mut R, customers: usize, vehicles: usize, slack: Seconds) -> VrptwTask {
    let mut task = random_task(rng, customers, vehicles, 0);
    for c in &mut task.customers {
        c.window_open = 0;
        c.window_close = task.graph.time(0, c.node) + rng.random_range(0..=slack);
    }
    task
}

/// Episode-sized tasks on the scale of the synthetic city: customers on a
/// 3.5 km disc around the depot at 6 m/s, windows `[0, d]` with `d` drawn
/// from `deadline` seconds.
pub fn episode_task<R: Rng>(rng: &mut R, customers: usize, vehicles: usize, deadline: (Seconds, Seconds)) -> VrptwTask {
    let n = customers + 2;
    let mut pos = vec![(0.0f64, 0.0f64); n];
    for p in pos.iter_mut().take(n - 1).skip(1) {
        let r = 3500.0 * rng.random::<f64>().sqrt();
        let a = rng.random::<f64>() * std::f64::consts::TAU;
        *p = (r * a.cos(), r * a.sin());
    }
    let graph = TravelGraph::from_fn(n, |i, j| {
        let d = ((pos[i].0 - pos[j].0).powi(2) + (pos[i].1 - pos[j].1).powi(2)).sqrt();
        ((d / 6.0).round() as i64, d.round() as i64)
    });
    let customers = (1..=customers)
        .map(|node| Customer {
            id: format!("c{node}"),
            node,
            demand: 1,
            window_open: 0,
            window_close: rng.random_range(deadline.0..=deadline.1),
        })
        .collect();
    VrptwTask {
        vehicles: (1..=vehicles).map(|i| Vehicle::unlimited(format!("v{i}"))).collect(),
        customers,
        graph,
        horizon_open: 0,
        horizon_close: 24 * 3600,
    }
}

/// One random edit of a plan: drop, duplicate, swap or move an action, swap
/// adjacent actions, replace an argument, or rename an action.
pub fn mutate_plan<R: Rng>(rng: &mut R, plan: &Plan) -> Plan {
    let mut m = plan.clone();
    let n = m.actions.len();
    if n == 0 {
        return m;
    }
    let i = rng.random_range(0..n);
    match rng.random_range(0..8) {
        0 => {
            m.actions.remove(i);
        }
        1 => {
            let a = m.actions[i].clone();
            m.actions.insert(rng.random_range(0..=n), a);
        }
        2 if n > 1 => {
            let j = if i + 1 < n { i + 1 } else { i - 1 };
            m.actions.swap(i, j);
        }
        3 => {
            let j = rng.random_range(0..n);
            m.actions.swap(i, j);
        }
        4 => {
            let a = m.actions.remove(i);
            m.actions.insert(rng.random_range(0..n), a);
        }
        5 => {
            // another object of the same type
            let k = rng.random_range(0..m.actions[i].args.len());
            let ty = m.actions[i].name.signature()[k];
            let pool: Vec<&String> = m.objects.iter().filter(|(_, &t)| t == ty).map(|(o, _)| o).collect();
            m.actions[i].args[k] = pool[rng.random_range(0..pool.len())].clone();
        }
        6 => {
            // any declared object
            let k = rng.random_range(0..m.actions[i].args.len());
            let pool: Vec<&String> = m.objects.keys().collect();
            m.actions[i].args[k] = pool[rng.random_range(0..pool.len())].clone();
        }
        _ => {
            let arity = m.actions[i].args.len();
            let same: Vec<ActionName> =
                ActionName::ALL.into_iter().filter(|a| a.arity() == arity && *a != m.actions[i].name).collect();
            if !same.is_empty() {
                m.actions[i].name = same[rng.random_range(0..same.len())];
            }
        }
    }
    m
}

/// A random solved task and its plan, with at least one non-empty route.
pub fn random_plan<R: Rng>(rng: &mut R) -> (VrptwTask, RouteSolution, Plan) {
    use delivery_dispatch::solver::{solve, SolverConfig};
    loop {
        let (k, v) = (rng.random_range(1..=12), rng.random_range(1..=4));
        let task = episode_task(rng, k, v, (1200, 20_000));
        let cfg = SolverConfig { rng_seed: rng.random(), max_evaluations: Some(500), ..Default::default() };
        if let Some(sol) = solve(&task, &cfg).solution {
            let plan = delivery_dispatch::plan::translate(&sol, &task.customers, &task.vehicles).unwrap();
            return (task, sol, plan);
        }
    }
}

/// A dispatcher state around a fixed depot: `orders` within 3 km whose
/// deadlines fall `deadline` seconds after the clock, and `vehicles` idle
/// vehicles.
pub fn random_dispatch_state<R: Rng>(
    rng: &mut R,
    orders: usize,
    vehicles: usize,
    deadline: (Seconds, Seconds),
) -> delivery_dispatch::dispatch::DispatchState {
    use delivery_dispatch::data::Location;
    use delivery_dispatch::dispatch::{DispatchState, Order};
    let depot = Location::new(50.0755, 14.4378);
    let clock = rng.random_range(36_000..80_000);
    let mut s = DispatchState::new(depot, clock);
    for i in 0..orders {
        let id = format!("o{i:03}");
        let loc = Location::new(depot.lat + rng.random_range(-0.027..0.027), depot.lon + rng.random_range(-0.04..0.04));
        s.active_customers.insert(
            id.clone(),
            Order {
                id,
                placed_at: clock - 1200,
                ready_at: clock,
                deadline: clock + rng.random_range(deadline.0..=deadline.1),
                location: loc,
                demand: 1,
            },
        );
    }
    for i in 0..vehicles {
        let id = format!("v{i}");
        s.available_vehicles.insert(id.clone(), Vehicle::unlimited(id));
    }
    s
}

/// One random edit: move, swap, drop or duplicate a node, shift a time,
/// rename or drop a route.
pub fn mutate_solution<R: Rng>(rng: &mut R, task: &VrptwTask, sol: &RouteSolution) -> RouteSolution {
    let mut m = sol.clone();
    let r = rng.random_range(0..m.routes.len());
    let len = m.routes[r].path.len();
    match rng.random_range(0..8) {
        0 => {
            // shift one time
            let i = rng.random_range(0..len);
            m.routes[r].delivery_times[i] += rng.random_range(-900..900);
        }
        1 if len > 3 => {
            // swap two customers, keeping the times
            let (i, j) = (rng.random_range(1..len - 1), rng.random_range(1..len - 1));
            m.routes[r].path.swap(i, j);
        }
        2 if len > 2 => {
            // drop a customer
            let i = rng.random_range(1..len - 1);
            m.routes[r].path.remove(i);
            m.routes[r].delivery_times.remove(i);
        }
        3 => {
            // duplicate a customer into this route
            let node = rng.random_range(1..=task.customers.len());
            let t = m.routes[r].delivery_times[len - 1];
            m.routes[r].path.insert(len - 1, node);
            m.routes[r].delivery_times.insert(len - 1, t);
        }
        4 => {
            m.routes[r].vehicle_id = format!("{}x", m.routes[r].vehicle_id);
        }
        5 if m.routes.len() > 1 => {
            m.routes.remove(r);
        }
        6 => {
            // depart later: all times shift, may break the last window
            let d = rng.random_range(1..1200);
            for t in &mut m.routes[r].delivery_times {
                *t += d;
            }
        }
        _ => {
            let i = rng.random_range(0..len);
            m.routes[r].delivery_times[i] -= rng.random_range(1..120);
        }
    }
    m
}
