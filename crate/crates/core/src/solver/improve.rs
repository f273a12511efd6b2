//! First-improvement local search with relocate and intra-route 2-opt moves,
//! minimising the time objective.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::routing::{return_time, schedule_route, RouteSolution, Seconds, VrptwTask};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ImproveStats {
    pub passes: u32,
    pub moves_applied: u32,
    pub evaluations: u64,
    /// Stopped by the deadline or evaluation limit rather than at a local optimum.
    pub interrupted: bool,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ImproveLimits {
    pub deadline: Option<Instant>,
    /// Cap on route evaluations; makes the search reproducible regardless of
    /// machine speed.
    pub max_evaluations: Option<u64>,
}

struct Search<'a> {
    task: &'a VrptwTask,
    caps: Vec<Option<u64>>,
    routes: Vec<Vec<usize>>,
    costs: Vec<Seconds>,
    limits: ImproveLimits,
    stats: ImproveStats,
}

impl Search<'_> {
    fn eval(&mut self, vehicle: usize, customers: &[usize]) -> Option<Seconds> {
        self.stats.evaluations += 1;
        return_time(self.task, self.caps[vehicle], customers)
    }

    fn out_of_budget(&mut self) -> bool {
        let over = self.limits.max_evaluations.is_some_and(|m| self.stats.evaluations >= m)
            || (self.stats.evaluations % 64 == 0 && self.limits.deadline.is_some_and(|d| Instant::now() >= d));
        if over {
            self.stats.interrupted = true;
        }
        over
    }

    /// Tries relocating the customer at `routes[from][pos]`; applies the first improving move.
    fn relocate_from(&mut self, from: usize, pos: usize) -> Option<bool> {
        let node = self.routes[from][pos];
        let mut reduced = self.routes[from].clone();
        reduced.remove(pos);
        // Without the triangle inequality a shorter route may still be infeasible.
        let Some(reduced_cost) = self.eval(from, &reduced) else {
            return Some(false);
        };
        for to in 0..self.routes.len() {
            let base: &[usize] = if to == from { &reduced } else { &self.routes[to] };
            let base = base.to_vec();
            for ins in 0..=base.len() {
                if to == from && ins == pos {
                    continue;
                }
                if self.out_of_budget() {
                    return None;
                }
                let mut cand = base.clone();
                cand.insert(ins, node);
                let Some(cost) = self.eval(to, &cand) else { continue };
                let delta = if to == from {
                    cost - self.costs[from]
                } else {
                    reduced_cost + cost - self.costs[from] - self.costs[to]
                };
                if delta < 0 {
                    if to == from {
                        self.routes[from] = cand;
                        self.costs[from] = cost;
                    } else {
                        self.routes[from] = reduced;
                        self.costs[from] = reduced_cost;
                        self.routes[to] = cand;
                        self.costs[to] = cost;
                    }
                    return Some(true);
                }
            }
        }
        Some(false)
    }

    fn two_opt(&mut self, r: usize) -> Option<bool> {
        let len = self.routes[r].len();
        for i in 0..len {
            for j in i + 1..len {
                if self.out_of_budget() {
                    return None;
                }
                let mut cand = self.routes[r].clone();
                cand[i..=j].reverse();
                let Some(cost) = self.eval(r, &cand) else { continue };
                if cost < self.costs[r] {
                    self.routes[r] = cand;
                    self.costs[r] = cost;
                    return Some(true);
                }
            }
        }
        Some(false)
    }
}

/// Improves a valid solution; the result is valid and its time objective is
/// never larger than the input's.
pub fn improve(task: &VrptwTask, solution: &RouteSolution, limits: ImproveLimits, rng_seed: u64) -> (RouteSolution, ImproveStats) {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let order: Vec<usize> = solution
        .routes
        .iter()
        .map(|r| task.vehicles.iter().position(|v| v.id == r.vehicle_id).expect("route vehicle in task"))
        .collect();
    let caps = order.iter().map(|&i| task.vehicles[i].capacity).collect();
    let routes: Vec<Vec<usize>> = solution.routes.iter().map(|r| r.customers().to_vec()).collect();
    let costs = solution.routes.iter().map(|r| r.return_time()).collect();
    let mut s = Search {
        task,
        caps,
        routes,
        costs,
        limits,
        stats: ImproveStats::default(),
    };

    'search: loop {
        s.stats.passes += 1;
        let mut moves: Vec<(usize, usize)> = s
            .routes
            .iter()
            .enumerate()
            .flat_map(|(r, cs)| (0..cs.len()).map(move |p| (r, p)))
            .collect();
        moves.shuffle(&mut rng);
        for (r, p) in moves {
            match s.relocate_from(r, p) {
                None => break 'search,
                Some(true) => {
                    s.stats.moves_applied += 1;
                    continue 'search;
                }
                Some(false) => {}
            }
        }
        let mut route_order: Vec<usize> = (0..s.routes.len()).collect();
        route_order.shuffle(&mut rng);
        for r in route_order {
            match s.two_opt(r) {
                None => break 'search,
                Some(true) => {
                    s.stats.moves_applied += 1;
                    continue 'search;
                }
                Some(false) => {}
            }
        }
        // every applied move restarts the pass, so reaching here is a local optimum
        break;
    }

    let routes = solution
        .routes
        .iter()
        .zip(&s.routes)
        .map(|(orig, cs)| {
            let mut path = Vec::with_capacity(cs.len() + 2);
            path.push(0);
            path.extend_from_slice(cs);
            path.push(task.return_node());
            schedule_route(task, &orig.vehicle_id, &path)
                .ok()
                .and_then(|o| o.feasible())
                .expect("local search keeps routes feasible")
        })
        .collect();
    (RouteSolution::from_routes(task, routes), s.stats)
}
