//! Exhaustive solver for desk-scale instances, used as a test oracle.

use std::collections::HashMap;
use std::time::Instant;

use super::{SolveOutcome, SolveStats, SolveStatus, SolverError};
use crate::routing::{return_time, schedule_route, RouteSolution, Seconds, VrptwTask};

pub const MAX_EXACT_CUSTOMERS: usize = 8;
pub const MAX_EXACT_VEHICLES: usize = 3;

/// Enumerates every customer-to-vehicle assignment and, per route, every
/// visiting order; returns the feasible solution with the smallest time
/// objective (first found on ties).
pub fn solve_exact(task: &VrptwTask) -> Result<SolveOutcome, SolverError> {
    let k = task.customer_count();
    let m = task.vehicles.len();
    if k > MAX_EXACT_CUSTOMERS || m > MAX_EXACT_VEHICLES {
        return Err(SolverError::InstanceTooLarge { customers: k, vehicles: m });
    }
    let start = Instant::now();

    // Best visiting order for a (capacity, customer subset) pair, by brute force.
    let mut memo: HashMap<(Option<u64>, u32), Option<(Seconds, Vec<usize>)>> = HashMap::new();
    let mut best_perm = |cap: Option<u64>, mask: u32| -> Option<(Seconds, Vec<usize>)> {
        memo.entry((cap, mask))
            .or_insert_with(|| {
                let mut nodes: Vec<usize> = (1..=k).filter(|n| mask & (1 << (n - 1)) != 0).collect();
                let mut best: Option<(Seconds, Vec<usize>)> = None;
                for_each_permutation(&mut nodes, &mut |perm| {
                    if let Some(t) = return_time(task, cap, perm) {
                        if best.as_ref().is_none_or(|(b, _)| t < *b) {
                            best = Some((t, perm.to_vec()));
                        }
                    }
                });
                best
            })
            .clone()
    };

    let mut best: Option<(Seconds, Vec<Vec<usize>>)> = None;
    let mut assignment = vec![0usize; k];
    let total = m.checked_pow(k as u32).unwrap_or(0);
    let mut explored = 0u64;
    for code in 0..total {
        let mut c = code;
        for slot in assignment.iter_mut() {
            *slot = c % m;
            c /= m;
        }
        let mut masks = vec![0u32; m];
        for (i, &v) in assignment.iter().enumerate() {
            masks[v] |= 1 << i;
        }
        let mut sum = 0;
        let mut orders = Vec::with_capacity(m);
        let mut feasible = true;
        for (v, &mask) in masks.iter().enumerate() {
            match best_perm(task.vehicles[v].capacity, mask) {
                Some((t, perm)) => {
                    sum += t;
                    orders.push(perm);
                }
                None => {
                    feasible = false;
                    break;
                }
            }
        }
        explored += 1;
        if feasible && best.as_ref().is_none_or(|(b, _)| sum < *b) {
            best = Some((sum, orders));
        }
    }

    let stats = SolveStats {
        nodes_inserted: k,
        improvement_passes: 0,
        evaluations: explored,
    };
    Ok(match best {
        None => SolveOutcome {
            status: SolveStatus::NoSolutionWithinBudget,
            solution: None,
            unrouted: (1..=k).collect(),
            elapsed: start.elapsed(),
            stats,
        },
        Some((_, orders)) => {
            let routes = orders
                .iter()
                .zip(&task.vehicles)
                .map(|(cs, v)| {
                    let mut path = vec![0];
                    path.extend_from_slice(cs);
                    path.push(task.return_node());
                    schedule_route(task, &v.id, &path).ok().and_then(|o| o.feasible()).expect("enumerated route is feasible")
                })
                .collect();
            SolveOutcome {
                status: SolveStatus::Solved,
                solution: Some(RouteSolution::from_routes(task, routes)),
                unrouted: vec![],
                elapsed: start.elapsed(),
                stats,
            }
        }
    })
}

/// Heap's algorithm.
fn for_each_permutation(items: &mut [usize], f: &mut impl FnMut(&[usize])) {
    fn heap(k: usize, items: &mut [usize], f: &mut impl FnMut(&[usize])) {
        if k <= 1 {
            f(items);
            return;
        }
        heap(k - 1, items, f);
        for i in 0..k - 1 {
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
            heap(k - 1, items, f);
        }
    }
    let n = items.len();
    heap(n, items, f);
}
