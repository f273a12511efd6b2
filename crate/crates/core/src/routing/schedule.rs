//! Earliest-arrival forward scheduling along a fixed path.

use thiserror::Error;

use super::model::{Route, Seconds, VrptwTask};

/// Malformed input, as opposed to a well-formed path that cannot be scheduled.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("path must have at least the two depot nodes")]
    TooShort,
    #[error("path must start at node 0, found {0}")]
    BadStart(usize),
    #[error("path must end at the returning depot {expected}, found {found}")]
    BadEnd { expected: usize, found: usize },
    #[error("node {0} is not a customer node")]
    UnknownNode(usize),
    #[error("node {0} appears more than once")]
    RepeatedNode(usize),
    #[error("unknown vehicle `{0}`")]
    UnknownVehicle(String),
}

/// Where a path stops being schedulable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Infeasibility {
    /// Position in the path.
    pub position: usize,
    pub node: usize,
    /// Earliest achievable time at that node.
    pub earliest: Seconds,
    /// The closing bound that `earliest` exceeds.
    pub limit: Seconds,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleOutcome {
    Feasible(Route),
    Infeasible(Infeasibility),
}

impl ScheduleOutcome {
    pub fn feasible(self) -> Option<Route> {
        match self {
            ScheduleOutcome::Feasible(r) => Some(r),
            ScheduleOutcome::Infeasible(_) => None,
        }
    }
}

/// Departs the depot at `horizon_open` and serves every node as early as its
/// window allows. Capacity is not considered here; see `validate_solution`.
pub fn schedule_route(task: &VrptwTask, vehicle_id: &str, path: &[usize]) -> Result<ScheduleOutcome, PathError> {
    check_path(task, path)?;
    if task.vehicle(vehicle_id).is_none() {
        return Err(PathError::UnknownVehicle(vehicle_id.to_string()));
    }
    let ret = task.return_node();
    let mut times = Vec::with_capacity(path.len());
    let mut t = task.horizon_open;
    times.push(t);
    for (pos, w) in path.windows(2).enumerate() {
        let (prev, node) = (w[0], w[1]);
        let arrival = t + task.graph.time(prev, node);
        let (open, close) = if node == ret {
            (task.horizon_open, task.horizon_close)
        } else {
            let c = &task.customers[node - 1];
            (c.window_open, c.window_close)
        };
        t = arrival.max(open);
        if t > close {
            return Ok(ScheduleOutcome::Infeasible(Infeasibility {
                position: pos + 1,
                node,
                earliest: t,
                limit: close,
            }));
        }
        times.push(t);
    }
    Ok(ScheduleOutcome::Feasible(Route {
        vehicle_id: vehicle_id.to_string(),
        path: path.to_vec(),
        delivery_times: times,
    }))
}

pub(crate) fn check_path(task: &VrptwTask, path: &[usize]) -> Result<(), PathError> {
    let ret = task.return_node();
    if path.len() < 2 {
        return Err(PathError::TooShort);
    }
    if path[0] != 0 {
        return Err(PathError::BadStart(path[0]));
    }
    let last = *path.last().unwrap();
    if last != ret {
        return Err(PathError::BadEnd { expected: ret, found: last });
    }
    let mut seen = vec![false; ret + 1];
    for &node in &path[1..path.len() - 1] {
        if node == 0 || node >= ret {
            return Err(PathError::UnknownNode(node));
        }
        if std::mem::replace(&mut seen[node], true) {
            return Err(PathError::RepeatedNode(node));
        }
    }
    Ok(())
}

/// Return time of the earliest schedule over `customers` (without depot nodes),
/// or `None` if infeasible. Includes the capacity check for `capacity`.
///
/// This is the hot path for the solver; it mirrors `schedule_route` without
/// allocating.
pub(crate) fn return_time(task: &VrptwTask, capacity: Option<u64>, customers: &[usize]) -> Option<Seconds> {
    let ret = task.return_node();
    let mut t = task.horizon_open;
    let mut prev = 0;
    let mut load = 0u64;
    for &node in customers {
        let c = &task.customers[node - 1];
        load += c.demand;
        t = (t + task.graph.time(prev, node)).max(c.window_open);
        if t > c.window_close {
            return None;
        }
        prev = node;
    }
    if let Some(q) = capacity {
        if load > q {
            return None;
        }
    }
    t = (t + task.graph.time(prev, ret)).max(task.horizon_open);
    (t <= task.horizon_close).then_some(t)
}
