//! VRPTW data model.
//!
//! Node `0` is the starting depot, nodes `1..=k` are customers and node `k + 1`
//! is the returning depot. Times are integer seconds, distances integer meters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Seconds = i64;
pub type Meters = i64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vehicle {
    pub id: String,
    /// Load units; `None` means unlimited.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<u64>,
}

impl Vehicle {
    pub fn unlimited(id: impl Into<String>) -> Self {
        Vehicle {
            id: id.into(),
            capacity: None,
        }
    }

    pub fn with_capacity(id: impl Into<String>, capacity: u64) -> Self {
        Vehicle {
            id: id.into(),
            capacity: Some(capacity),
        }
    }

    pub fn fits(&self, load: u64) -> bool {
        self.capacity.is_none_or(|q| load <= q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Customer {
    pub id: String,
    pub node: usize,
    #[serde(default)]
    pub demand: u64,
    pub window_open: Seconds,
    pub window_close: Seconds,
}

/// Complete directed graph over `node_count` nodes, stored as row-major matrices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TravelGraph {
    pub node_count: usize,
    /// Driving time including service time at the destination.
    pub time: Vec<Seconds>,
    pub dist: Vec<Meters>,
}

impl TravelGraph {
    /// All-zero graph.
    pub fn zeros(node_count: usize) -> Self {
        TravelGraph {
            node_count,
            time: vec![0; node_count * node_count],
            dist: vec![0; node_count * node_count],
        }
    }

    /// Builds a graph by evaluating `leg(i, j) -> (seconds, meters)` for every ordered pair.
    pub fn from_fn(node_count: usize, mut leg: impl FnMut(usize, usize) -> (Seconds, Meters)) -> Self {
        let mut g = TravelGraph::zeros(node_count);
        for i in 0..node_count {
            for j in 0..node_count {
                if i != j {
                    let (t, d) = leg(i, j);
                    g.set(i, j, t, d);
                }
            }
        }
        g
    }

    #[inline]
    pub fn time(&self, from: usize, to: usize) -> Seconds {
        self.time[from * self.node_count + to]
    }

    #[inline]
    pub fn dist(&self, from: usize, to: usize) -> Meters {
        self.dist[from * self.node_count + to]
    }

    pub fn set(&mut self, from: usize, to: usize, time: Seconds, dist: Meters) {
        let idx = from * self.node_count + to;
        self.time[idx] = time;
        self.dist[idx] = dist;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VrptwTask {
    pub vehicles: Vec<Vehicle>,
    pub customers: Vec<Customer>,
    #[serde(flatten)]
    pub graph: TravelGraph,
    pub horizon_open: Seconds,
    pub horizon_close: Seconds,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TaskError {
    #[error("graph has {found} nodes, expected {expected} (customers + 2)")]
    NodeCount { expected: usize, found: usize },
    #[error("matrix `{which}` has {found} entries, expected {expected}")]
    MatrixSize {
        which: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("customer `{id}` sits on node {node}, expected node {expected}")]
    CustomerNode { id: String, node: usize, expected: usize },
    #[error("customer `{id}` has window [{open}, {close}] with open > close")]
    EmptyWindow { id: String, open: Seconds, close: Seconds },
    #[error("negative {which} on edge ({from}, {to})")]
    NegativeEdge {
        which: &'static str,
        from: usize,
        to: usize,
    },
    #[error("non-zero {which} on the diagonal at node {node}")]
    NonZeroDiagonal { which: &'static str, node: usize },
    #[error("vehicle `{0}` has zero capacity")]
    ZeroCapacity(String),
    #[error("duplicate vehicle id `{0}`")]
    DuplicateVehicle(String),
    #[error("horizon [{open}, {close}] is empty")]
    EmptyHorizon { open: Seconds, close: Seconds },
}

impl VrptwTask {
    /// Number of customers (`k`).
    pub fn customer_count(&self) -> usize {
        self.customers.len()
    }

    /// Index of the returning depot (`k + 1`).
    pub fn return_node(&self) -> usize {
        self.customers.len() + 1
    }

    /// Customer located at `node`, if `node` is a customer node.
    pub fn customer_at(&self, node: usize) -> Option<&Customer> {
        if node == 0 || node > self.customers.len() {
            None
        } else {
            self.customers.get(node - 1)
        }
    }

    pub fn vehicle(&self, id: &str) -> Option<&Vehicle> {
        self.vehicles.iter().find(|v| v.id == id)
    }

    /// Structural checks. Windows with `open > close` are reported only when
    /// `strict_windows` is set: the dispatch loop builds such windows for
    /// overdue orders and relies on them being unsatisfiable.
    pub fn check(&self, strict_windows: bool) -> Result<(), TaskError> {
        let n = self.customers.len() + 2;
        if self.graph.node_count != n {
            return Err(TaskError::NodeCount {
                expected: n,
                found: self.graph.node_count,
            });
        }
        for (which, len) in [("time", self.graph.time.len()), ("dist", self.graph.dist.len())] {
            if len != n * n {
                return Err(TaskError::MatrixSize {
                    which,
                    expected: n * n,
                    found: len,
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                for (which, v) in [("time", self.graph.time(i, j)), ("dist", self.graph.dist(i, j))] {
                    if v < 0 {
                        return Err(TaskError::NegativeEdge { which, from: i, to: j });
                    }
                    if i == j && v != 0 {
                        return Err(TaskError::NonZeroDiagonal { which, node: i });
                    }
                }
            }
        }
        for (idx, c) in self.customers.iter().enumerate() {
            if c.node != idx + 1 {
                return Err(TaskError::CustomerNode {
                    id: c.id.clone(),
                    node: c.node,
                    expected: idx + 1,
                });
            }
            if strict_windows && c.window_open > c.window_close {
                return Err(TaskError::EmptyWindow {
                    id: c.id.clone(),
                    open: c.window_open,
                    close: c.window_close,
                });
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for v in &self.vehicles {
            if v.capacity == Some(0) {
                return Err(TaskError::ZeroCapacity(v.id.clone()));
            }
            if !seen.insert(v.id.as_str()) {
                return Err(TaskError::DuplicateVehicle(v.id.clone()));
            }
        }
        if self.horizon_open > self.horizon_close {
            return Err(TaskError::EmptyHorizon {
                open: self.horizon_open,
                close: self.horizon_close,
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("task serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub vehicle_id: String,
    /// `⟨0, customers…, k+1⟩`.
    pub path: Vec<usize>,
    /// Delivery time for each entry of `path`, index-aligned.
    pub delivery_times: Vec<Seconds>,
}

impl Route {
    pub fn empty(vehicle_id: impl Into<String>, task: &VrptwTask) -> Self {
        let ret = task.return_node();
        Route {
            vehicle_id: vehicle_id.into(),
            path: vec![0, ret],
            delivery_times: vec![task.horizon_open, task.horizon_open + task.graph.time(0, ret)],
        }
    }

    /// Customer nodes visited, in order.
    pub fn customers(&self) -> &[usize] {
        if self.path.len() < 2 {
            &[]
        } else {
            &self.path[1..self.path.len() - 1]
        }
    }

    pub fn is_empty(&self) -> bool {
        self.customers().is_empty()
    }

    /// Time at which the vehicle is back at the depot.
    pub fn return_time(&self) -> Seconds {
        self.delivery_times.last().copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteSolution {
    pub routes: Vec<Route>,
    pub objective_distance: Meters,
    pub objective_time: Seconds,
}

impl RouteSolution {
    /// Wraps routes and fills in both objective values.
    pub fn from_routes(task: &VrptwTask, routes: Vec<Route>) -> Self {
        let mut s = RouteSolution {
            routes,
            objective_distance: 0,
            objective_time: 0,
        };
        s.objective_distance = objective(&s, task, ObjectiveKind::Distance);
        s.objective_time = objective(&s, task, ObjectiveKind::Time);
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Distance,
    Time,
}

/// Total edge distance or total depot-return time over all routes.
pub fn objective(solution: &RouteSolution, task: &VrptwTask, kind: ObjectiveKind) -> i64 {
    match kind {
        ObjectiveKind::Distance => solution
            .routes
            .iter()
            .map(|r| r.path.windows(2).map(|w| task.graph.dist(w[0], w[1])).sum::<i64>())
            .sum(),
        ObjectiveKind::Time => solution.routes.iter().map(Route::return_time).sum(),
    }
}
