//! Heuristic VRPTW solving under a wall-clock budget, plus an exhaustive
//! oracle for small instances.

mod construct;
mod exact;
mod improve;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use construct::{construct_cheapest_arc, Construction};
pub use exact::{solve_exact, MAX_EXACT_CUSTOMERS, MAX_EXACT_VEHICLES};
pub use improve::{improve, ImproveLimits, ImproveStats};

use crate::routing::{validate_solution, RouteSolution, VrptwTask};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("instance has {customers} customers and {vehicles} vehicles; exact search allows at most {MAX_EXACT_CUSTOMERS} and {MAX_EXACT_VEHICLES}")]
    InstanceTooLarge { customers: usize, vehicles: usize },
    #[error("time budget must be positive")]
    ZeroBudget,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionStrategy {
    #[default]
    CheapestArc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    #[serde(with = "millis")]
    pub time_budget: Duration,
    #[serde(default)]
    pub construction: ConstructionStrategy,
    pub improvement_enabled: bool,
    pub rng_seed: u64,
    /// Optional cap on local-search route evaluations. When the search ends
    /// on this cap (or at a local optimum) the result does not depend on
    /// machine speed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_evaluations: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            time_budget: Duration::from_millis(50),
            construction: ConstructionStrategy::CheapestArc,
            improvement_enabled: true,
            rng_seed: 0,
            max_evaluations: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.time_budget.is_zero() {
            return Err(SolverError::ZeroBudget);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Solved,
    NoSolutionWithinBudget,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub nodes_inserted: usize,
    pub improvement_passes: u32,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub solution: Option<RouteSolution>,
    /// Customer nodes left out by construction (empty when solved).
    pub unrouted: Vec<usize>,
    #[serde(with = "millis")]
    pub elapsed: Duration,
    pub stats: SolveStats,
}

impl SolveOutcome {
    pub fn is_solved(&self) -> bool {
        self.status == SolveStatus::Solved
    }
}

/// Cheapest-arc construction followed by local search until the budget runs
/// out or a local optimum is reached. Partial constructions are reported as
/// `NoSolutionWithinBudget`.
pub fn solve(task: &VrptwTask, config: &SolverConfig) -> SolveOutcome {
    let start = Instant::now();
    let deadline = start + config.time_budget;
    let construction = match config.construction {
        ConstructionStrategy::CheapestArc => construct_cheapest_arc(task),
    };
    let mut stats = SolveStats {
        nodes_inserted: construction.nodes_inserted,
        ..Default::default()
    };
    let failed = |unrouted: Vec<usize>, stats| SolveOutcome {
        status: SolveStatus::NoSolutionWithinBudget,
        solution: None,
        unrouted,
        elapsed: start.elapsed(),
        stats,
    };
    if !construction.is_complete() || Instant::now() > deadline {
        return failed(construction.unrouted, stats);
    }
    let mut solution = construction.solution;
    if !validate_solution(task, &solution).is_valid() {
        // e.g. an empty route that cannot even return within the horizon
        return failed(vec![], stats);
    }
    if config.improvement_enabled {
        let limits = ImproveLimits {
            deadline: Some(deadline),
            max_evaluations: config.max_evaluations,
        };
        let (improved, istats) = improve(task, &solution, limits, config.rng_seed);
        stats.improvement_passes = istats.passes;
        stats.evaluations = istats.evaluations;
        solution = improved;
    }
    debug_assert!(validate_solution(task, &solution).is_valid());
    SolveOutcome {
        status: SolveStatus::Solved,
        solution: Some(solution),
        unrouted: vec![],
        elapsed: start.elapsed(),
        stats,
    }
}

/// Anything that can turn a task into an outcome within a budget. The
/// dispatch loop is generic over this so tests can plug in the exact solver.
pub trait RoutingSolver {
    fn solve_within(&self, task: &VrptwTask, budget: Duration) -> SolveOutcome;
}

impl RoutingSolver for SolverConfig {
    fn solve_within(&self, task: &VrptwTask, budget: Duration) -> SolveOutcome {
        let cfg = SolverConfig {
            time_budget: budget.min(self.time_budget),
            ..self.clone()
        };
        solve(task, &cfg)
    }
}

/// Exhaustive search; ignores the budget.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactSolver;

impl RoutingSolver for ExactSolver {
    fn solve_within(&self, task: &VrptwTask, _budget: Duration) -> SolveOutcome {
        solve_exact(task).expect("exact solver used within its size guard")
    }
}

pub(crate) mod millis {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}
