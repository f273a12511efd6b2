use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::state::DispatchState;
use crate::data::{Location, ProviderError, TravelTimeProvider};
use crate::plan::{translate, Plan, TranslateError};
use crate::routing::{Customer, RouteSolution, Seconds, TravelGraph, VrptwTask};
use crate::solver::RoutingSolver;

/// Latest allowed depot return, relative to the episode clock.
pub const HORIZON_SECONDS: Seconds = 24 * 3600;

/// Per-attempt budget used when wall-clock limits are switched off.
const UNBOUNDED: Duration = Duration::from_secs(3600);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopConfig {
    /// Deadline extension step `δ` in seconds.
    pub delta: Seconds,
    #[serde(with = "crate::solver::millis")]
    pub solver_timeout: Duration,
    #[serde(with = "crate::solver::millis")]
    pub loop_budget: Duration,
    /// Orders ready and vehicles back within this many seconds are planned for.
    pub lookahead: Seconds,
    /// Hard cap on solver invocations per episode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_attempts: Option<u32>,
    /// When false, the loop and solver ignore the wall clock and stop only on
    /// `max_attempts` and the solver's evaluation cap, so results do not
    /// depend on machine speed.
    #[serde(default = "yes")]
    pub enforce_wall_clock: bool,
}

fn yes() -> bool {
    true
}

impl Default for LoopConfig {
    fn default() -> Self {
        LoopConfig {
            delta: 120,
            solver_timeout: Duration::from_millis(50),
            loop_budget: Duration::from_millis(1000),
            lookahead: 300,
            max_attempts: None,
            enforce_wall_clock: true,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("delta must be positive")]
    Delta,
    #[error("loop budget must be at least the solver timeout")]
    Budget,
    #[error("max_attempts is required when the wall clock is not enforced")]
    Unbounded,
}

impl LoopConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.delta <= 0 {
            return Err(ConfigError::Delta);
        }
        if self.loop_budget < self.solver_timeout || self.solver_timeout.is_zero() {
            return Err(ConfigError::Budget);
        }
        if !self.enforce_wall_clock && self.max_attempts.is_none() {
            return Err(ConfigError::Unbounded);
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("no available vehicles")]
    NoVehicles,
    #[error("travel estimate failed: {0}")]
    Provider(#[from] ProviderError),
}

/// Builds the VRPTW task for the current state. Customer `i` (node `i`) is the
/// `i`-th active order by id; its window is `[0, deadline − clock + delay]`.
pub fn build_task(state: &DispatchState, travel: &dyn TravelTimeProvider, delay: Seconds) -> Result<VrptwTask, BuildError> {
    if state.available_vehicles.is_empty() {
        return Err(BuildError::NoVehicles);
    }
    let orders: Vec<_> = state.active_customers.values().collect();
    let k = orders.len();
    let mut locs: Vec<Location> = Vec::with_capacity(k + 1);
    locs.push(state.depot);
    locs.extend(orders.iter().map(|o| o.location));
    // node k+1 is the depot again
    let site = |node: usize| if node == k + 1 { 0 } else { node };
    let mut legs = vec![(0, 0); (k + 1) * (k + 1)];
    for i in 0..=k {
        for j in 0..=k {
            if i != j {
                let l = travel.leg(locs[i], locs[j])?;
                legs[i * (k + 1) + j] = (l.seconds.max(0), l.meters.max(0));
            }
        }
    }
    let graph = TravelGraph::from_fn(k + 2, |i, j| {
        if i == j {
            (0, 0)
        } else {
            legs[site(i) * (k + 1) + site(j)]
        }
    });
    let customers = orders
        .iter()
        .enumerate()
        .map(|(i, o)| Customer {
            id: o.id.clone(),
            node: i + 1,
            demand: o.demand,
            window_open: 0,
            window_close: o.deadline - state.clock + delay,
        })
        .collect();
    Ok(VrptwTask {
        vehicles: state.available_vehicles.values().cloned().collect(),
        customers,
        graph,
        horizon_open: 0,
        horizon_close: HORIZON_SECONDS,
    })
}

/// A group of orders carried by one vehicle trip, with absolute ETAs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Batch {
    /// Plan object name, `d1..dn`.
    pub delivery_id: String,
    pub vehicle_id: String,
    pub orders: Vec<String>,
    pub etas: Vec<Seconds>,
    pub return_at: Seconds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopDecision {
    pub timestamp: Seconds,
    pub applied_delay: Seconds,
    pub attempts: u32,
    pub task: VrptwTask,
    pub solution: RouteSolution,
    pub plan: Plan,
    #[serde(skip)]
    pub wall: Duration,
}

impl LoopDecision {
    /// Non-empty routes in task vehicle order, numbered like the plan's deliveries.
    pub fn batches(&self) -> Vec<Batch> {
        let mut out = Vec::new();
        for v in &self.task.vehicles {
            let Some(route) = self.solution.routes.iter().find(|r| r.vehicle_id == v.id) else {
                continue;
            };
            if route.is_empty() {
                continue;
            }
            let inner = 1..route.path.len() - 1;
            out.push(Batch {
                delivery_id: format!("d{}", out.len() + 1),
                vehicle_id: v.id.clone(),
                orders: route.path[inner.clone()]
                    .iter()
                    .map(|&n| self.task.customers[n - 1].id.clone())
                    .collect(),
                etas: route.delivery_times[inner].iter().map(|t| self.timestamp + t).collect(),
                return_at: self.timestamp + route.return_time(),
            });
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailReason {
    NoVehicles,
    BudgetExhausted,
    AttemptsExhausted,
    TaskConstruction,
    Translation,
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[error("episode failed ({reason:?}) after {attempts} attempts, last delay {last_delay} s")]
pub struct EpisodeFailed {
    pub reason: FailReason,
    pub attempts: u32,
    pub last_delay: Seconds,
    pub message: String,
    #[serde(skip)]
    pub wall: Duration,
}

/// One decision episode: solve with all windows extended by `delay`, starting
/// at zero and growing by `δ` after every unsolved attempt. The state is only
/// read.
pub fn decide<S: RoutingSolver + ?Sized>(
    state: &DispatchState,
    travel: &dyn TravelTimeProvider,
    solver: &S,
    config: &LoopConfig,
) -> Result<LoopDecision, EpisodeFailed> {
    let start = Instant::now();
    let fail = |reason, attempts, last_delay, message: String| EpisodeFailed {
        reason,
        attempts,
        last_delay,
        message,
        wall: start.elapsed(),
    };
    let base = match build_task(state, travel, 0) {
        Ok(t) => t,
        Err(BuildError::NoVehicles) => {
            return Err(fail(FailReason::NoVehicles, 0, 0, "no available vehicles".into()));
        }
        Err(e) => return Err(fail(FailReason::TaskConstruction, 0, 0, e.to_string())),
    };
    let mut task = base.clone();
    let mut attempts = 0u32;
    let mut delay = 0;
    loop {
        if config.max_attempts.is_some_and(|m| attempts >= m) {
            return Err(fail(
                FailReason::AttemptsExhausted,
                attempts,
                delay - config.delta,
                "attempt cap reached".into(),
            ));
        }
        let budget = if config.enforce_wall_clock {
            let spent = start.elapsed();
            if spent >= config.loop_budget {
                return Err(fail(
                    FailReason::BudgetExhausted,
                    attempts,
                    delay - config.delta,
                    format!("loop budget of {} ms spent", config.loop_budget.as_millis()),
                ));
            }
            (config.loop_budget - spent).min(config.solver_timeout)
        } else {
            UNBOUNDED
        };
        for (c, b) in task.customers.iter_mut().zip(&base.customers) {
            c.window_close = b.window_close + delay;
        }
        attempts += 1;
        let outcome = solver.solve_within(&task, budget);
        let solved = outcome.is_solved();
        if let Some(solution) = outcome.solution.filter(|_| solved) {
            let plan = translate(&solution, &task.customers, &task.vehicles)
                .map_err(|e: TranslateError| fail(FailReason::Translation, attempts, delay, e.to_string()))?;
            return Ok(LoopDecision {
                timestamp: state.clock,
                applied_delay: delay,
                attempts,
                task,
                solution,
                plan,
                wall: start.elapsed(),
            });
        }
        delay += config.delta;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Leg, ProviderError};
    use crate::dispatch::Order;
    use crate::routing::Vehicle;
    use crate::solver::{ExactSolver, SolverConfig};

    /// Every leg between distinct points takes `secs`.
    struct Flat(Seconds);

    impl TravelTimeProvider for Flat {
        fn leg(&self, _: Location, _: Location) -> Result<Leg, ProviderError> {
            Ok(Leg { seconds: self.0, meters: self.0 * 10 })
        }
    }

    fn state(deadlines: &[Seconds], vehicles: usize) -> DispatchState {
        let mut s = DispatchState::new(Location::new(0.0, 0.0), 1000);
        for (i, &d) in deadlines.iter().enumerate() {
            let id = format!("o{}", i + 1);
            s.active_customers.insert(
                id.clone(),
                Order {
                    id,
                    placed_at: 0,
                    ready_at: 0,
                    deadline: d,
                    location: Location::new(0.0, 0.001 * (i + 1) as f64),
                    demand: 1,
                },
            );
        }
        for i in 0..vehicles {
            let id = format!("v{}", i + 1);
            s.available_vehicles.insert(id.clone(), Vehicle::unlimited(id));
        }
        s
    }

    #[test]
    fn windows_are_relative_to_clock() {
        let s = state(&[1000 + 1200], 1);
        let t = build_task(&s, &Flat(60), 0).unwrap();
        assert_eq!((t.customers[0].window_open, t.customers[0].window_close), (0, 1200));
        let shifted = build_task(&s, &Flat(60), 120).unwrap();
        assert_eq!(shifted.customers[0].window_close, 1320);
        assert_eq!(t.graph.time(0, 2), 0);
        assert_eq!(t.graph.time(1, 2), 60);
    }

    #[test]
    fn feasible_at_once() {
        let s = state(&[5000, 5000], 2);
        let d = decide(&s, &Flat(60), &SolverConfig::default(), &LoopConfig::default()).unwrap();
        assert_eq!((d.applied_delay, d.attempts), (0, 1));
        assert_eq!(d.plan.len(), d.batches().iter().map(|b| 3 * b.orders.len() + 4).sum::<usize>());
    }

    #[test]
    fn needs_two_steps() {
        // one leg takes 600 s but the deadline is 400 s away: needs delay ≥ 200
        let s = state(&[1400], 1);
        let d = decide(&s, &Flat(600), &ExactSolver, &LoopConfig::default()).unwrap();
        assert_eq!((d.applied_delay, d.attempts), (240, 3));
        assert_eq!(d.batches()[0].etas, vec![1600]);
    }

    #[test]
    fn no_vehicles_fails() {
        let s = state(&[5000], 0);
        let e = decide(&s, &Flat(60), &SolverConfig::default(), &LoopConfig::default()).unwrap_err();
        assert_eq!(e.reason, FailReason::NoVehicles);
    }

    #[test]
    fn attempt_cap() {
        let s = state(&[1000], 1);
        let cfg = LoopConfig { max_attempts: Some(3), enforce_wall_clock: false, ..Default::default() };
        let e = decide(&s, &Flat(600), &SolverConfig::default(), &cfg).unwrap_err();
        assert_eq!((e.reason, e.attempts, e.last_delay), (FailReason::AttemptsExhausted, 3, 240));
    }
}
