use std::collections::HashMap;
use std::sync::Arc;

use chrono::{Duration as ChronoDuration, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::data::{compute_kpis, Dataset, KpiReport, SCHEMA_VERSION};
use crate::dispatch::LoopDecision;
use crate::plan::{emit_plan_text, validate_plan, PlanVerdict};
use crate::routing::{Meters, Seconds};
use crate::sim::{DispatchCommand, LogEvent, Mode, Rejection, RunConfig, SimError, Simulation, StateView, TICK_SECONDS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderView {
    pub order_id: String,
    pub status: String,
    pub placed_at: NaiveDateTime,
    pub ready_at: NaiveDateTime,
    pub deadline: NaiveDateTime,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VehicleView {
    pub vehicle_id: String,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateResponse {
    pub schema_version: u32,
    pub restaurant_id: String,
    pub tick: i64,
    pub clock: NaiveDateTime,
    pub restaurant: Point,
    pub orders: Vec<OrderView>,
    pub vehicles: Vec<VehicleView>,
}

impl StateResponse {
    pub fn view(&self) -> StateView {
        StateView {
            orders: self.orders.iter().map(|o| (o.order_id.clone(), o.status.clone())).collect(),
            vehicles: self.vehicles.iter().map(|v| (v.vehicle_id.clone(), v.status.clone())).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopView {
    pub order_id: String,
    pub eta: NaiveDateTime,
    pub deadline: NaiveDateTime,
    /// Positive when the planned arrival is after the deadline.
    pub planned_delay_seconds: Seconds,
    pub cooked: bool,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchView {
    pub delivery_id: String,
    pub vehicle_id: String,
    /// Every order in the batch is cooked.
    pub ready: bool,
    pub vehicle_ready: bool,
    pub stops: Vec<StopView>,
    pub return_at: NaiveDateTime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionView {
    pub sequence: u64,
    pub timestamp: NaiveDateTime,
    pub applied_delay: Seconds,
    pub attempts: u32,
    pub objective_time: Seconds,
    pub objective_distance: Meters,
    pub batches: Vec<BatchView>,
    pub plan: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResponse {
    pub schema_version: u32,
    pub restaurant_id: String,
    /// `ok` or `no-decision`.
    pub status: String,
    pub decision: Option<DecisionView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventsResponse {
    pub schema_version: u32,
    pub restaurant_id: String,
    pub cursor: usize,
    pub next_cursor: usize,
    /// Every vehicle starts `ready`; fold the events over this roster.
    pub vehicles: Vec<String>,
    pub events: Vec<LogEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiResponse {
    pub schema_version: u32,
    pub restaurant_id: String,
    pub tick: i64,
    pub report: KpiReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchAccepted {
    pub schema_version: u32,
    pub status: String,
    pub tick: i64,
    pub vehicle_id: String,
    pub delivery_id: String,
    pub orders: Vec<String>,
}

/// Summary of every decision that passed validation, oldest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub sequence: u64,
    pub timestamp: Seconds,
    pub applied_delay: Seconds,
    pub batches: usize,
}

/// One restaurant driven interactively: staff dispatch, the clock advances
/// on request.
pub struct Session {
    restaurant_id: String,
    dataset: Arc<Dataset>,
    sim: Simulation,
    order_index: HashMap<String, usize>,
    served: Option<(u64, LoopDecision)>,
    history: Vec<PlanRecord>,
    rejected_plans: u64,
}

impl Session {
    /// The config is forced to optimized mode without auto-dispatch.
    pub fn new(restaurant_id: impl Into<String>, dataset: Arc<Dataset>, mut config: RunConfig) -> Result<Self, SimError> {
        config.mode = Mode::Optimized;
        config.auto_dispatch = false;
        let sim = Simulation::new(Arc::clone(&dataset), config)?;
        let order_index = dataset.orders.iter().enumerate().map(|(i, o)| (o.order_id.clone(), i)).collect();
        Ok(Session {
            restaurant_id: restaurant_id.into(),
            dataset,
            sim,
            order_index,
            served: None,
            history: Vec::new(),
            rejected_plans: 0,
        })
    }

    pub fn restaurant_id(&self) -> &str {
        &self.restaurant_id
    }

    pub fn dataset(&self) -> &Arc<Dataset> {
        &self.dataset
    }

    pub fn now(&self) -> i64 {
        self.sim.now()
    }

    pub fn next_event_tick(&self) -> Option<i64> {
        self.sim.next_event_tick()
    }

    pub fn log(&self) -> &[LogEvent] {
        self.sim.log()
    }

    pub fn history(&self) -> &[PlanRecord] {
        &self.history
    }

    /// Translations that failed validation and were never served.
    pub fn rejected_plans(&self) -> u64 {
        self.rejected_plans
    }

    pub fn advance_to(&mut self, tick: i64) {
        self.sim.advance_to(tick);
        self.sync_plan();
    }

    /// Processes the next busy tick, if any.
    pub fn step(&mut self) -> bool {
        let more = self.sim.step();
        self.sync_plan();
        more
    }

    pub fn dispatch(&mut self, cmd: &DispatchCommand) -> Result<DispatchAccepted, Rejection> {
        let orders = self
            .sim
            .decision()
            .and_then(|d| d.batches().into_iter().find(|b| b.delivery_id == cmd.delivery_id))
            .map(|b| b.orders)
            .unwrap_or_default();
        self.sim.dispatch(cmd)?;
        self.sync_plan();
        Ok(DispatchAccepted {
            schema_version: SCHEMA_VERSION,
            status: "accepted".into(),
            tick: self.sim.now(),
            vehicle_id: cmd.vehicle_id.clone(),
            delivery_id: cmd.delivery_id.clone(),
            orders,
        })
    }

    /// Serves the latest decision only once its plan validates.
    fn sync_plan(&mut self) {
        let Some(d) = self.sim.decision() else {
            self.served = None;
            return;
        };
        if self.served.as_ref().is_some_and(|(_, s)| s == d) {
            return;
        }
        match validate_plan(&d.plan) {
            PlanVerdict::Valid => {
                let sequence = self.history.last().map_or(1, |r| r.sequence + 1);
                self.history.push(PlanRecord {
                    sequence,
                    timestamp: d.timestamp,
                    applied_delay: d.applied_delay,
                    batches: d.batches().len(),
                });
                self.served = Some((sequence, d.clone()));
            }
            PlanVerdict::Invalid { .. } => self.rejected_plans += 1,
        }
    }

    fn at(&self, s: Seconds) -> NaiveDateTime {
        self.sim.epoch() + ChronoDuration::seconds(s)
    }

    pub fn state(&self) -> StateResponse {
        let view = self.sim.state_view();
        let mut orders: Vec<OrderView> = view
            .orders
            .iter()
            .map(|(id, status)| {
                let o = &self.dataset.orders[self.order_index[id]];
                OrderView {
                    order_id: id.clone(),
                    status: status.clone(),
                    placed_at: o.placed_at,
                    ready_at: o.ready_at,
                    deadline: o.deadline,
                    lat: o.lat,
                    lon: o.lon,
                }
            })
            .collect();
        orders.sort_by(|a, b| (a.placed_at, &a.order_id).cmp(&(b.placed_at, &b.order_id)));
        StateResponse {
            schema_version: SCHEMA_VERSION,
            restaurant_id: self.restaurant_id.clone(),
            tick: self.sim.now(),
            clock: self.sim.clock(),
            restaurant: Point {
                lat: self.dataset.restaurant.lat,
                lon: self.dataset.restaurant.lon,
            },
            orders,
            vehicles: view
                .vehicles
                .into_iter()
                .map(|(vehicle_id, status)| VehicleView { vehicle_id, status })
                .collect(),
        }
    }

    pub fn plan(&self) -> PlanResponse {
        let decision = self.served.as_ref().map(|(sequence, d)| {
            let view = self.sim.state_view();
            let cooked = |id: &str| view.orders.get(id).is_some_and(|s| s == "cooked");
            let batches = d
                .batches()
                .into_iter()
                .map(|b| {
                    let stops: Vec<StopView> = b
                        .orders
                        .iter()
                        .zip(&b.etas)
                        .map(|(id, &eta)| {
                            let o = &self.dataset.orders[self.order_index[id]];
                            let deadline = self.dataset.seconds(self.sim.epoch(), o.deadline);
                            StopView {
                                order_id: id.clone(),
                                eta: self.at(eta),
                                deadline: o.deadline,
                                planned_delay_seconds: (eta - deadline).max(0),
                                cooked: cooked(id),
                                lat: o.lat,
                                lon: o.lon,
                            }
                        })
                        .collect();
                    BatchView {
                        ready: stops.iter().all(|s| s.cooked),
                        vehicle_ready: view.vehicles.get(&b.vehicle_id).is_some_and(|s| s == "ready"),
                        delivery_id: b.delivery_id,
                        vehicle_id: b.vehicle_id,
                        return_at: self.at(b.return_at),
                        stops,
                    }
                })
                .collect();
            DecisionView {
                sequence: *sequence,
                timestamp: self.at(d.timestamp),
                applied_delay: d.applied_delay,
                attempts: d.attempts,
                objective_time: d.solution.objective_time,
                objective_distance: d.solution.objective_distance,
                batches,
                plan: emit_plan_text(&d.plan.actions),
            }
        });
        PlanResponse {
            schema_version: SCHEMA_VERSION,
            restaurant_id: self.restaurant_id.clone(),
            status: if decision.is_some() { "ok" } else { "no-decision" }.into(),
            decision,
        }
    }

    pub fn events(&self, cursor: usize, limit: usize) -> EventsResponse {
        events_page(&self.restaurant_id, self.sim.vehicle_ids(), self.sim.log(), cursor, limit)
    }

    pub fn kpis(&self) -> KpiResponse {
        KpiResponse {
            schema_version: SCHEMA_VERSION,
            restaurant_id: self.restaurant_id.clone(),
            tick: self.sim.now(),
            report: compute_kpis(self.sim.log(), &self.dataset),
        }
    }

    pub fn vehicle_ids(&self) -> Vec<String> {
        self.sim.vehicle_ids()
    }

    /// Minutes from the start of the run to `t`.
    pub fn tick_at(&self, t: NaiveDateTime) -> i64 {
        (t - self.sim.epoch()).num_seconds().div_euclid(TICK_SECONDS)
    }
}

pub(crate) fn events_page(
    restaurant_id: &str,
    vehicles: Vec<String>,
    log: &[LogEvent],
    cursor: usize,
    limit: usize,
) -> EventsResponse {
    let start = cursor.min(log.len());
    let end = start.saturating_add(limit).min(log.len());
    EventsResponse {
        schema_version: SCHEMA_VERSION,
        restaurant_id: restaurant_id.to_string(),
        cursor: start,
        next_cursor: end,
        vehicles,
        events: log[start..end].to_vec(),
    }
}
