//! Minute-tick discrete-event engine.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;
use std::time::Duration;

use chrono::{Duration as ChronoDuration, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use super::log::{EntityKind, LogEvent, DECISION, EPISODE_FAILED, LEG, UNDELIVERABLE};
use crate::data::{CalibratedProvider, Dataset, DatasetError, Location, TravelTimeProvider};
use crate::dispatch::{
    decide, ingest_events, ConfigError, DispatchState, DispatchedVehicle, LoopConfig, LoopDecision, Order,
    TickEvents,
};
use crate::plan::PreconditionCode;
use crate::routing::{Seconds, Vehicle};
use crate::solver::SolverConfig;

pub const TICK_SECONDS: i64 = 60;

/// Tick at or after `s` seconds.
pub fn tick_of(s: Seconds) -> i64 {
    s.div_euclid(TICK_SECONDS) + i64::from(s.rem_euclid(TICK_SECONDS) != 0)
}

/// Simulated leg length in ticks: provider seconds times the factor, rounded up.
pub fn leg_ticks(estimate_seconds: Seconds, factor: f64) -> i64 {
    (estimate_seconds as f64 * factor / TICK_SECONDS as f64).ceil() as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Baseline,
    Optimized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub calibration_factor: f64,
    pub rng_seed: u64,
    pub loop_config: LoopConfig,
    pub solver: SolverConfig,
    /// Ticks between a dispatch command and departure.
    pub loading_ticks: i64,
    /// After a failed episode, retry once with `δ` multiplied by this.
    pub fallback_delta_factor: i64,
    /// Dispatch complete batches automatically. Off when staff dispatch.
    pub auto_dispatch: bool,
}

/// Solver evaluation cap used by [`RunConfig::deterministic`].
pub const DETERMINISTIC_EVALUATIONS: u64 = 4_000;
/// Attempts that always fit in the loop budget when each one uses its full
/// solver timeout.
pub fn attempts_within_budget(config: &LoopConfig) -> u32 {
    let per = config.solver_timeout.as_micros().max(1);
    (config.loop_budget.as_micros() / per).max(1) as u32
}

impl RunConfig {
    /// Episodes bounded by counts instead of wall time: identical inputs give
    /// identical logs on any machine.
    pub fn deterministic(mode: Mode, calibration_factor: f64, rng_seed: u64) -> Self {
        RunConfig {
            mode,
            calibration_factor,
            rng_seed,
            loop_config: LoopConfig {
                max_attempts: Some(attempts_within_budget(&LoopConfig::default())),
                enforce_wall_clock: false,
                ..LoopConfig::default()
            },
            solver: SolverConfig {
                time_budget: Duration::from_secs(3600),
                max_evaluations: Some(DETERMINISTIC_EVALUATIONS),
                rng_seed,
                ..SolverConfig::default()
            },
            loading_ticks: 2,
            fallback_delta_factor: 10,
            auto_dispatch: true,
        }
    }

    /// Episodes bounded by the solver timeout and loop budget, as deployed.
    pub fn realtime(mode: Mode, calibration_factor: f64, rng_seed: u64) -> Self {
        RunConfig {
            loop_config: LoopConfig::default(),
            solver: SolverConfig {
                rng_seed,
                ..SolverConfig::default()
            },
            ..Self::deterministic(mode, calibration_factor, rng_seed)
        }
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("loop config: {0}")]
    Config(#[from] ConfigError),
    #[error("calibration factor must be positive, got {0}")]
    Factor(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderStatus {
    Unseen,
    Received,
    Cooked,
    Assigned,
    Dispatched,
    EnRoute,
    Delivered,
    Undeliverable,
}

impl OrderStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            OrderStatus::Unseen => "unseen",
            OrderStatus::Received => "received",
            OrderStatus::Cooked => "cooked",
            OrderStatus::Assigned => "assigned",
            OrderStatus::Dispatched => "dispatched",
            OrderStatus::EnRoute => "en-route",
            OrderStatus::Delivered => "delivered",
            OrderStatus::Undeliverable => UNDELIVERABLE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VehicleStatus {
    Ready,
    Loading,
    Delivering,
    Returning,
}

impl VehicleStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            VehicleStatus::Ready => "ready",
            VehicleStatus::Loading => "loading",
            VehicleStatus::Delivering => "delivering",
            VehicleStatus::Returning => "returning",
        }
    }
}

/// Per-episode measurements. Kept out of the run log because wall times
/// differ between runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeStat {
    pub tick: i64,
    pub active_orders: usize,
    pub vehicles: usize,
    pub attempts: u32,
    pub applied_delay: Option<Seconds>,
    pub failed: bool,
    /// This episode was the relaxed retry after a failure.
    pub relaxed: bool,
    pub wall_micros: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub episodes: Vec<EpisodeStat>,
}

impl RunStats {
    /// Wall-time percentile over episodes, in milliseconds.
    pub fn wall_percentile_ms(&self, q: f64) -> Option<f64> {
        let mut w: Vec<u64> = self.episodes.iter().map(|e| e.wall_micros).collect();
        if w.is_empty() {
            return None;
        }
        w.sort_unstable();
        let idx = ((q * w.len() as f64).ceil() as usize).clamp(1, w.len()) - 1;
        Some(w[idx] as f64 / 1000.0)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub log: Vec<LogEvent>,
    pub stats: RunStats,
    pub failed_days: Vec<NaiveDate>,
}

/// A batch the auto-dispatch rule may send out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchCandidate {
    pub planned_vehicle: String,
    pub orders: Vec<String>,
    pub all_cooked: bool,
    pub earliest_deadline: Seconds,
}

/// Complete batches in deadline order, one per ready vehicle. The planned
/// vehicle is used when it is ready, otherwise the lowest-id ready vehicle.
/// Returns (batch index, vehicle id) pairs.
pub fn auto_dispatch_check(batches: &[BatchCandidate], ready_vehicles: &BTreeSet<String>) -> Vec<(usize, String)> {
    let mut order: Vec<usize> = (0..batches.len()).filter(|&i| batches[i].all_cooked).collect();
    order.sort_by_key(|&i| (batches[i].earliest_deadline, i));
    let mut free = ready_vehicles.clone();
    let mut out = Vec::new();
    for i in order {
        let v = if free.contains(&batches[i].planned_vehicle) {
            batches[i].planned_vehicle.clone()
        } else if let Some(v) = free.iter().next() {
            v.clone()
        } else {
            break;
        };
        free.remove(&v);
        out.push((i, v));
    }
    out
}

/// Operator request to send a planned delivery with a vehicle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DispatchCommand {
    pub vehicle_id: String,
    pub delivery_id: String,
    #[serde(default)]
    pub issued_by: String,
    #[serde(default)]
    pub issued_at: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
#[error("{code}: {message}")]
pub struct Rejection {
    pub code: PreconditionCode,
    pub message: String,
}

/// Lifecycle status of every order and vehicle that has appeared so far.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateView {
    pub orders: BTreeMap<String, String>,
    pub vehicles: BTreeMap<String, String>,
}

impl StateView {
    /// Folds a log prefix into statuses: the last lifecycle transition wins.
    /// Vehicles start ready.
    pub fn from_log(events: &[LogEvent], vehicles: &[String]) -> Self {
        let mut v = StateView::default();
        for id in vehicles {
            v.vehicles.insert(id.clone(), VehicleStatus::Ready.as_str().to_string());
        }
        for e in events {
            match e.entity_kind {
                EntityKind::Order => {
                    v.orders.insert(e.entity_id.clone(), e.transition.clone());
                }
                EntityKind::Vehicle if e.transition != LEG => {
                    v.vehicles.insert(e.entity_id.clone(), e.transition.clone());
                }
                _ => {}
            }
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Event {
    Received(usize),
    Eligible(usize),
    Cooked(usize),
    Release(usize),
    Depart(usize),
    Arrive(usize),
    VehicleEligible(usize),
    Home(usize),
}

struct SimOrder {
    id: String,
    status: OrderStatus,
    location: Location,
    deadline: Seconds,
}

struct Trip {
    delivery: String,
    orders: Vec<usize>,
    next: usize,
}

struct SimVehicle {
    id: String,
    status: VehicleStatus,
    /// `None` is the restaurant.
    at: Option<usize>,
    trip: Option<Trip>,
}

pub struct Simulation {
    dataset: Arc<Dataset>,
    order_lookup: HashMap<String, usize>,
    config: RunConfig,
    provider: Box<dyn TravelTimeProvider>,
    epoch: NaiveDateTime,
    orders: Vec<SimOrder>,
    vehicles: Vec<SimVehicle>,
    queue: BTreeMap<(i64, u64), Event>,
    seq: u64,
    now: i64,
    log: Vec<LogEvent>,
    dstate: DispatchState,
    pending: TickEvents,
    dirty: bool,
    decision: Option<LoopDecision>,
    episodes: u64,
    stats: RunStats,
    failed_days: BTreeSet<NaiveDate>,
    /// Baseline: historical trips (vehicle index, order indices).
    hist: Vec<(usize, Vec<usize>)>,
    released: Vec<usize>,
}

impl Simulation {
    pub fn new(dataset: Arc<Dataset>, config: RunConfig) -> Result<Self, SimError> {
        dataset.check()?;
        if !(config.calibration_factor > 0.0 && config.calibration_factor.is_finite()) {
            return Err(SimError::Factor(config.calibration_factor));
        }
        if config.mode == Mode::Optimized {
            config.loop_config.validate()?;
        }
        let provider = dataset.provider()?;
        let epoch = dataset.epoch();
        let depot = dataset.restaurant.location();
        let orders = dataset
            .orders
            .iter()
            .map(|o| SimOrder {
                id: o.order_id.clone(),
                status: OrderStatus::Unseen,
                location: o.location(),
                deadline: dataset.seconds(epoch, o.deadline),
            })
            .collect();
        let vehicles: Vec<SimVehicle> = dataset
            .vehicles
            .iter()
            .map(|v| SimVehicle {
                id: v.id.clone(),
                status: VehicleStatus::Ready,
                at: None,
                trip: None,
            })
            .collect();
        let order_lookup = dataset.orders.iter().enumerate().map(|(i, o)| (o.order_id.clone(), i)).collect();
        let mut sim = Simulation {
            order_lookup,
            provider,
            epoch,
            orders,
            queue: BTreeMap::new(),
            seq: 0,
            now: 0,
            log: Vec::new(),
            dstate: DispatchState::new(depot, 0),
            pending: TickEvents::default(),
            dirty: false,
            decision: None,
            episodes: 0,
            stats: RunStats::default(),
            failed_days: BTreeSet::new(),
            hist: Vec::new(),
            released: Vec::new(),
            vehicles,
            config,
            dataset: Arc::clone(&dataset),
        };
        // vehicles start ready at the restaurant; that state is not logged
        for v in &dataset.vehicles {
            sim.pending.returned.push(v.to_vehicle());
        }
        let look = sim.config.loop_config.lookahead;
        for i in 0..dataset.orders.len() {
            let o = dataset.dispatch_order(i, epoch);
            let received = tick_of(o.placed_at);
            sim.schedule(received, Event::Received(i));
            if sim.config.mode == Mode::Optimized {
                sim.schedule(tick_of(o.ready_at - look).max(received), Event::Eligible(i));
            }
            sim.schedule(tick_of(o.ready_at), Event::Cooked(i));
        }
        if sim.config.mode == Mode::Baseline {
            sim.load_history();
        }
        Ok(sim)
    }

    fn load_history(&mut self) {
        let index: BTreeMap<&str, usize> =
            self.vehicles.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        let mut trips: Vec<(i64, usize, Vec<usize>)> = Vec::new();
        for trip in self.dataset.hist_trips() {
            let first = &self.dataset.orders[trip.stops[0]];
            let departure = self.dataset.seconds(self.epoch, first.hist_delivered_at) - first.hist_leg_seconds;
            let release = (tick_of(departure) - self.config.loading_ticks).max(0);
            trips.push((release, index[trip.vehicle.as_str()], trip.stops));
        }
        trips.sort_by_key(|(release, v, _)| (*release, *v));
        for (k, (release, v, stops)) in trips.into_iter().enumerate() {
            self.hist.push((v, stops));
            self.schedule(release, Event::Release(k));
        }
    }

    fn schedule(&mut self, tick: i64, ev: Event) {
        self.seq += 1;
        self.queue.insert((tick, self.seq), ev);
    }

    fn emit(&mut self, kind: EntityKind, id: &str, transition: &str, detail: serde_json::Value) {
        self.log.push(LogEvent::new(self.now, kind, id, transition, detail));
    }

    fn order_id(&self, i: usize) -> &str {
        &self.orders[i].id
    }

    fn set_order(&mut self, i: usize, status: OrderStatus, detail: serde_json::Value) {
        self.orders[i].status = status;
        let id = self.orders[i].id.clone();
        self.emit(EntityKind::Order, &id, status.as_str(), detail);
    }

    fn set_vehicle(&mut self, v: usize, status: VehicleStatus, detail: serde_json::Value) {
        self.vehicles[v].status = status;
        let id = self.vehicles[v].id.clone();
        self.emit(EntityKind::Vehicle, &id, status.as_str(), detail);
    }

    pub fn now(&self) -> i64 {
        self.now
    }

    pub fn clock(&self) -> NaiveDateTime {
        self.epoch + ChronoDuration::seconds(self.now * TICK_SECONDS)
    }

    pub fn epoch(&self) -> NaiveDateTime {
        self.epoch
    }

    pub fn log(&self) -> &[LogEvent] {
        &self.log
    }

    pub fn decision(&self) -> Option<&LoopDecision> {
        self.decision.as_ref()
    }

    pub fn stats(&self) -> &RunStats {
        &self.stats
    }

    pub fn next_event_tick(&self) -> Option<i64> {
        self.queue.keys().next().map(|k| k.0)
    }

    pub fn is_finished(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn state_view(&self) -> StateView {
        let mut v = StateView::default();
        for (i, o) in self.orders.iter().enumerate() {
            if o.status != OrderStatus::Unseen {
                v.orders.insert(self.order_id(i).to_string(), o.status.as_str().to_string());
            }
        }
        for veh in &self.vehicles {
            v.vehicles.insert(veh.id.clone(), veh.status.as_str().to_string());
        }
        v
    }

    /// Processes every event of the next busy tick, then runs the dispatcher.
    /// Returns false when nothing is left to happen.
    pub fn step(&mut self) -> bool {
        let Some(tick) = self.next_event_tick() else {
            return false;
        };
        self.now = tick;
        while let Some(entry) = self.queue.first_entry() {
            if entry.key().0 != tick {
                break;
            }
            let ev = entry.remove();
            self.handle(ev);
        }
        self.after_events();
        true
    }

    /// Processes every event up to and including `tick`, then stops the clock there.
    pub fn advance_to(&mut self, tick: i64) {
        while self.next_event_tick().is_some_and(|t| t <= tick) {
            self.step();
        }
        self.now = self.now.max(tick);
    }

    pub fn run_to_end(mut self) -> RunOutput {
        while self.step() {}
        self.finish()
    }

    /// Logs every order that never arrived as undeliverable and returns the run.
    pub fn finish(mut self) -> RunOutput {
        for i in 0..self.orders.len() {
            if !matches!(self.orders[i].status, OrderStatus::Delivered | OrderStatus::Undeliverable) {
                let reason = match self.orders[i].status {
                    OrderStatus::Unseen | OrderStatus::Received | OrderStatus::Cooked => "never dispatched",
                    _ => "run ended during delivery",
                };
                self.set_order(i, OrderStatus::Undeliverable, json!({ "reason": reason }));
            }
        }
        RunOutput {
            log: self.log,
            stats: self.stats,
            failed_days: self.failed_days.into_iter().collect(),
        }
    }

    fn handle(&mut self, ev: Event) {
        match ev {
            Event::Received(i) => self.set_order(i, OrderStatus::Received, json!({})),
            Event::Cooked(i) => self.set_order(i, OrderStatus::Cooked, json!({})),
            Event::Eligible(i) => {
                let o: Order = self.dataset.dispatch_order(i, self.epoch);
                self.pending.new_orders.push(o);
                self.dirty = true;
            }
            Event::Release(k) => self.released.push(k),
            Event::Depart(v) => {
                let orders = self.vehicles[v].trip.as_ref().expect("departing vehicle has a trip").orders.clone();
                self.set_vehicle(v, VehicleStatus::Delivering, json!({}));
                for i in orders {
                    self.set_order(i, OrderStatus::Dispatched, json!({ "vehicle": self.vehicles[v].id }));
                }
                self.next_leg(v);
            }
            Event::Arrive(v) => {
                let trip = self.vehicles[v].trip.as_mut().expect("arriving vehicle has a trip");
                let i = trip.orders[trip.next];
                trip.next += 1;
                self.vehicles[v].at = Some(i);
                let late = self.now * TICK_SECONDS - self.orders[i].deadline;
                self.set_order(i, OrderStatus::Delivered, json!({ "vehicle": self.vehicles[v].id, "late_seconds": late }));
                self.next_leg(v);
            }
            Event::VehicleEligible(v) => {
                self.pending.returned.push(self.dataset.vehicles[v].to_vehicle());
                self.dirty = true;
            }
            Event::Home(v) => {
                let veh = &mut self.vehicles[v];
                veh.at = None;
                veh.trip = None;
                self.set_vehicle(v, VehicleStatus::Ready, json!({}));
            }
        }
    }

    /// Drives to the next stop, or back to the restaurant after the last one.
    fn next_leg(&mut self, v: usize) {
        let trip = self.vehicles[v].trip.as_ref().expect("vehicle on a trip");
        let target = trip.orders.get(trip.next).copied();
        let from = self.vehicles[v].at;
        let loc = |n: Option<usize>| n.map_or(self.dataset.restaurant.location(), |i| self.orders[i].location);
        let name = |n: Option<usize>| n.map_or("depot".to_string(), |i| self.order_id(i).to_string());
        let est = self.provider.leg(loc(from), loc(target)).expect("dataset provider covers dataset locations");
        let ticks = leg_ticks(est.seconds, self.config.calibration_factor);
        let detail = json!({
            "from": name(from),
            "to": name(target),
            "seconds": ticks * TICK_SECONDS,
            "meters": est.meters,
        });
        match target {
            Some(i) => {
                self.set_order(i, OrderStatus::EnRoute, json!({ "vehicle": self.vehicles[v].id }));
                let id = self.vehicles[v].id.clone();
                self.emit(EntityKind::Vehicle, &id, LEG, detail);
                self.schedule(self.now + ticks, Event::Arrive(v));
            }
            None => {
                self.set_vehicle(v, VehicleStatus::Returning, json!({}));
                let id = self.vehicles[v].id.clone();
                self.emit(EntityKind::Vehicle, &id, LEG, detail);
                let home = self.now + ticks;
                if self.config.mode == Mode::Optimized {
                    let look = self.config.loop_config.lookahead / TICK_SECONDS;
                    self.schedule((home - look).max(self.now), Event::VehicleEligible(v));
                }
                self.schedule(home, Event::Home(v));
            }
        }
    }

    fn start_trip(&mut self, v: usize, orders: Vec<usize>, delivery: &str) {
        let ids: Vec<String> = orders.iter().map(|&i| self.orders[i].id.clone()).collect();
        let vid = self.vehicles[v].id.clone();
        for &i in &orders {
            self.set_order(i, OrderStatus::Assigned, json!({ "vehicle": vid, "delivery": delivery }));
        }
        self.set_vehicle(v, VehicleStatus::Loading, json!({ "delivery": delivery, "orders": ids }));
        if self.config.mode == Mode::Optimized {
            self.pending.dispatched.push(DispatchedVehicle {
                vehicle_id: vid,
                orders: ids,
            });
            self.dirty = true;
        }
        self.vehicles[v].trip = Some(Trip { delivery: delivery.to_string(), orders, next: 0 });
        self.schedule(self.now + self.config.loading_ticks, Event::Depart(v));
    }

    fn after_events(&mut self) {
        match self.config.mode {
            Mode::Baseline => self.release_history(),
            Mode::Optimized => {
                if self.dirty {
                    self.episode();
                }
                if self.config.auto_dispatch {
                    for _ in 0..=self.vehicles.len() {
                        if !self.auto_dispatch() {
                            break;
                        }
                        self.episode();
                    }
                }
            }
        }
    }

    fn release_history(&mut self) {
        let mut k = 0;
        while k < self.released.len() {
            let (v, stops) = &self.hist[self.released[k]];
            let v = *v;
            let ready = self.vehicles[v].status == VehicleStatus::Ready
                && stops.iter().all(|&i| self.orders[i].status == OrderStatus::Cooked);
            // a vehicle's trips go out in release order
            let earlier_same_vehicle = self.released[..k].iter().any(|&j| self.hist[j].0 == v);
            if ready && !earlier_same_vehicle {
                let stops = stops.clone();
                let trip = self.released.remove(k);
                self.start_trip(v, stops, &format!("h{}", trip + 1));
            } else {
                k += 1;
            }
        }
    }

    fn vehicle_index(&self, id: &str) -> Option<usize> {
        self.vehicles.iter().position(|v| v.id == id)
    }

    fn order_index(&self, id: &str) -> Option<usize> {
        self.order_lookup.get(id).copied()
    }

    fn auto_dispatch(&mut self) -> bool {
        let Some(decision) = &self.decision else {
            return false;
        };
        let batches = decision.batches();
        let mut candidates = Vec::new();
        let mut members = Vec::new();
        for b in &batches {
            let idx: Option<Vec<usize>> = b
                .orders
                .iter()
                .map(|o| self.dstate.active_customers.get(o).map(|_| o))
                .map(|o| o.and_then(|o| self.order_index(o)))
                .collect();
            let Some(idx) = idx else { continue };
            candidates.push(BatchCandidate {
                planned_vehicle: b.vehicle_id.clone(),
                orders: b.orders.clone(),
                all_cooked: idx.iter().all(|&i| self.orders[i].status == OrderStatus::Cooked),
                earliest_deadline: idx.iter().map(|&i| self.orders[i].deadline).min().unwrap_or(Seconds::MAX),
            });
            members.push((b.delivery_id.clone(), idx));
        }
        let ready: BTreeSet<String> = self
            .vehicles
            .iter()
            .filter(|v| v.status == VehicleStatus::Ready && self.dstate.available_vehicles.contains_key(&v.id))
            .map(|v| v.id.clone())
            .collect();
        let picks = auto_dispatch_check(&candidates, &ready);
        for (b, vid) in &picks {
            let v = self.vehicle_index(vid).expect("ready vehicle exists");
            let (delivery, idx) = members[*b].clone();
            self.start_trip(v, idx, &delivery);
        }
        !picks.is_empty()
    }

    /// One decision episode over everything that changed since the last one.
    fn episode(&mut self) {
        let mut events = std::mem::take(&mut self.pending);
        events.clock = self.now * TICK_SECONDS;
        self.dstate = ingest_events(&self.dstate, &events).expect("simulator keeps dispatcher state consistent");
        self.dirty = false;
        if self.dstate.active_customers.is_empty() {
            self.decision = None;
            return;
        }
        if self.dstate.available_vehicles.is_empty() {
            return;
        }
        self.episodes += 1;
        let solver = SolverConfig {
            rng_seed: self.config.rng_seed.wrapping_add(self.episodes),
            ..self.config.solver.clone()
        };
        let mut loop_cfg = self.config.loop_config.clone();
        let mut relaxed = false;
        loop {
            let travel = CalibratedProvider {
                inner: &self.provider,
                factor: self.config.calibration_factor,
            };
            let result = decide(&self.dstate, &travel, &solver, &loop_cfg);
            let stat = |attempts, applied_delay, failed, wall: Duration| EpisodeStat {
                tick: self.now,
                active_orders: self.dstate.active_customers.len(),
                vehicles: self.dstate.available_vehicles.len(),
                attempts,
                applied_delay,
                failed,
                relaxed,
                wall_micros: wall.as_micros() as u64,
            };
            match result {
                Ok(d) => {
                    self.stats.episodes.push(stat(d.attempts, Some(d.applied_delay), false, d.wall));
                    let batches: Vec<_> = d.batches().into_iter().map(|b| json!([b.vehicle_id, b.orders])).collect();
                    let detail = json!({
                        "applied_delay": d.applied_delay,
                        "attempts": d.attempts,
                        "batches": batches,
                        "relaxed": relaxed,
                    });
                    let day = self.clock().date().to_string();
                    self.emit(EntityKind::Episode, &day, DECISION, detail);
                    self.dstate.last_solution = Some(d.solution.clone());
                    self.dstate.applied_delay = d.applied_delay;
                    self.decision = Some(d);
                    return;
                }
                Err(f) => {
                    self.stats.episodes.push(stat(f.attempts, None, true, f.wall));
                    let day = self.clock().date();
                    self.failed_days.insert(day);
                    let detail = json!({
                        "reason": f.reason,
                        "attempts": f.attempts,
                        "last_delay": f.last_delay,
                        "relaxed": relaxed,
                    });
                    self.emit(EntityKind::Episode, &day.to_string(), EPISODE_FAILED, detail);
                    if relaxed || self.config.fallback_delta_factor <= 1 {
                        return;
                    }
                    relaxed = true;
                    loop_cfg.delta *= self.config.fallback_delta_factor;
                }
            }
        }
    }

    /// Staff dispatch of a planned delivery. Preconditions mirror the plan
    /// validator's codes.
    pub fn dispatch(&mut self, cmd: &DispatchCommand) -> Result<(), Rejection> {
        let reject = |code, message: String| Err(Rejection { code, message });
        // a repeated command names the trip the vehicle is already on
        let on_trip = self.vehicle_index(&cmd.vehicle_id).and_then(|v| self.vehicles[v].trip.as_ref());
        if on_trip.is_some_and(|t| t.delivery == cmd.delivery_id) {
            return reject(
                PreconditionCode::DeliveryAlreadyDispatched,
                format!("delivery `{}` has already left with `{}`", cmd.delivery_id, cmd.vehicle_id),
            );
        }
        let Some(batch) = self
            .decision
            .as_ref()
            .and_then(|d| d.batches().into_iter().find(|b| b.delivery_id == cmd.delivery_id))
        else {
            return reject(
                PreconditionCode::UnknownObject,
                format!("no delivery `{}` in the current plan", cmd.delivery_id),
            );
        };
        let Some(v) = self.vehicle_index(&cmd.vehicle_id) else {
            return reject(PreconditionCode::UnknownObject, format!("no vehicle `{}`", cmd.vehicle_id));
        };
        let idx: Vec<usize> = batch.orders.iter().filter_map(|o| self.order_index(o)).collect();
        if idx.iter().any(|&i| self.orders[i].status >= OrderStatus::Assigned)
            || batch.orders.iter().any(|o| !self.dstate.active_customers.contains_key(o))
        {
            return reject(
                PreconditionCode::DeliveryAlreadyDispatched,
                format!("delivery `{}` has already been dispatched", cmd.delivery_id),
            );
        }
        if self.vehicles[v].status != VehicleStatus::Ready || !self.dstate.available_vehicles.contains_key(&cmd.vehicle_id)
        {
            return reject(
                PreconditionCode::VehicleNotReady,
                format!("vehicle `{}` is {}", cmd.vehicle_id, self.vehicles[v].status.as_str()),
            );
        }
        if let Some(&i) = idx.iter().find(|&&i| self.orders[i].status != OrderStatus::Cooked) {
            return reject(
                PreconditionCode::BatchNotReady,
                format!("order `{}` is not cooked yet", self.order_id(i)),
            );
        }
        self.start_trip(v, idx, &batch.delivery_id);
        self.episode();
        Ok(())
    }

    /// Ingests pending changes and runs an episode if anything changed.
    pub fn refresh(&mut self) {
        if self.dirty {
            self.episode();
        }
    }

    pub fn dispatch_state(&self) -> &DispatchState {
        &self.dstate
    }

    pub fn vehicle_ids(&self) -> Vec<String> {
        self.vehicles.iter().map(|v| v.id.clone()).collect()
    }

    pub fn unlimited_vehicles(&self) -> Vec<Vehicle> {
        self.dataset.vehicles.iter().map(|v| v.to_vehicle()).collect()
    }
}

/// Runs a dataset to completion.
pub fn run(dataset: &Dataset, config: RunConfig) -> Result<RunOutput, SimError> {
    Ok(Simulation::new(Arc::new(dataset.clone()), config)?.run_to_end())
}
