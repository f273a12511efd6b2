use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Location;
use crate::routing::{RouteSolution, Seconds, Vehicle};

/// An order as the dispatcher sees it. Timestamps are seconds on the same
/// clock as `DispatchState::clock`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Order {
    pub id: String,
    pub placed_at: Seconds,
    pub ready_at: Seconds,
    pub deadline: Seconds,
    pub location: Location,
    pub demand: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchState {
    pub depot: Location,
    pub clock: Seconds,
    /// The customer set `C`, keyed by order id.
    pub active_customers: BTreeMap<String, Order>,
    /// The vehicle set `V`, keyed by vehicle id.
    pub available_vehicles: BTreeMap<String, Vehicle>,
    pub last_solution: Option<RouteSolution>,
    pub applied_delay: Seconds,
}

impl DispatchState {
    pub fn new(depot: Location, clock: Seconds) -> Self {
        DispatchState {
            depot,
            clock,
            active_customers: BTreeMap::new(),
            available_vehicles: BTreeMap::new(),
            last_solution: None,
            applied_delay: 0,
        }
    }
}

/// A vehicle that left the restaurant together with the orders it carries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DispatchedVehicle {
    pub vehicle_id: String,
    pub orders: Vec<String>,
}

/// Everything that happened since the previous episode.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TickEvents {
    pub clock: Seconds,
    pub new_orders: Vec<Order>,
    pub dispatched: Vec<DispatchedVehicle>,
    pub returned: Vec<Vehicle>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IngestError {
    #[error("dispatched vehicle `{0}` is not available")]
    UnknownVehicle(String),
    #[error("vehicle `{vehicle}` carries order `{order}` which is not active")]
    UnknownOrder { vehicle: String, order: String },
    #[error("vehicle `{0}` is both dispatched and returned")]
    DispatchedAndReturned(String),
    #[error("returned vehicle `{0}` is already available")]
    DuplicateVehicle(String),
    #[error("new order `{0}` is already active")]
    DuplicateOrder(String),
    #[error("clock moved backwards from {from} to {to}")]
    ClockWentBack { from: Seconds, to: Seconds },
}

/// `V ← (V ∖ V_disp) ∪ V_new` and `C ← (C ∖ ⋃ C_v) ∪ C_new`. Returns a new
/// state; the input is left untouched.
pub fn ingest_events(state: &DispatchState, events: &TickEvents) -> Result<DispatchState, IngestError> {
    if events.clock < state.clock {
        return Err(IngestError::ClockWentBack {
            from: state.clock,
            to: events.clock,
        });
    }
    let returned: BTreeSet<&str> = events.returned.iter().map(|v| v.id.as_str()).collect();
    let mut next = state.clone();
    next.clock = events.clock;
    for d in &events.dispatched {
        if returned.contains(d.vehicle_id.as_str()) {
            return Err(IngestError::DispatchedAndReturned(d.vehicle_id.clone()));
        }
        if next.available_vehicles.remove(&d.vehicle_id).is_none() {
            return Err(IngestError::UnknownVehicle(d.vehicle_id.clone()));
        }
        for o in &d.orders {
            if next.active_customers.remove(o).is_none() {
                return Err(IngestError::UnknownOrder {
                    vehicle: d.vehicle_id.clone(),
                    order: o.clone(),
                });
            }
        }
    }
    for v in &events.returned {
        if next.available_vehicles.insert(v.id.clone(), v.clone()).is_some() {
            return Err(IngestError::DuplicateVehicle(v.id.clone()));
        }
    }
    for o in &events.new_orders {
        if next.active_customers.insert(o.id.clone(), o.clone()).is_some() {
            return Err(IngestError::DuplicateOrder(o.id.clone()));
        }
    }
    Ok(next)
}
