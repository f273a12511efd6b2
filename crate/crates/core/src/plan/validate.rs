//! Sequential plan validation by forward simulation of the delivery lifecycle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::domain::{ActionName, ObjectType, Plan, PlanAction, DEPOT};

/// Why an action cannot be applied. The service reuses these codes when it
/// rejects operator dispatch commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PreconditionCode {
    BadArity,
    UnknownObject,
    WrongType,
    OrderNotPending,
    DeliveryAlreadyDispatched,
    DeliveryAlreadyAssigned,
    DeliveryNotAssigned,
    DeliveryNotDispatched,
    VehicleNotReady,
    BatchNotReady,
    VehicleNotDispatched,
    WrongOrigin,
    VehicleNotAtLocation,
    OrderNotLoaded,
    WrongDestination,
    VehicleNotAtDepot,
    OrdersUndelivered,
    GoalUnmet,
}

impl fmt::Display for PreconditionCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok();
        f.write_str(s.as_ref().and_then(|v| v.as_str()).unwrap_or("UNKNOWN"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderStatus {
    Pending,
    Grouped,
    Loaded,
    Delivered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeliveryStatus {
    Open,
    Assigned,
    Dispatched,
    Completed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryState {
    pub status: DeliveryStatus,
    pub vehicle: Option<String>,
    pub orders: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VehicleState {
    pub at: String,
    /// Delivery currently on the road with this vehicle.
    pub on_trip: Option<String>,
}

/// Lifecycle state of every object in a plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldState {
    pub orders: BTreeMap<String, OrderStatus>,
    pub deliveries: BTreeMap<String, DeliveryState>,
    pub vehicles: BTreeMap<String, VehicleState>,
}

impl WorldState {
    pub fn initial(plan: &Plan) -> Self {
        let mut s = WorldState {
            orders: BTreeMap::new(),
            deliveries: BTreeMap::new(),
            vehicles: BTreeMap::new(),
        };
        for (name, ty) in &plan.objects {
            match ty {
                ObjectType::Order => {
                    s.orders.insert(name.clone(), OrderStatus::Pending);
                }
                ObjectType::Delivery => {
                    s.deliveries.insert(
                        name.clone(),
                        DeliveryState {
                            status: DeliveryStatus::Open,
                            vehicle: None,
                            orders: BTreeSet::new(),
                        },
                    );
                }
                ObjectType::Vehicle => {
                    s.vehicles.insert(
                        name.clone(),
                        VehicleState {
                            at: DEPOT.to_string(),
                            on_trip: None,
                        },
                    );
                }
                ObjectType::Location => {}
            }
        }
        s
    }

    /// Checks the preconditions of `action` and applies its effects.
    pub fn apply(&mut self, plan: &Plan, action: &PlanAction) -> Result<(), (PreconditionCode, String)> {
        use PreconditionCode as P;
        let sig = action.name.signature();
        if action.args.len() != sig.len() {
            return Err((P::BadArity, format!("{} takes {} arguments", action.name, sig.len())));
        }
        for (arg, &ty) in action.args.iter().zip(sig) {
            match plan.objects.get(arg) {
                None => return Err((P::UnknownObject, format!("`{arg}` is not declared"))),
                Some(&t) if t != ty => {
                    return Err((P::WrongType, format!("`{arg}` is a {}, expected {}", t.as_str(), ty.as_str())))
                }
                _ => {}
            }
        }
        let a = &action.args;
        let fail = |code, msg: String| Err((code, msg));
        match action.name {
            ActionName::AssignOrder => {
                let (o, d) = (&a[0], &a[1]);
                if self.orders[o] != OrderStatus::Pending {
                    return fail(P::OrderNotPending, format!("order {o} is {:?}", self.orders[o]));
                }
                let del = &self.deliveries[d];
                if matches!(del.status, DeliveryStatus::Dispatched | DeliveryStatus::Completed) {
                    return fail(P::DeliveryAlreadyDispatched, format!("delivery {d} already left"));
                }
                self.orders.insert(o.clone(), OrderStatus::Grouped);
                self.deliveries.get_mut(d).unwrap().orders.insert(o.clone());
            }
            ActionName::AssignDelivery => {
                let (d, v) = (&a[0], &a[1]);
                if self.deliveries[d].status != DeliveryStatus::Open {
                    return fail(P::DeliveryAlreadyAssigned, format!("delivery {d} is not open"));
                }
                let veh = &self.vehicles[v];
                if veh.on_trip.is_some() || veh.at != DEPOT {
                    return fail(P::VehicleNotReady, format!("vehicle {v} is not waiting at the depot"));
                }
                let del = self.deliveries.get_mut(d).unwrap();
                del.status = DeliveryStatus::Assigned;
                del.vehicle = Some(v.clone());
            }
            ActionName::DispatchDelivery => {
                let (d, v) = (&a[0], &a[1]);
                let del = &self.deliveries[d];
                if del.status != DeliveryStatus::Assigned || del.vehicle.as_deref() != Some(v.as_str()) {
                    return fail(P::DeliveryNotAssigned, format!("delivery {d} is not assigned to {v}"));
                }
                if del.orders.is_empty() || del.orders.iter().any(|o| self.orders[o] != OrderStatus::Grouped) {
                    return fail(P::BatchNotReady, format!("delivery {d} has no complete batch"));
                }
                let veh = &self.vehicles[v];
                if veh.on_trip.is_some() || veh.at != DEPOT {
                    return fail(P::VehicleNotReady, format!("vehicle {v} is not waiting at the depot"));
                }
                for o in del.orders.clone() {
                    self.orders.insert(o, OrderStatus::Loaded);
                }
                self.deliveries.get_mut(d).unwrap().status = DeliveryStatus::Dispatched;
                self.vehicles.get_mut(v).unwrap().on_trip = Some(d.clone());
            }
            ActionName::Drive => {
                let (v, from, to) = (&a[0], &a[1], &a[2]);
                let veh = self.vehicles.get_mut(v).unwrap();
                if veh.on_trip.is_none() {
                    return fail(P::VehicleNotDispatched, format!("vehicle {v} has no dispatched delivery"));
                }
                if &veh.at != from {
                    return fail(P::WrongOrigin, format!("vehicle {v} is at {}, not {from}", veh.at));
                }
                veh.at = to.clone();
            }
            ActionName::DeliverOrder => {
                let (o, v, l) = (&a[0], &a[1], &a[2]);
                let veh = &self.vehicles[v];
                if &veh.at != l {
                    return fail(P::VehicleNotAtLocation, format!("vehicle {v} is at {}, not {l}", veh.at));
                }
                let on_board = veh
                    .on_trip
                    .as_ref()
                    .is_some_and(|d| self.deliveries[d].orders.contains(o))
                    && self.orders[o] == OrderStatus::Loaded;
                if !on_board {
                    return fail(P::OrderNotLoaded, format!("order {o} is not loaded on {v}"));
                }
                if plan.destinations.get(o) != Some(l) {
                    return fail(P::WrongDestination, format!("order {o} is not bound for {l}"));
                }
                self.orders.insert(o.clone(), OrderStatus::Delivered);
            }
            ActionName::FinishDelivery => {
                let (d, v) = (&a[0], &a[1]);
                let veh = &self.vehicles[v];
                if veh.on_trip.as_deref() != Some(d.as_str()) {
                    return fail(P::DeliveryNotDispatched, format!("delivery {d} is not on the road with {v}"));
                }
                if veh.at != DEPOT {
                    return fail(P::VehicleNotAtDepot, format!("vehicle {v} is at {}", veh.at));
                }
                if self.deliveries[d].orders.iter().any(|o| self.orders[o] != OrderStatus::Delivered) {
                    return fail(P::OrdersUndelivered, format!("delivery {d} still has orders on board"));
                }
                self.deliveries.get_mut(d).unwrap().status = DeliveryStatus::Completed;
                self.vehicles.get_mut(v).unwrap().on_trip = None;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum PlanVerdict {
    Valid,
    Invalid {
        /// Index of the failing action; `plan.len()` when the goal is unmet.
        index: usize,
        code: PreconditionCode,
        message: String,
    },
}

impl PlanVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, PlanVerdict::Valid)
    }
}

/// Valid iff every action applies in sequence, every order ends delivered and
/// every dispatched delivery is finished.
pub fn validate_plan(plan: &Plan) -> PlanVerdict {
    let mut state = WorldState::initial(plan);
    for (index, action) in plan.actions.iter().enumerate() {
        if let Err((code, message)) = state.apply(plan, action) {
            return PlanVerdict::Invalid { index, code, message };
        }
    }
    let goal_miss = state
        .orders
        .iter()
        .find(|(_, s)| **s != OrderStatus::Delivered)
        .map(|(o, s)| format!("order {o} ends {s:?}"))
        .or_else(|| {
            state
                .deliveries
                .iter()
                .find(|(_, d)| d.status != DeliveryStatus::Completed)
                .map(|(d, s)| format!("delivery {d} ends {:?}", s.status))
        });
    match goal_miss {
        None => PlanVerdict::Valid,
        Some(message) => PlanVerdict::Invalid {
            index: plan.actions.len(),
            code: PreconditionCode::GoalUnmet,
            message,
        },
    }
}
