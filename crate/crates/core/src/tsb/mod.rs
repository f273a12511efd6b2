//! The bridge between restaurants and the decision loop: an interactive
//! session per restaurant, its HTTP API, and the command-line front end.

pub mod cli;
mod http;
mod session;

pub use http::{router, spawn_replay, ApiError, App, EventsQuery, SessionHandle, MAX_EVENTS_PAGE};
pub use session::{
    BatchView, DecisionView, DispatchAccepted, EventsResponse, KpiResponse, OrderView, PlanRecord, PlanResponse, Point,
    Session, StateResponse, StopView, VehicleView,
};
