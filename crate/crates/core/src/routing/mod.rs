//! Routing core: the VRPTW model, earliest-arrival scheduling, solution
//! validation and objectives.

mod model;
mod schedule;
mod validate;

pub use model::{
    objective, Customer, Meters, ObjectiveKind, Route, RouteSolution, Seconds, TaskError, TravelGraph, Vehicle,
    VrptwTask,
};
pub(crate) use schedule::return_time;
pub use schedule::{schedule_route, Infeasibility, PathError, ScheduleOutcome};
pub use validate::{validate_solution, Verdict, Violation, ViolationCode};
