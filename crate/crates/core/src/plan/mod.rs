//! Six-action delivery planning domain: translation from routing solutions,
//! sequential validation, and PDDL text.

mod domain;
mod pddl;
mod translate;
mod validate;

pub use domain::{destination_name, object_name, ActionName, ObjectType, Plan, PlanAction, DEPOT};
pub use pddl::{emit_pddl, emit_plan_text, parse_plan_text, PlanParseError};
pub use translate::{translate, TranslateError};
pub use validate::{
    validate_plan, DeliveryState, DeliveryStatus, OrderStatus, PlanVerdict, PreconditionCode, VehicleState,
    WorldState,
};
