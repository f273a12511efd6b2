//! Discrete-event replay of a dataset, either as it historically happened or
//! driven by the decision loop.

mod audit;
mod calibrate;
mod engine;
pub mod log;

pub use audit::{audit_log, Violation};
pub use calibrate::{calibrate, Calibration, CalibrationError};
pub use engine::{
    attempts_within_budget, auto_dispatch_check, leg_ticks, run, tick_of, BatchCandidate, DispatchCommand, EpisodeStat, Mode, OrderStatus,
    Rejection, RunConfig, RunOutput, RunStats, SimError, Simulation, StateView, VehicleStatus,
    DETERMINISTIC_EVALUATIONS, TICK_SECONDS,
};
pub use log::{read_jsonl, to_jsonl, write_jsonl, EntityKind, LegDetail, LogEvent, ORDER_LIFECYCLE, UNDELIVERABLE};
