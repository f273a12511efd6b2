//! The decision-making loop: maintain the active order and vehicle sets,
//! build a VRPTW task with deadline windows, and relax the deadlines in steps
//! of `δ` until the solver succeeds or the budget runs out.

mod episode;
mod state;

pub use episode::{
    build_task, decide, Batch, BuildError, ConfigError, EpisodeFailed, FailReason, LoopConfig, LoopDecision,
    HORIZON_SECONDS,
};
pub use state::{ingest_events, DispatchState, DispatchedVehicle, IngestError, Order, TickEvents};
