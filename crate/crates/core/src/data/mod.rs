//! Datasets, travel-time providers, synthetic generation and KPI reports.

mod dataset;
mod generate;
mod kpi;
mod provider;

pub use dataset::{
    Dataset, DatasetError, HistTrip, OrderRecord, Restaurant, VehicleRecord, MATRIX_FILE, ORDERS_FILE, RESTAURANT_FILE,
    VEHICLES_FILE,
};
pub use generate::{generate_dataset, GeneratorSpec};
pub use kpi::{compare, compute_kpis, Comparison, DailyP10d, DayKpis, KpiReport, KpiValues, Ratio, LATE_THRESHOLD, SCHEMA_VERSION};
pub use provider::{
    haversine_m, CalibratedProvider, HaversineProvider, Leg, Location, MatrixProvider, ProviderError,
    TravelMatrix, TravelTimeProvider, DEFAULT_SPEED_MPS, MATRIX_MAGIC,
};
