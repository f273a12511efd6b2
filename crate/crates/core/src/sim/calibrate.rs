use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Dataset, ProviderError, TravelTimeProvider};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub factor: f64,
    pub legs_used: usize,
    /// Legs whose provider estimate is zero seconds.
    pub legs_skipped: usize,
    pub historical_seconds: i64,
    pub estimated_seconds: i64,
}

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("no historical leg has a positive travel estimate")]
    NoUsableLegs,
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

/// Ratio of historical driving time to provider estimates, summed over every
/// historical leg (restaurant to first stop, then stop to stop).
pub fn calibrate(dataset: &Dataset, provider: &dyn TravelTimeProvider) -> Result<Calibration, CalibrationError> {
    let depot = dataset.restaurant.location();
    let (mut hist, mut est, mut used, mut skipped) = (0i64, 0i64, 0usize, 0usize);
    for trip in dataset.hist_trips() {
        let mut here = depot;
        for &i in &trip.stops {
            let o = &dataset.orders[i];
            let leg = provider.leg(here, o.location())?;
            if leg.seconds > 0 {
                hist += o.hist_leg_seconds;
                est += leg.seconds;
                used += 1;
            } else {
                skipped += 1;
            }
            here = o.location();
        }
    }
    if used == 0 {
        return Err(CalibrationError::NoUsableLegs);
    }
    Ok(Calibration {
        factor: hist as f64 / est as f64,
        legs_used: used,
        legs_skipped: skipped,
        historical_seconds: hist,
        estimated_seconds: est,
    })
}
