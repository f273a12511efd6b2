//! Seeded synthetic datasets with a myopic historical dispatcher.

use chrono::{Duration as ChronoDuration, NaiveDate, NaiveDateTime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, OrderRecord, Restaurant, VehicleRecord};
use super::provider::{HaversineProvider, Location, TravelMatrix, TravelTimeProvider};
use crate::routing::Seconds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorSpec {
    pub days: u32,
    pub start_date: NaiveDate,
    /// Mean of the Poisson daily order count.
    pub orders_per_day: f64,
    pub vehicles: u32,
    pub restaurant: Location,
    /// Orders are spread uniformly over a disc of this radius.
    pub radius_m: f64,
    /// Historical leg seconds are provider estimates times this factor.
    pub calibration_factor: f64,
    pub rng_seed: u64,
    /// Kitchen time after placement, uniform in minutes.
    pub ready_minutes: (u32, u32),
    /// Promised delivery after the food is ready, uniform in minutes.
    pub deadline_minutes: (u32, u32),
    pub max_batch: usize,
    pub loading_seconds: Seconds,
    /// Write a full travel matrix (restaurant + every order).
    pub matrix: bool,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            days: 61,
            start_date: NaiveDate::from_ymd_opt(2023, 3, 1).unwrap(),
            orders_per_day: 240.0,
            vehicles: 9,
            restaurant: Location::new(50.0755, 14.4378),
            radius_m: 3500.0,
            calibration_factor: 1.6666,
            rng_seed: 0,
            ready_minutes: (10, 25),
            deadline_minutes: (20, 35),
            max_batch: 3,
            loading_seconds: 120,
            matrix: false,
        }
    }
}

/// Relative order intensity per half hour from 10:00 to 22:00, with lunch
/// and dinner peaks.
const PROFILE: [f64; 24] = [
    1.0, 1.5, 3.0, 4.5, 5.0, 4.5, 3.0, 1.5, 1.0, 1.0, 1.0, 1.0, 1.5, 2.5, 4.0, 5.0, 5.5, 5.0, 4.0, 3.0, 2.0, 1.5,
    1.0, 0.5,
];
const OPEN_HOUR: i64 = 10;

struct Pending {
    id: String,
    placed: NaiveDateTime,
    ready: NaiveDateTime,
    deadline: NaiveDateTime,
    loc: Location,
}

pub fn generate_dataset(spec: &GeneratorSpec) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let provider = HaversineProvider::default();
    let restaurant = Restaurant {
        id: "r1".into(),
        lat: spec.restaurant.lat,
        lon: spec.restaurant.lon,
    };
    let vehicles: Vec<VehicleRecord> = (1..=spec.vehicles)
        .map(|i| VehicleRecord {
            id: format!("v{i}"),
            capacity: None,
        })
        .collect();
    let total_weight: f64 = PROFILE.iter().sum();
    let poisson = Poisson::new(spec.orders_per_day.max(1e-9)).expect("positive rate");
    let mut orders = Vec::new();
    let mut serial = 0usize;
    for day in 0..spec.days {
        let date = spec.start_date + ChronoDuration::days(day as i64);
        let midnight = date.and_hms_opt(0, 0, 0).unwrap();
        let n = poisson.sample(&mut rng) as usize;
        let mut placed: Vec<Seconds> = (0..n)
            .map(|_| {
                let mut x = rng.random::<f64>() * total_weight;
                let mut slot = 0;
                while slot + 1 < PROFILE.len() && x >= PROFILE[slot] {
                    x -= PROFILE[slot];
                    slot += 1;
                }
                OPEN_HOUR * 3600 + slot as i64 * 1800 + rng.random_range(0..1800)
            })
            .collect();
        placed.sort();
        let pending: Vec<Pending> = placed
            .into_iter()
            .map(|p| {
                serial += 1;
                let ready = p + 60 * rng.random_range(spec.ready_minutes.0..=spec.ready_minutes.1) as i64;
                let deadline = ready + 60 * rng.random_range(spec.deadline_minutes.0..=spec.deadline_minutes.1) as i64;
                let r = spec.radius_m * rng.random::<f64>().sqrt();
                let theta = rng.random::<f64>() * std::f64::consts::TAU;
                Pending {
                    id: format!("{serial:06}"),
                    placed: midnight + ChronoDuration::seconds(p),
                    ready: midnight + ChronoDuration::seconds(ready),
                    deadline: midnight + ChronoDuration::seconds(deadline),
                    loc: offset(spec.restaurant, r * theta.cos(), r * theta.sin()),
                }
            })
            .collect();
        orders.extend(myopic_history(spec, &provider, midnight, pending));
    }
    let matrix = spec.matrix.then(|| {
        let mut nodes = vec![spec.restaurant];
        nodes.extend(orders.iter().map(OrderRecord::location));
        TravelMatrix::from_provider(&nodes, &provider).expect("haversine never fails")
    });
    Dataset {
        restaurant,
        vehicles,
        orders,
        matrix,
    }
}

/// Moves `north_m`/`east_m` metres from `origin` on a local flat approximation.
fn offset(origin: Location, north_m: f64, east_m: f64) -> Location {
    let dlat = north_m / 111_195.0;
    let dlon = east_m / (111_195.0 * origin.lat.to_radians().cos());
    let round = |x: f64| (x * 1e6).round() / 1e6;
    Location::new(round(origin.lat + dlat), round(origin.lon + dlon))
}

/// The historical dispatcher: take the oldest waiting order, wait for it and
/// for the first free vehicle, add the next orders in arrival order while they
/// are already cooked (up to `max_batch`), visit them nearest-first.
fn myopic_history(
    spec: &GeneratorSpec,
    provider: &HaversineProvider,
    midnight: NaiveDateTime,
    pending: Vec<Pending>,
) -> Vec<OrderRecord> {
    let secs = |t: NaiveDateTime| (t - midnight).num_seconds();
    let at = |s: Seconds| midnight + ChronoDuration::seconds(s);
    let leg = |a: Location, b: Location| -> Seconds {
        let est = provider.leg(a, b).expect("haversine never fails").seconds;
        (est as f64 * spec.calibration_factor).round() as Seconds
    };
    let mut free_at: Vec<Seconds> = vec![0; spec.vehicles as usize];
    let mut trips: Vec<u32> = vec![0; spec.vehicles as usize];
    let mut out = Vec::with_capacity(pending.len());
    let mut next = 0;
    while next < pending.len() {
        let v = (0..free_at.len()).min_by_key(|&v| (free_at[v], v)).expect("at least one vehicle");
        let t = free_at[v].max(secs(pending[next].ready));
        let mut batch = vec![next];
        while batch.len() < spec.max_batch
            && next + batch.len() < pending.len()
            && secs(pending[next + batch.len()].ready) <= t
        {
            batch.push(next + batch.len());
        }
        next += batch.len();
        trips[v] += 1;
        let mut clock = t + spec.loading_seconds;
        let mut here = spec.restaurant;
        let mut left = batch;
        let mut stop = 0;
        while !left.is_empty() {
            let (pos, _) = left
                .iter()
                .enumerate()
                .map(|(pos, &i)| (pos, provider.leg(here, pending[i].loc).unwrap().seconds))
                .min_by_key(|&(pos, s)| (s, pos))
                .unwrap();
            let i = left.remove(pos);
            let p = &pending[i];
            let drive = leg(here, p.loc);
            clock += drive;
            stop += 1;
            out.push(OrderRecord {
                order_id: p.id.clone(),
                placed_at: p.placed,
                ready_at: p.ready,
                deadline: p.deadline,
                lat: p.loc.lat,
                lon: p.loc.lon,
                demand: 1,
                hist_vehicle: format!("v{}", v + 1),
                hist_trip: trips[v],
                hist_stop_index: stop,
                hist_leg_seconds: drive,
                hist_delivered_at: at(clock),
            });
            here = p.loc;
        }
        free_at[v] = clock + leg(here, spec.restaurant);
    }
    out.sort_by(|a, b| a.order_id.cmp(&b.order_id));
    out
}
