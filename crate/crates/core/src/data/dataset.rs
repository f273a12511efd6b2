//! On-disk dataset: `restaurant.json`, `vehicles.json`, `orders.jsonl` and an
//! optional `travel-matrix.bin`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::provider::{HaversineProvider, Location, MatrixProvider, ProviderError, TravelMatrix, TravelTimeProvider};
use crate::dispatch::Order;
use crate::routing::{Seconds, Vehicle};

pub const ORDERS_FILE: &str = "orders.jsonl";
pub const VEHICLES_FILE: &str = "vehicles.json";
pub const RESTAURANT_FILE: &str = "restaurant.json";
pub const MATRIX_FILE: &str = "travel-matrix.bin";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Restaurant {
    pub id: String,
    pub lat: f64,
    pub lon: f64,
}

impl Restaurant {
    pub fn location(&self) -> Location {
        Location::new(self.lat, self.lon)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VehicleRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<u64>,
}

impl VehicleRecord {
    pub fn to_vehicle(&self) -> Vehicle {
        Vehicle {
            id: self.id.clone(),
            capacity: self.capacity,
        }
    }
}

/// One line of `orders.jsonl`. Timestamps are local ISO-8601 without zone.
/// The `hist_*` fields describe how the order was actually delivered: vehicle,
/// trip number (per vehicle and day), 1-based stop position, driving seconds
/// of the leg into this stop, and delivery time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderRecord {
    pub order_id: String,
    pub placed_at: NaiveDateTime,
    pub ready_at: NaiveDateTime,
    pub deadline: NaiveDateTime,
    pub lat: f64,
    pub lon: f64,
    pub demand: u64,
    pub hist_vehicle: String,
    pub hist_trip: u32,
    pub hist_stop_index: u32,
    pub hist_leg_seconds: Seconds,
    pub hist_delivered_at: NaiveDateTime,
}

impl OrderRecord {
    pub fn location(&self) -> Location {
        Location::new(self.lat, self.lon)
    }

    pub fn day(&self) -> NaiveDate {
        self.placed_at.date()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub restaurant: Restaurant,
    pub vehicles: Vec<VehicleRecord>,
    pub orders: Vec<OrderRecord>,
    /// Node 0 is the restaurant, node `i` the `i`-th order in file order.
    pub matrix: Option<TravelMatrix>,
}

/// A historical trip: one vehicle, stops in delivery order (order indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistTrip {
    pub day: NaiveDate,
    pub vehicle: String,
    pub trip: u32,
    pub stops: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{file}: {source}")]
    Io {
        file: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("{file}:{line}: field `{field}`: {message}")]
    Invalid {
        file: String,
        line: usize,
        field: &'static str,
        message: String,
    },
    #[error("{MATRIX_FILE}: {0}")]
    Matrix(#[from] ProviderError),
}

fn invalid(file: &str, line: usize, field: &'static str, message: impl Into<String>) -> DatasetError {
    DatasetError::Invalid {
        file: file.to_string(),
        line,
        field,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, DatasetError> {
    fs::read_to_string(path).map_err(|source| DatasetError::Io {
        file: path.to_path_buf(),
        source,
    })
}

fn parse_json<T: for<'de> Deserialize<'de>>(file: &str, text: &str) -> Result<T, DatasetError> {
    serde_json::from_str(text).map_err(|e| DatasetError::Parse {
        file: file.to_string(),
        line: e.line(),
        message: e.to_string(),
    })
}

impl Dataset {
    pub fn load(dir: &Path) -> Result<Self, DatasetError> {
        let restaurant: Restaurant = parse_json(RESTAURANT_FILE, &read(&dir.join(RESTAURANT_FILE))?)?;
        let vehicles: Vec<VehicleRecord> = parse_json(VEHICLES_FILE, &read(&dir.join(VEHICLES_FILE))?)?;
        let orders_path = dir.join(ORDERS_FILE);
        let file = fs::File::open(&orders_path).map_err(|source| DatasetError::Io {
            file: orders_path.clone(),
            source,
        })?;
        let mut orders = Vec::new();
        for (i, line) in io::BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| DatasetError::Io {
                file: orders_path.clone(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: OrderRecord = serde_json::from_str(&line).map_err(|e| DatasetError::Parse {
                file: ORDERS_FILE.into(),
                line: i + 1,
                message: e.to_string(),
            })?;
            orders.push((i + 1, rec));
        }
        let matrix_path = dir.join(MATRIX_FILE);
        let matrix = if matrix_path.exists() {
            Some(TravelMatrix::load(&matrix_path)?)
        } else {
            None
        };
        let lines: Vec<usize> = orders.iter().map(|(l, _)| *l).collect();
        let ds = Dataset {
            restaurant,
            vehicles,
            orders: orders.into_iter().map(|(_, r)| r).collect(),
            matrix,
        };
        ds.check_with_lines(&lines)?;
        Ok(ds)
    }

    /// Checks every invariant; order errors cite their line in `orders.jsonl`
    /// assuming one record per line.
    pub fn check(&self) -> Result<(), DatasetError> {
        let lines: Vec<usize> = (1..=self.orders.len()).collect();
        self.check_with_lines(&lines)
    }

    fn check_with_lines(&self, lines: &[usize]) -> Result<(), DatasetError> {
        let r = &self.restaurant;
        if !(-90.0..=90.0).contains(&r.lat) || !(-180.0..=180.0).contains(&r.lon) {
            return Err(invalid(RESTAURANT_FILE, 1, "lat", "coordinates out of range"));
        }
        let mut vehicle_ids = BTreeSet::new();
        for (i, v) in self.vehicles.iter().enumerate() {
            if !vehicle_ids.insert(v.id.as_str()) {
                return Err(invalid(VEHICLES_FILE, i + 1, "id", format!("duplicate vehicle `{}`", v.id)));
            }
            if v.capacity == Some(0) {
                return Err(invalid(VEHICLES_FILE, i + 1, "capacity", "must be positive"));
            }
        }
        let mut ids = BTreeSet::new();
        let f = ORDERS_FILE;
        for (o, &line) in self.orders.iter().zip(lines) {
            if !ids.insert(o.order_id.as_str()) {
                return Err(invalid(f, line, "order_id", format!("duplicate order `{}`", o.order_id)));
            }
            if o.ready_at < o.placed_at {
                return Err(invalid(f, line, "ready_at", "earlier than placed_at"));
            }
            if o.deadline < o.ready_at {
                return Err(invalid(f, line, "deadline", "earlier than ready_at"));
            }
            if o.hist_delivered_at < o.ready_at {
                return Err(invalid(f, line, "hist_delivered_at", "earlier than ready_at"));
            }
            if !(-90.0..=90.0).contains(&o.lat) {
                return Err(invalid(f, line, "lat", "out of range"));
            }
            if !(-180.0..=180.0).contains(&o.lon) {
                return Err(invalid(f, line, "lon", "out of range"));
            }
            if !vehicle_ids.contains(o.hist_vehicle.as_str()) {
                return Err(invalid(f, line, "hist_vehicle", format!("unknown vehicle `{}`", o.hist_vehicle)));
            }
            if o.hist_leg_seconds < 0 {
                return Err(invalid(f, line, "hist_leg_seconds", "negative"));
            }
            if o.hist_stop_index == 0 {
                return Err(invalid(f, line, "hist_stop_index", "positions start at 1"));
            }
        }
        let mut groups: BTreeMap<(NaiveDate, &str, u32), Vec<(u32, usize)>> = BTreeMap::new();
        for (i, o) in self.orders.iter().enumerate() {
            groups
                .entry((o.day(), o.hist_vehicle.as_str(), o.hist_trip))
                .or_default()
                .push((o.hist_stop_index, i));
        }
        for stops in groups.values_mut() {
            stops.sort();
            for (pos, &(idx, i)) in stops.iter().enumerate() {
                if idx as usize != pos + 1 {
                    return Err(invalid(
                        f,
                        lines[i],
                        "hist_stop_index",
                        format!("trip stops are not a contiguous 1..{} sequence", stops.len()),
                    ));
                }
            }
        }
        if let Some(m) = &self.matrix {
            if m.node_count != self.orders.len() + 1 {
                return Err(DatasetError::Matrix(ProviderError::Format(format!(
                    "{} nodes for {} orders plus the restaurant",
                    m.node_count,
                    self.orders.len()
                ))));
            }
        }
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<(), DatasetError> {
        let io_err = |file: &Path| {
            let file = file.to_path_buf();
            move |source| DatasetError::Io { file, source }
        };
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let p = dir.join(RESTAURANT_FILE);
        fs::write(&p, pretty(&self.restaurant)).map_err(io_err(&p))?;
        let p = dir.join(VEHICLES_FILE);
        fs::write(&p, pretty(&self.vehicles)).map_err(io_err(&p))?;
        let p = dir.join(ORDERS_FILE);
        let mut w = BufWriter::new(fs::File::create(&p).map_err(io_err(&p))?);
        for o in &self.orders {
            let line = serde_json::to_string(o).expect("order serializes");
            writeln!(w, "{line}").map_err(io_err(&p))?;
        }
        w.flush().map_err(io_err(&p))?;
        let p = dir.join(MATRIX_FILE);
        match &self.matrix {
            Some(m) => m.save(&p).map_err(io_err(&p))?,
            None if p.exists() => fs::remove_file(&p).map_err(io_err(&p))?,
            None => {}
        }
        Ok(())
    }

    /// Midnight of the first day; all simulation clocks count from here.
    pub fn epoch(&self) -> NaiveDateTime {
        self.orders
            .iter()
            .map(|o| o.placed_at.date())
            .min()
            .unwrap_or(NaiveDate::from_ymd_opt(2000, 1, 1).unwrap())
            .and_hms_opt(0, 0, 0)
            .unwrap()
    }

    pub fn seconds(&self, epoch: NaiveDateTime, t: NaiveDateTime) -> Seconds {
        (t - epoch).num_seconds()
    }

    /// Orders partitioned by the calendar day they were placed.
    pub fn days(&self) -> BTreeMap<NaiveDate, Vec<usize>> {
        let mut out: BTreeMap<NaiveDate, Vec<usize>> = BTreeMap::new();
        for (i, o) in self.orders.iter().enumerate() {
            out.entry(o.day()).or_default().push(i);
        }
        out
    }

    /// Historical trips sorted by (day, vehicle, trip).
    pub fn hist_trips(&self) -> Vec<HistTrip> {
        let mut groups: BTreeMap<(NaiveDate, &str, u32), Vec<(u32, usize)>> = BTreeMap::new();
        for (i, o) in self.orders.iter().enumerate() {
            groups
                .entry((o.day(), o.hist_vehicle.as_str(), o.hist_trip))
                .or_default()
                .push((o.hist_stop_index, i));
        }
        groups
            .into_iter()
            .map(|((day, vehicle, trip), mut stops)| {
                stops.sort();
                HistTrip {
                    day,
                    vehicle: vehicle.to_string(),
                    trip,
                    stops: stops.into_iter().map(|(_, i)| i).collect(),
                }
            })
            .collect()
    }

    /// The matrix provider when a matrix is present, otherwise haversine at 30 km/h.
    pub fn provider(&self) -> Result<Box<dyn TravelTimeProvider>, DatasetError> {
        match &self.matrix {
            Some(m) => {
                let mut nodes = vec![self.restaurant.location()];
                nodes.extend(self.orders.iter().map(|o| o.location()));
                Ok(Box::new(MatrixProvider::new(m.clone(), &nodes)?))
            }
            None => Ok(Box::new(HaversineProvider::default())),
        }
    }

    /// Dispatcher view of order `i` on the clock starting at `epoch`.
    pub fn dispatch_order(&self, i: usize, epoch: NaiveDateTime) -> Order {
        let o = &self.orders[i];
        Order {
            id: o.order_id.clone(),
            placed_at: self.seconds(epoch, o.placed_at),
            ready_at: self.seconds(epoch, o.ready_at),
            deadline: self.seconds(epoch, o.deadline),
            location: o.location(),
            demand: o.demand,
        }
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializes");
    s.push('\n');
    s
}
