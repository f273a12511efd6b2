//! Travel-time providers.

use std::collections::HashMap;
use std::io::{self, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::routing::{Meters, Seconds};

const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Default urban driving speed for the haversine provider: 30 km/h.
pub const DEFAULT_SPEED_MPS: f64 = 30.0 / 3.6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub lat: f64,
    pub lon: f64,
}

impl Location {
    pub fn new(lat: f64, lon: f64) -> Self {
        Location { lat, lon }
    }

    fn key(self) -> (u64, u64) {
        (self.lat.to_bits(), self.lon.to_bits())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leg {
    pub seconds: Seconds,
    pub meters: Meters,
}

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("no matrix node at ({lat}, {lon})")]
    UnknownLocation { lat: f64, lon: f64 },
    #[error("matrix file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Estimates driving time and distance for an ordered pair of locations.
/// Symmetry is not assumed.
pub trait TravelTimeProvider: Send + Sync {
    fn leg(&self, from: Location, to: Location) -> Result<Leg, ProviderError>;
}

impl<P: TravelTimeProvider + ?Sized> TravelTimeProvider for &P {
    fn leg(&self, from: Location, to: Location) -> Result<Leg, ProviderError> {
        (**self).leg(from, to)
    }
}

impl<P: TravelTimeProvider + ?Sized> TravelTimeProvider for Box<P> {
    fn leg(&self, from: Location, to: Location) -> Result<Leg, ProviderError> {
        (**self).leg(from, to)
    }
}

impl<P: TravelTimeProvider + ?Sized> TravelTimeProvider for std::sync::Arc<P> {
    fn leg(&self, from: Location, to: Location) -> Result<Leg, ProviderError> {
        (**self).leg(from, to)
    }
}

pub fn haversine_m(a: Location, b: Location) -> f64 {
    let (lat1, lat2) = (a.lat.to_radians(), b.lat.to_radians());
    let dlat = (b.lat - a.lat).to_radians();
    let dlon = (b.lon - a.lon).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().asin()
}

/// Great-circle distance driven at a constant speed. A rough stand-in for
/// road routing that needs no external data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaversineProvider {
    pub speed_mps: f64,
}

impl Default for HaversineProvider {
    fn default() -> Self {
        HaversineProvider {
            speed_mps: DEFAULT_SPEED_MPS,
        }
    }
}

impl TravelTimeProvider for HaversineProvider {
    fn leg(&self, from: Location, to: Location) -> Result<Leg, ProviderError> {
        let m = haversine_m(from, to);
        Ok(Leg {
            seconds: (m / self.speed_mps).round() as Seconds,
            meters: m.round() as Meters,
        })
    }
}

/// Scales another provider's times by a calibration factor (distances unchanged).
#[derive(Debug, Clone)]
pub struct CalibratedProvider<P> {
    pub inner: P,
    pub factor: f64,
}

impl<P: TravelTimeProvider> TravelTimeProvider for CalibratedProvider<P> {
    fn leg(&self, from: Location, to: Location) -> Result<Leg, ProviderError> {
        let leg = self.inner.leg(from, to)?;
        Ok(Leg {
            seconds: (leg.seconds as f64 * self.factor).round() as Seconds,
            meters: leg.meters,
        })
    }
}

pub const MATRIX_MAGIC: [u8; 4] = *b"TTMX";

/// Dense travel matrix. On disk: 4-byte magic `TTMX`, node count as u32 LE,
/// then `n*n` u32 LE seconds and `n*n` u32 LE meters, both row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TravelMatrix {
    pub node_count: usize,
    pub seconds: Vec<u32>,
    pub meters: Vec<u32>,
}

impl TravelMatrix {
    pub fn from_provider(nodes: &[Location], provider: &dyn TravelTimeProvider) -> Result<Self, ProviderError> {
        let n = nodes.len();
        let mut seconds = vec![0; n * n];
        let mut meters = vec![0; n * n];
        for (i, &a) in nodes.iter().enumerate() {
            for (j, &b) in nodes.iter().enumerate() {
                if i != j {
                    let leg = provider.leg(a, b)?;
                    seconds[i * n + j] = leg.seconds.clamp(0, u32::MAX as i64) as u32;
                    meters[i * n + j] = leg.meters.clamp(0, u32::MAX as i64) as u32;
                }
            }
        }
        Ok(TravelMatrix { node_count: n, seconds, meters })
    }

    pub fn write_to(&self, mut w: impl Write) -> io::Result<()> {
        w.write_all(&MATRIX_MAGIC)?;
        w.write_all(&(self.node_count as u32).to_le_bytes())?;
        for v in self.seconds.iter().chain(&self.meters) {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self, ProviderError> {
        let mut header = [0u8; 8];
        r.read_exact(&mut header)?;
        if header[..4] != MATRIX_MAGIC {
            return Err(ProviderError::Format(format!("bad magic {:?}", &header[..4])));
        }
        let n = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        let cells = n
            .checked_mul(n)
            .ok_or_else(|| ProviderError::Format(format!("node count {n} overflows")))?;
        let mut body = Vec::new();
        r.read_to_end(&mut body)?;
        if body.len() != cells * 8 {
            return Err(ProviderError::Format(format!(
                "expected {} body bytes for {n} nodes, found {}",
                cells * 8,
                body.len()
            )));
        }
        let words: Vec<u32> = body.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect();
        let (seconds, meters) = words.split_at(cells);
        Ok(TravelMatrix {
            node_count: n,
            seconds: seconds.to_vec(),
            meters: meters.to_vec(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ProviderError> {
        Self::read_from(io::BufReader::new(std::fs::File::open(path)?))
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        let mut w = io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()
    }
}

/// Looks locations up in a `TravelMatrix` by exact coordinates.
#[derive(Debug, Clone)]
pub struct MatrixProvider {
    matrix: TravelMatrix,
    index: HashMap<(u64, u64), usize>,
}

impl MatrixProvider {
    /// `nodes[i]` is the location of matrix node `i`. Duplicate coordinates map
    /// to their first node.
    pub fn new(matrix: TravelMatrix, nodes: &[Location]) -> Result<Self, ProviderError> {
        if nodes.len() != matrix.node_count {
            return Err(ProviderError::Format(format!(
                "{} locations for a {}-node matrix",
                nodes.len(),
                matrix.node_count
            )));
        }
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, loc) in nodes.iter().enumerate() {
            index.entry(loc.key()).or_insert(i);
        }
        Ok(MatrixProvider { matrix, index })
    }

    fn node(&self, loc: Location) -> Result<usize, ProviderError> {
        self.index
            .get(&loc.key())
            .copied()
            .ok_or(ProviderError::UnknownLocation { lat: loc.lat, lon: loc.lon })
    }
}

impl TravelTimeProvider for MatrixProvider {
    fn leg(&self, from: Location, to: Location) -> Result<Leg, ProviderError> {
        let (i, j) = (self.node(from)?, self.node(to)?);
        let idx = i * self.matrix.node_count + j;
        Ok(Leg {
            seconds: self.matrix.seconds[idx] as Seconds,
            meters: self.matrix.meters[idx] as Meters,
        })
    }
}
