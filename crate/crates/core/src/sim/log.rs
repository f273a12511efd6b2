//! The run log: one JSON object per line, keys in alphabetical order, no
//! wall-clock data.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Order,
    Vehicle,
    /// Decision episodes; the id is the calendar day.
    Episode,
}

/// Order transitions, in lifecycle order.
pub const ORDER_LIFECYCLE: [&str; 6] = ["received", "cooked", "assigned", "dispatched", "en-route", "delivered"];
pub const UNDELIVERABLE: &str = "undeliverable";
/// Vehicle transitions, cyclic. Every vehicle starts `ready`, unlogged.
pub const VEHICLE_LIFECYCLE: [&str; 4] = ["ready", "loading", "delivering", "returning"];
/// Informational vehicle event carrying one driven leg.
pub const LEG: &str = "leg";
pub const DECISION: &str = "decision";
pub const EPISODE_FAILED: &str = "failed";

// Field order is alphabetical so the serialized keys are sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEvent {
    pub detail: Value,
    pub entity_id: String,
    pub entity_kind: EntityKind,
    pub tick: i64,
    pub transition: String,
}

impl LogEvent {
    pub fn new(tick: i64, entity_kind: EntityKind, entity_id: impl Into<String>, transition: &str, detail: Value) -> Self {
        LogEvent {
            detail,
            entity_id: entity_id.into(),
            entity_kind,
            tick,
            transition: transition.to_string(),
        }
    }
}

/// Leg payload of a `leg` event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegDetail {
    /// `depot` or an order id.
    pub from: String,
    pub to: String,
    /// Simulated duration: whole ticks, in seconds.
    pub seconds: i64,
    pub meters: i64,
}

pub fn write_jsonl(events: &[LogEvent], mut w: impl Write) -> io::Result<()> {
    for e in events {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn to_jsonl(events: &[LogEvent]) -> Vec<u8> {
    let mut out = Vec::new();
    write_jsonl(events, &mut out).expect("writing to memory");
    out
}

pub fn read_jsonl(r: impl BufRead) -> Result<Vec<LogEvent>, String> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| format!("line {}: {e}", i + 1))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_are_sorted() {
        let e = LogEvent::new(3, EntityKind::Order, "o1", "cooked", json!({"b": 1, "a": 2}));
        let line = String::from_utf8(to_jsonl(&[e.clone()])).unwrap();
        assert_eq!(
            line,
            "{\"detail\":{\"a\":2,\"b\":1},\"entity_id\":\"o1\",\"entity_kind\":\"order\",\"tick\":3,\"transition\":\"cooked\"}\n"
        );
        assert_eq!(read_jsonl(line.as_bytes()).unwrap(), vec![e]);
    }
}
