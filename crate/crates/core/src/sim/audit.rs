//! Independent check of a run log against the dataset.

use std::collections::{BTreeMap, HashMap};

use super::engine::{leg_ticks, TICK_SECONDS};
use super::log::{EntityKind, LegDetail, LogEvent, DECISION, EPISODE_FAILED, LEG, ORDER_LIFECYCLE, UNDELIVERABLE, VEHICLE_LIFECYCLE};
use crate::data::{Dataset, Location, TravelTimeProvider};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub index: usize,
    pub message: String,
}

/// Returns every violation found: ticks going backwards, illegal lifecycle
/// transitions, legs that disagree with the provider, orders lost or
/// duplicated.
pub fn audit_log(log: &[LogEvent], dataset: &Dataset, factor: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut bad = |index: usize, message: String| out.push(Violation { index, message });
    let provider = match dataset.provider() {
        Ok(p) => p,
        Err(e) => {
            bad(0, format!("dataset provider: {e}"));
            return out;
        }
    };
    let depot = dataset.restaurant.location();
    let orders: HashMap<&str, Location> =
        dataset.orders.iter().map(|o| (o.order_id.as_str(), o.location())).collect();
    let locate = |name: &str| if name == "depot" { Some(depot) } else { orders.get(name).copied() };
    let mut order_state: BTreeMap<&str, &str> = BTreeMap::new();
    let mut vehicle_state: BTreeMap<&str, &str> = BTreeMap::new();
    let mut vehicle_at: BTreeMap<&str, String> = BTreeMap::new();
    let mut last_tick = i64::MIN;
    for (i, e) in log.iter().enumerate() {
        if e.tick < last_tick {
            bad(i, format!("tick {} after tick {last_tick}", e.tick));
        }
        last_tick = e.tick;
        let id = e.entity_id.as_str();
        match e.entity_kind {
            EntityKind::Order => {
                if !orders.contains_key(id) {
                    bad(i, format!("unknown order `{id}`"));
                    continue;
                }
                let prev = order_state.get(id).copied();
                let ok = match (prev, e.transition.as_str()) {
                    (Some("delivered" | UNDELIVERABLE), _) => false,
                    (_, UNDELIVERABLE) => true,
                    (None, t) => t == ORDER_LIFECYCLE[0],
                    (Some(p), t) => {
                        let pi = ORDER_LIFECYCLE.iter().position(|&x| x == p);
                        let ti = ORDER_LIFECYCLE.iter().position(|&x| x == t);
                        matches!((pi, ti), (Some(a), Some(b)) if b == a + 1)
                    }
                };
                if !ok {
                    bad(i, format!("order `{id}`: {} -> {}", prev.unwrap_or("none"), e.transition));
                }
                order_state.insert(id, ORDER_LIFECYCLE.iter().chain([&UNDELIVERABLE]).find(|&&x| x == e.transition).copied().unwrap_or("?"));
            }
            EntityKind::Vehicle if e.transition == LEG => {
                let Ok(leg) = serde_json::from_value::<LegDetail>(e.detail.clone()) else {
                    bad(i, format!("vehicle `{id}`: malformed leg detail"));
                    continue;
                };
                let here = vehicle_at.get(id).map_or("depot", String::as_str);
                if leg.from != here {
                    bad(i, format!("vehicle `{id}`: leg from `{}` but vehicle is at `{here}`", leg.from));
                }
                match (locate(&leg.from), locate(&leg.to)) {
                    (Some(a), Some(b)) => match provider.leg(a, b) {
                        Ok(est) => {
                            let ticks = leg_ticks(est.seconds, factor);
                            if leg.seconds != ticks * TICK_SECONDS || leg.meters != est.meters {
                                bad(
                                    i,
                                    format!(
                                        "vehicle `{id}`: leg {} -> {} is {} s / {} m, expected {} s / {} m",
                                        leg.from,
                                        leg.to,
                                        leg.seconds,
                                        leg.meters,
                                        ticks * TICK_SECONDS,
                                        est.meters
                                    ),
                                );
                            }
                        }
                        Err(err) => bad(i, format!("provider: {err}")),
                    },
                    _ => bad(i, format!("vehicle `{id}`: leg names an unknown place")),
                }
                let moving = vehicle_state.get(id).copied().unwrap_or(VEHICLE_LIFECYCLE[0]);
                if !matches!(moving, "delivering" | "returning") {
                    bad(i, format!("vehicle `{id}`: leg while {moving}"));
                }
                vehicle_at.insert(id, leg.to);
            }
            EntityKind::Vehicle => {
                if !dataset.vehicles.iter().any(|v| v.id == id) {
                    bad(i, format!("unknown vehicle `{id}`"));
                    continue;
                }
                let prev = vehicle_state.get(id).copied().unwrap_or(VEHICLE_LIFECYCLE[0]);
                let t = e.transition.as_str();
                let pi = VEHICLE_LIFECYCLE.iter().position(|&x| x == prev).unwrap_or(0);
                if VEHICLE_LIFECYCLE[(pi + 1) % VEHICLE_LIFECYCLE.len()] != t {
                    bad(i, format!("vehicle `{id}`: {prev} -> {t}"));
                }
                if t == "ready" && vehicle_at.get(id).is_some_and(|a| a != "depot") {
                    bad(i, format!("vehicle `{id}`: ready away from the depot"));
                }
                if let Some(&s) = VEHICLE_LIFECYCLE.iter().find(|&&x| x == t) {
                    vehicle_state.insert(id, s);
                }
            }
            EntityKind::Episode => {
                if e.transition != DECISION && e.transition != EPISODE_FAILED {
                    bad(i, format!("episode: unknown transition `{}`", e.transition));
                }
            }
        }
    }
    for o in &dataset.orders {
        match order_state.get(o.order_id.as_str()) {
            Some(&"delivered") | Some(&UNDELIVERABLE) => {}
            s => bad(log.len(), format!("order `{}` ends in {}", o.order_id, s.unwrap_or(&"none"))),
        }
    }
    out
}
