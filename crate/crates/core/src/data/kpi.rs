//! Delivery KPIs from a run log and ratio tables against a baseline.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use chrono::{Duration as ChronoDuration, NaiveDate};
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::sim::log::{EntityKind, LegDetail, LogEvent, EPISODE_FAILED, LEG, UNDELIVERABLE};

pub const SCHEMA_VERSION: u32 = 1;

/// Deliveries later than this many seconds count toward P10D.
pub const LATE_THRESHOLD: i64 = 600;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KpiValues {
    pub orders: u64,
    pub delivered: u64,
    pub undeliverable: u64,
    /// Total driven time, seconds.
    pub dt: i64,
    /// Total driven distance, metres.
    pub dd: i64,
    /// Total delay past deadlines, seconds.
    pub td: i64,
    /// Deliveries after the deadline.
    pub pd: u64,
    /// Deliveries more than ten minutes after the deadline.
    pub p10d: u64,
}

impl KpiValues {
    fn add(&mut self, o: &KpiValues) {
        self.orders += o.orders;
        self.delivered += o.delivered;
        self.undeliverable += o.undeliverable;
        self.dt += o.dt;
        self.dd += o.dd;
        self.td += o.td;
        self.pd += o.pd;
        self.p10d += o.p10d;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayKpis {
    pub date: NaiveDate,
    #[serde(flatten)]
    pub values: KpiValues,
    /// At least one decision episode failed on this day.
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KpiReport {
    pub schema_version: u32,
    /// Totals over every day, failed days included.
    pub totals: KpiValues,
    pub days: Vec<DayKpis>,
    pub failed_days: Vec<NaiveDate>,
}

/// Orders count on the day they were placed; driving counts on the day of the
/// tick the leg started.
pub fn compute_kpis(log: &[LogEvent], dataset: &Dataset) -> KpiReport {
    let epoch = dataset.epoch();
    let date_of = |tick: i64| (epoch + ChronoDuration::seconds(tick * 60)).date();
    let index: HashMap<&str, usize> = dataset.orders.iter().enumerate().map(|(i, o)| (o.order_id.as_str(), i)).collect();
    let mut days: BTreeMap<NaiveDate, (KpiValues, bool)> = BTreeMap::new();
    for (date, orders) in dataset.days() {
        days.entry(date).or_default().0.orders = orders.len() as u64;
    }
    for e in log {
        match (e.entity_kind, e.transition.as_str()) {
            (EntityKind::Order, "delivered") => {
                let Some(&i) = index.get(e.entity_id.as_str()) else { continue };
                let o = &dataset.orders[i];
                let late = e.tick * 60 - dataset.seconds(epoch, o.deadline);
                let v = &mut days.entry(o.day()).or_default().0;
                v.delivered += 1;
                if late > 0 {
                    v.td += late;
                    v.pd += 1;
                    if late > LATE_THRESHOLD {
                        v.p10d += 1;
                    }
                }
            }
            (EntityKind::Order, UNDELIVERABLE) => {
                if let Some(&i) = index.get(e.entity_id.as_str()) {
                    days.entry(dataset.orders[i].day()).or_default().0.undeliverable += 1;
                }
            }
            (EntityKind::Vehicle, LEG) => {
                if let Ok(leg) = serde_json::from_value::<LegDetail>(e.detail.clone()) {
                    let v = &mut days.entry(date_of(e.tick)).or_default().0;
                    v.dt += leg.seconds;
                    v.dd += leg.meters;
                }
            }
            (EntityKind::Episode, EPISODE_FAILED) => {
                days.entry(date_of(e.tick)).or_default().1 = true;
            }
            _ => {}
        }
    }
    let mut totals = KpiValues::default();
    let mut out = Vec::with_capacity(days.len());
    for (date, (values, failed)) in days {
        totals.add(&values);
        out.push(DayKpis { date, values, failed });
    }
    KpiReport {
        schema_version: SCHEMA_VERSION,
        totals,
        failed_days: out.iter().filter(|d| d.failed).map(|d| d.date).collect(),
        days: out,
    }
}

impl KpiReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("date,orders,delivered,undeliverable,dt,dd,td,pd,p10d,failed\n");
        let mut row = |label: &str, v: &KpiValues, failed: bool| {
            let _ = writeln!(
                s,
                "{label},{},{},{},{},{},{},{},{},{failed}",
                v.orders, v.delivered, v.undeliverable, v.dt, v.dd, v.td, v.pd, v.p10d
            );
        };
        for d in &self.days {
            row(&d.date.to_string(), &d.values, d.failed);
        }
        row("total", &self.totals, !self.failed_days.is_empty());
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub metric: String,
    pub optimized: f64,
    pub baseline: f64,
    /// Omitted when the baseline value is zero.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailyP10d {
    pub date: NaiveDate,
    pub optimized: u64,
    pub baseline: u64,
    pub optimized_failed: bool,
    pub baseline_failed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub schema_version: u32,
    pub ratios: Vec<Ratio>,
    pub notes: Vec<String>,
    pub daily_p10d: Vec<DailyP10d>,
}

impl Comparison {
    pub fn ratio(&self, metric: &str) -> Option<f64> {
        self.ratios.iter().find(|r| r.metric == metric).and_then(|r| r.ratio)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("metric,optimized,baseline,ratio\n");
        for r in &self.ratios {
            let ratio = r.ratio.map(|x| format!("{x:.4}")).unwrap_or_default();
            let _ = writeln!(s, "{},{},{},{ratio}", r.metric, r.optimized, r.baseline);
        }
        s
    }

    pub fn daily_csv(&self) -> String {
        let mut s = String::from("date,optimized_p10d,baseline_p10d,optimized_failed,baseline_failed\n");
        for d in &self.daily_p10d {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                d.date, d.optimized, d.baseline, d.optimized_failed, d.baseline_failed
            );
        }
        s
    }
}

pub fn compare(optimized: &KpiReport, baseline: &KpiReport) -> Comparison {
    let (o, b) = (&optimized.totals, &baseline.totals);
    let pairs = [
        ("DT", o.dt as f64, b.dt as f64),
        ("DD", o.dd as f64, b.dd as f64),
        ("TD", o.td as f64, b.td as f64),
        ("PD", o.pd as f64, b.pd as f64),
        ("P10D", o.p10d as f64, b.p10d as f64),
    ];
    let mut notes = Vec::new();
    let ratios = pairs
        .into_iter()
        .map(|(metric, optimized, baseline)| {
            let ratio = if baseline > 0.0 {
                Some(optimized / baseline)
            } else {
                notes.push(format!("{metric}: baseline is zero, ratio omitted"));
                None
            };
            Ratio {
                metric: metric.to_string(),
                optimized,
                baseline,
                ratio,
            }
        })
        .collect();
    let base_days: BTreeMap<NaiveDate, &DayKpis> = baseline.days.iter().map(|d| (d.date, d)).collect();
    let opt_days: BTreeMap<NaiveDate, &DayKpis> = optimized.days.iter().map(|d| (d.date, d)).collect();
    let mut dates: Vec<NaiveDate> = base_days.keys().chain(opt_days.keys()).copied().collect();
    dates.sort();
    dates.dedup();
    let daily_p10d = dates
        .into_iter()
        .map(|date| {
            let od = opt_days.get(&date);
            let bd = base_days.get(&date);
            DailyP10d {
                date,
                optimized: od.map_or(0, |d| d.values.p10d),
                baseline: bd.map_or(0, |d| d.values.p10d),
                optimized_failed: od.is_some_and(|d| d.failed),
                baseline_failed: bd.is_some_and(|d| d.failed),
            }
        })
        .collect();
    Comparison {
        schema_version: SCHEMA_VERSION,
        ratios,
        notes,
        daily_p10d,
    }
}
