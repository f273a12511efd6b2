use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionName {
    AssignOrder,
    AssignDelivery,
    DispatchDelivery,
    Drive,
    DeliverOrder,
    FinishDelivery,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectType {
    Order,
    Delivery,
    Vehicle,
    Location,
}

impl ObjectType {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectType::Order => "order",
            ObjectType::Delivery => "delivery",
            ObjectType::Vehicle => "vehicle",
            ObjectType::Location => "location",
        }
    }
}

impl ActionName {
    pub const ALL: [ActionName; 6] = [
        ActionName::AssignOrder,
        ActionName::AssignDelivery,
        ActionName::DispatchDelivery,
        ActionName::Drive,
        ActionName::DeliverOrder,
        ActionName::FinishDelivery,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActionName::AssignOrder => "assign-order",
            ActionName::AssignDelivery => "assign-delivery",
            ActionName::DispatchDelivery => "dispatch-delivery",
            ActionName::Drive => "drive",
            ActionName::DeliverOrder => "deliver-order",
            ActionName::FinishDelivery => "finish-delivery",
        }
    }

    /// Parameter types, in argument order.
    pub fn signature(self) -> &'static [ObjectType] {
        use ObjectType::*;
        match self {
            ActionName::AssignOrder => &[Order, Delivery],
            ActionName::AssignDelivery => &[Delivery, Vehicle],
            ActionName::DispatchDelivery => &[Delivery, Vehicle],
            ActionName::Drive => &[Vehicle, Location, Location],
            ActionName::DeliverOrder => &[Order, Vehicle, Location],
            ActionName::FinishDelivery => &[Delivery, Vehicle],
        }
    }

    pub fn arity(self) -> usize {
        self.signature().len()
    }
}

impl fmt::Display for ActionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActionName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActionName::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown action `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlanAction {
    pub name: ActionName,
    pub args: Vec<String>,
}

impl PlanAction {
    pub fn new(name: ActionName, args: &[&str]) -> Self {
        PlanAction {
            name,
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl fmt::Display for PlanAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// Name of the restaurant location object.
pub const DEPOT: &str = "depot";

/// A grounded plan together with the problem facts it is checked against.
/// Initially every order is pending, every delivery open, and every vehicle
/// available at the depot.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub objects: BTreeMap<String, ObjectType>,
    /// Drop-off location of each order.
    pub destinations: BTreeMap<String, String>,
    pub actions: Vec<PlanAction>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// PDDL-safe object name: lowercase, `[a-z0-9-_]`, starting with a letter.
pub fn object_name(id: &str) -> String {
    let mut s: String = id
        .chars()
        .map(|c| {
            let c = c.to_ascii_lowercase();
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '-'
            }
        })
        .collect();
    if !s.starts_with(|c: char| c.is_ascii_lowercase()) {
        s.insert(0, 'x');
    }
    s
}

/// Location object for an order's drop-off point.
pub fn destination_name(order: &str) -> String {
    format!("loc-{order}")
}
