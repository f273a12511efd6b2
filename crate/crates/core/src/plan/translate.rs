use thiserror::Error;

use super::domain::{destination_name, object_name, ActionName, ObjectType, Plan, PlanAction, DEPOT};
use crate::routing::{Customer, RouteSolution, Vehicle};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("route references unknown vehicle `{0}`")]
    UnknownVehicle(String),
    #[error("route references node {0} with no matching order")]
    UnknownOrder(usize),
    #[error("object name `{name}` is used for both a {first} and a {second}")]
    NameClash {
        name: String,
        first: &'static str,
        second: &'static str,
    },
}

/// Turns a routing solution into a sequential plan. Each non-empty route
/// becomes one delivery `d1..dn` (numbered in `vehicles` order) and
/// contributes, contiguously:
/// `assign-order`×k, `assign-delivery`, `dispatch-delivery`,
/// (`drive`, `deliver-order`)×k, `drive` back to the depot, `finish-delivery`.
pub fn translate(solution: &RouteSolution, customers: &[Customer], vehicles: &[Vehicle]) -> Result<Plan, TranslateError> {
    let mut plan = Plan::default();
    let declare = |plan: &mut Plan, name: &str, ty: ObjectType| -> Result<(), TranslateError> {
        match plan.objects.insert(name.to_string(), ty) {
            Some(prev) if prev != ty => Err(TranslateError::NameClash {
                name: name.to_string(),
                first: prev.as_str(),
                second: ty.as_str(),
            }),
            _ => Ok(()),
        }
    };
    declare(&mut plan, DEPOT, ObjectType::Location)?;
    for v in vehicles {
        declare(&mut plan, &object_name(&v.id), ObjectType::Vehicle)?;
    }

    let mut routes: Vec<(usize, &crate::routing::Route)> = Vec::new();
    for r in &solution.routes {
        let pos = vehicles
            .iter()
            .position(|v| v.id == r.vehicle_id)
            .ok_or_else(|| TranslateError::UnknownVehicle(r.vehicle_id.clone()))?;
        routes.push((pos, r));
    }
    routes.sort_by_key(|(pos, _)| *pos);

    let mut delivery_no = 0;
    for (_, route) in routes {
        if route.is_empty() {
            continue;
        }
        delivery_no += 1;
        let d = format!("d{delivery_no}");
        declare(&mut plan, &d, ObjectType::Delivery)?;
        let v = object_name(&route.vehicle_id);
        let mut orders = Vec::with_capacity(route.customers().len());
        for &node in route.customers() {
            let c = customers.iter().find(|c| c.node == node).ok_or(TranslateError::UnknownOrder(node))?;
            let o = object_name(&c.id);
            let loc = destination_name(&o);
            declare(&mut plan, &o, ObjectType::Order)?;
            declare(&mut plan, &loc, ObjectType::Location)?;
            plan.destinations.insert(o.clone(), loc.clone());
            orders.push((o, loc));
        }
        let acts = &mut plan.actions;
        for (o, _) in &orders {
            acts.push(PlanAction::new(ActionName::AssignOrder, &[o, &d]));
        }
        acts.push(PlanAction::new(ActionName::AssignDelivery, &[&d, &v]));
        acts.push(PlanAction::new(ActionName::DispatchDelivery, &[&d, &v]));
        let mut at = DEPOT.to_string();
        for (o, loc) in &orders {
            acts.push(PlanAction::new(ActionName::Drive, &[&v, &at, loc]));
            acts.push(PlanAction::new(ActionName::DeliverOrder, &[o, &v, loc]));
            at = loc.clone();
        }
        acts.push(PlanAction::new(ActionName::Drive, &[&v, &at, DEPOT]));
        acts.push(PlanAction::new(ActionName::FinishDelivery, &[&d, &v]));
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::routing::{schedule_route, TravelGraph, VrptwTask};

    fn two_order_task() -> VrptwTask {
        VrptwTask {
            vehicles: vec![Vehicle::unlimited("v1"), Vehicle::unlimited("v2")],
            customers: vec![
                Customer { id: "o1".into(), node: 1, demand: 1, window_open: 0, window_close: 1000 },
                Customer { id: "o2".into(), node: 2, demand: 1, window_open: 0, window_close: 1000 },
            ],
            graph: TravelGraph::from_fn(4, |_, _| (10, 10)),
            horizon_open: 0,
            horizon_close: 1000,
        }
    }

    #[test]
    fn one_route_two_orders() {
        let task = two_order_task();
        let r1 = schedule_route(&task, "v1", &[0, 1, 2, 3]).unwrap().feasible().unwrap();
        let r2 = crate::routing::Route::empty("v2", &task);
        let s = RouteSolution::from_routes(&task, vec![r1, r2]);
        let plan = translate(&s, &task.customers, &task.vehicles).unwrap();
        let names: Vec<&str> = plan.actions.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "assign-order",
                "assign-order",
                "assign-delivery",
                "dispatch-delivery",
                "drive",
                "deliver-order",
                "drive",
                "deliver-order",
                "drive",
                "finish-delivery"
            ]
        );
        assert_eq!(plan.actions[0].to_string(), "(assign-order o1 d1)");
        assert_eq!(plan.actions[8].to_string(), "(drive v1 loc-o2 depot)");
    }

    #[test]
    fn empty_solution_gives_empty_plan() {
        let task = two_order_task();
        let s = RouteSolution::from_routes(&task, vec![]);
        assert!(translate(&s, &task.customers, &task.vehicles).unwrap().is_empty());
    }

    #[test]
    fn unknown_references() {
        let task = two_order_task();
        let r1 = schedule_route(&task, "v1", &[0, 1, 2, 3]).unwrap().feasible().unwrap();
        let s = RouteSolution::from_routes(&task, vec![r1]);
        assert_eq!(
            translate(&s, &task.customers[..1], &task.vehicles),
            Err(TranslateError::UnknownOrder(2))
        );
        assert!(matches!(translate(&s, &task.customers, &task.vehicles[1..]), Err(TranslateError::UnknownVehicle(_))));
    }
}
