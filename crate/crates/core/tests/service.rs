use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use delivery_dispatch::data::{generate_dataset, GeneratorSpec};
use delivery_dispatch::plan::{destination_name, parse_plan_text, validate_plan, ObjectType, Plan};
use delivery_dispatch::sim::{Mode, RunConfig, StateView};
use delivery_dispatch::tsb::{router, App, BatchView, Session, SessionHandle};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn handle(id: &str, seed: u64) -> Arc<SessionHandle> {
    let ds = generate_dataset(&GeneratorSpec { days: 1, orders_per_day: 80.0, vehicles: 4, rng_seed: seed, ..Default::default() });
    let session = Session::new(id, Arc::new(ds), RunConfig::deterministic(Mode::Optimized, 1.6666, seed)).unwrap();
    SessionHandle::new(session)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or(Body::empty(), |b| Body::from(b.to_string()))).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

/// Steps the session until some planned batch satisfies `want`.
fn step_until(h: &SessionHandle, want: impl Fn(&BatchView) -> bool) -> BatchView {
    loop {
        if let Some(b) = h.plan().decision.and_then(|d| d.batches.into_iter().find(|b| want(b))) {
            return b;
        }
        assert!(h.mutate(|s| s.step()), "ran out of events");
    }
}

/// Rebuilds the plan objects from the served text and the naming rules.
fn served_plan(text: &str) -> Plan {
    let actions = parse_plan_text(text).unwrap();
    let mut plan = Plan::default();
    for a in &actions {
        for (arg, ty) in a.args.iter().zip(a.name.signature()) {
            plan.objects.insert(arg.clone(), *ty);
        }
    }
    for (o, _) in plan.objects.iter().filter(|(_, t)| **t == ObjectType::Order) {
        plan.destinations.insert(o.clone(), destination_name(o));
    }
    plan.actions = actions;
    plan
}

#[tokio::test(flavor = "multi_thread")]
async fn plan_is_empty_before_the_first_episode() {
    let h = handle("r1", 1);
    let app = router(App::new(vec![h]));
    let (status, body) = call(&app, "GET", "/api/v1/plan", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "no-decision");
    assert_eq!(body["schema_version"], 1);
    let (status, body) = call(&app, "GET", "/api/v1/state", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["orders"], json!([]));
    assert_eq!(body["vehicles"].as_array().unwrap().len(), 4);
}

#[tokio::test(flavor = "multi_thread")]
async fn dispatch_lifecycle_over_http() {
    let h = handle("r1", 2);
    let app = router(App::new(vec![Arc::clone(&h)]));

    // a planned batch whose food is not ready yet
    let early = step_until(&h, |b| !b.ready && b.vehicle_ready);
    let cmd = json!({ "vehicle_id": early.vehicle_id, "delivery_id": early.delivery_id });
    let (status, body) = call(&app, "POST", "/api/v1/dispatch", Some(cmd)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"]["code"], "BATCH_NOT_READY");

    let batch = step_until(&h, |b| b.ready && b.vehicle_ready);
    let (_, plan) = call(&app, "GET", "/api/v1/plan", None).await;
    let text = plan["decision"]["plan"].as_str().unwrap();
    assert!(validate_plan(&served_plan(text)).is_valid());

    let cmd = json!({ "vehicle_id": batch.vehicle_id, "delivery_id": batch.delivery_id, "issued_by": "test" });
    let (status, body) = call(&app, "POST", "/api/v1/restaurants/r1/dispatch", Some(cmd.clone())).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["status"], "accepted");
    let orders: Vec<String> = batch.stops.iter().map(|s| s.order_id.clone()).collect();
    assert_eq!(body["orders"], json!(orders));

    let (_, state) = call(&app, "GET", "/api/v1/state", None).await;
    let vehicle = state["vehicles"].as_array().unwrap().iter().find(|v| v["vehicle_id"] == batch.vehicle_id.as_str()).unwrap();
    assert_eq!(vehicle["status"], "loading");
    for o in &orders {
        let row = state["orders"].as_array().unwrap().iter().find(|r| r["order_id"] == o.as_str()).unwrap();
        assert_eq!(row["status"], "assigned");
    }

    // the same command again is stale
    let (status, body) = call(&app, "POST", "/api/v1/dispatch", Some(cmd)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"]["code"], "DELIVERY_ALREADY_DISPATCHED");

    // two minutes later the vehicle is on its way
    let now = h.state().tick;
    h.mutate(|s| s.advance_to(now + 2));
    let (_, state) = call(&app, "GET", "/api/v1/state", None).await;
    let vehicle = state["vehicles"].as_array().unwrap().iter().find(|v| v["vehicle_id"] == batch.vehicle_id.as_str()).unwrap();
    assert_eq!(vehicle["status"], "delivering");
}

#[tokio::test(flavor = "multi_thread")]
async fn event_feed_rebuilds_state() {
    let h = handle("r1", 3);
    let app = router(App::new(vec![Arc::clone(&h)]));
    for _ in 0..3 {
        let b = step_until(&h, |b| b.ready && b.vehicle_ready);
        let cmd = json!({ "vehicle_id": b.vehicle_id, "delivery_id": b.delivery_id });
        assert_eq!(call(&app, "POST", "/api/v1/dispatch", Some(cmd)).await.0, StatusCode::OK);
    }
    let now = h.state().tick;
    h.mutate(|s| s.advance_to(now + 15));
    let (mut cursor, mut events) = (0, Vec::new());
    let mut vehicles: Vec<String>;
    loop {
        let (status, page) = call(&app, "GET", &format!("/api/v1/events?cursor={cursor}&limit=7"), None).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(page["cursor"], cursor);
        let batch = page["events"].as_array().unwrap().clone();
        vehicles = serde_json::from_value(page["vehicles"].clone()).unwrap();
        if batch.is_empty() {
            break;
        }
        events.extend(batch.into_iter().map(|e| serde_json::from_value(e).unwrap()));
        cursor = page["next_cursor"].as_u64().unwrap() as usize;
    }
    let (_, state) = call(&app, "GET", "/api/v1/state", None).await;
    let served: delivery_dispatch::tsb::StateResponse = serde_json::from_value(state).unwrap();
    assert_eq!(StateView::from_log(&events, &vehicles), served.view());
}

#[tokio::test(flavor = "multi_thread")]
async fn concurrent_dispatches_are_serialized() {
    let h = handle("r1", 4);
    let app = router(App::new(vec![Arc::clone(&h)]));
    let b = step_until(&h, |b| b.ready && b.vehicle_ready);
    let cmd = json!({ "vehicle_id": b.vehicle_id, "delivery_id": b.delivery_id });
    let calls: Vec<_> = (0..8)
        .map(|_| {
            let (app, cmd) = (app.clone(), cmd.clone());
            tokio::spawn(async move { call(&app, "POST", "/api/v1/dispatch", Some(cmd)).await })
        })
        .collect();
    let mut codes: BTreeMap<u16, usize> = BTreeMap::new();
    for c in calls {
        *codes.entry(c.await.unwrap().0.as_u16()).or_default() += 1;
    }
    assert_eq!(codes, BTreeMap::from([(200, 1), (409, 7)]));
}

#[tokio::test(flavor = "multi_thread")]
async fn routing_and_input_errors() {
    let app = router(App::new(vec![handle("r1", 5), handle("r2", 6)]));
    let (status, body) = call(&app, "GET", "/api/v1/restaurants/r2/state", None).await;
    assert_eq!((status, body["restaurant_id"].clone()), (StatusCode::OK, json!("r2")));
    let (status, body) = call(&app, "GET", "/api/v1/restaurants/zz/plan", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["code"], "UNKNOWN_RESTAURANT");
    let (status, body) = call(&app, "POST", "/api/v1/dispatch", Some(json!({ "vehicle": "v1" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "BAD_REQUEST");
    let (status, _) = call(&app, "GET", "/api/v1/events?cursor=-1", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, body) = call(&app, "POST", "/api/v1/dispatch", Some(json!({ "vehicle_id": "v1", "delivery_id": "d9" }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"]["code"], "UNKNOWN_OBJECT");
    let (status, body) = call(&app, "GET", "/api/v1/kpis", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["report"]["totals"]["delivered"], 0);
}
