use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, RawPathParams, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::session::{
    events_page, DispatchAccepted, EventsResponse, KpiResponse, PlanResponse, Session, StateResponse,
};
use crate::data::{compute_kpis, Dataset, SCHEMA_VERSION};
use crate::sim::{DispatchCommand, LogEvent, Rejection};

/// Largest page the event feed returns.
pub const MAX_EVENTS_PAGE: usize = 10_000;

struct Snapshot {
    state: StateResponse,
    plan: PlanResponse,
}

/// A session behind a single command lock. Reads go to the last published
/// snapshot and never wait for a running episode.
pub struct SessionHandle {
    restaurant_id: String,
    dataset: Arc<Dataset>,
    vehicles: Vec<String>,
    session: Mutex<Session>,
    snapshot: RwLock<Arc<Snapshot>>,
    journal: RwLock<Vec<LogEvent>>,
}

impl SessionHandle {
    pub fn new(session: Session) -> Arc<Self> {
        let snapshot = Snapshot {
            state: session.state(),
            plan: session.plan(),
        };
        Arc::new(SessionHandle {
            restaurant_id: session.restaurant_id().to_string(),
            dataset: Arc::clone(session.dataset()),
            vehicles: session.vehicle_ids(),
            journal: RwLock::new(session.log().to_vec()),
            snapshot: RwLock::new(Arc::new(snapshot)),
            session: Mutex::new(session),
        })
    }

    /// Applies `f` under the command lock, then publishes the new state.
    pub fn mutate<R>(&self, f: impl FnOnce(&mut Session) -> R) -> R {
        let mut s = self.session.lock().expect("session lock");
        let r = f(&mut s);
        {
            let mut journal = self.journal.write().expect("journal lock");
            let seen = journal.len();
            journal.extend_from_slice(&s.log()[seen..]);
        }
        let snapshot = Snapshot {
            state: s.state(),
            plan: s.plan(),
        };
        *self.snapshot.write().expect("snapshot lock") = Arc::new(snapshot);
        r
    }

    fn snapshot(&self) -> Arc<Snapshot> {
        Arc::clone(&self.snapshot.read().expect("snapshot lock"))
    }

    pub fn state(&self) -> StateResponse {
        self.snapshot().state.clone()
    }

    pub fn plan(&self) -> PlanResponse {
        self.snapshot().plan.clone()
    }

    pub fn events(&self, cursor: usize, limit: usize) -> EventsResponse {
        let journal = self.journal.read().expect("journal lock");
        events_page(&self.restaurant_id, self.vehicles.clone(), &journal, cursor, limit)
    }

    pub fn kpis(&self) -> KpiResponse {
        let journal = self.journal.read().expect("journal lock");
        KpiResponse {
            schema_version: SCHEMA_VERSION,
            restaurant_id: self.restaurant_id.clone(),
            tick: self.snapshot().state.tick,
            report: compute_kpis(&journal, &self.dataset),
        }
    }
}

pub struct App {
    sessions: BTreeMap<String, Arc<SessionHandle>>,
    default: String,
}

impl App {
    /// The first session also answers the un-prefixed `/api/v1/...` routes.
    pub fn new(sessions: Vec<Arc<SessionHandle>>) -> Arc<Self> {
        let default = sessions.first().map(|s| s.restaurant_id.clone()).unwrap_or_default();
        Arc::new(App {
            sessions: sessions.into_iter().map(|s| (s.restaurant_id.clone(), s)).collect(),
            default,
        })
    }

    pub fn session(&self, id: &str) -> Option<&Arc<SessionHandle>> {
        self.sessions.get(id)
    }
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.into(),
            message: message.into(),
        }
    }
}

impl From<Rejection> for ApiError {
    fn from(r: Rejection) -> Self {
        ApiError {
            status: StatusCode::CONFLICT,
            code: r.code.to_string(),
            message: r.message,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({
            "schema_version": SCHEMA_VERSION,
            "error": { "code": self.code, "message": self.message },
        });
        (self.status, Json(body)).into_response()
    }
}

fn session(app: &App, params: &RawPathParams) -> Result<Arc<SessionHandle>, ApiError> {
    let id = params
        .iter()
        .find(|(k, _)| *k == "restaurant_id")
        .map_or(app.default.as_str(), |(_, v)| v);
    app.session(id)
        .cloned()
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "UNKNOWN_RESTAURANT", format!("no restaurant `{id}`")))
}

async fn get_state(State(app): State<Arc<App>>, params: RawPathParams) -> Result<Json<StateResponse>, ApiError> {
    Ok(Json(session(&app, &params)?.state()))
}

async fn get_plan(State(app): State<Arc<App>>, params: RawPathParams) -> Result<Json<PlanResponse>, ApiError> {
    Ok(Json(session(&app, &params)?.plan()))
}

async fn get_kpis(State(app): State<Arc<App>>, params: RawPathParams) -> Result<Json<KpiResponse>, ApiError> {
    Ok(Json(session(&app, &params)?.kpis()))
}

#[derive(Debug, Default, Deserialize, Serialize)]
pub struct EventsQuery {
    #[serde(default)]
    pub cursor: usize,
    pub limit: Option<usize>,
}

async fn get_events(
    State(app): State<Arc<App>>,
    params: RawPathParams,
    query: Result<Query<EventsQuery>, QueryRejection>,
) -> Result<Json<EventsResponse>, ApiError> {
    let Query(q) = query.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "BAD_REQUEST", e.body_text()))?;
    let limit = q.limit.unwrap_or(1000).min(MAX_EVENTS_PAGE);
    Ok(Json(session(&app, &params)?.events(q.cursor, limit)))
}

async fn post_dispatch(
    State(app): State<Arc<App>>,
    params: RawPathParams,
    body: Result<Json<DispatchCommand>, JsonRejection>,
) -> Result<Json<DispatchAccepted>, ApiError> {
    let handle = session(&app, &params)?;
    let Json(cmd) = body.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "BAD_REQUEST", e.body_text()))?;
    // the episode triggered by a dispatch runs off the async executor
    let accepted = tokio::task::spawn_blocking(move || handle.mutate(|s| s.dispatch(&cmd)))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL", e.to_string()))??;
    Ok(Json(accepted))
}

pub fn router(app: Arc<App>) -> Router {
    let api = Router::new()
        .route("/state", get(get_state))
        .route("/plan", get(get_plan))
        .route("/kpis", get(get_kpis))
        .route("/events", get(get_events))
        .route("/dispatch", post(post_dispatch));
    Router::new()
        .nest("/api/v1/restaurants/{restaurant_id}", api.clone())
        .nest("/api/v1", api)
        .with_state(app)
}

/// Advances the session clock `speed` simulated seconds per real second,
/// starting at the first scheduled event.
pub fn spawn_replay(handle: Arc<SessionHandle>, speed: f64) -> tokio::task::JoinHandle<()> {
    tokio::spawn(async move {
        let first = handle.mutate(|s| {
            let t = s.next_event_tick().unwrap_or(0);
            s.advance_to(t);
            t
        });
        let started = Instant::now();
        let mut interval = tokio::time::interval(Duration::from_millis(200));
        loop {
            interval.tick().await;
            let target = first + (started.elapsed().as_secs_f64() * speed / 60.0) as i64;
            let h = Arc::clone(&handle);
            if tokio::task::spawn_blocking(move || h.mutate(|s| s.advance_to(target))).await.is_err() {
                return;
            }
        }
    })
}
