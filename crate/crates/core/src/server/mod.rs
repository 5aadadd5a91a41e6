//! HTTP resources and the `/ws` message channel over a shared [`Workspace`].

pub mod wire;

use std::future::Future;
use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::net::TcpListener;
use tokio::sync::broadcast;

use crate::context::parse_delta;
use crate::sync::{SyncError, Workspace, WorkspaceError};
use crate::transform::COORDINATOR_ROLE;
use wire::WireMessage;

pub use wire::{ElementState, Origin};

/// Header carrying the graph version a content document was generated from.
pub const VERSION_HEADER: &str = "x-graph-version";

#[derive(Clone)]
pub struct AppState {
    workspace: Arc<Workspace>,
    published: broadcast::Sender<u64>,
}

impl AppState {
    pub fn new(workspace: Arc<Workspace>) -> Self {
        let (published, _) = broadcast::channel(64);
        AppState { workspace, published }
    }

    pub fn workspace(&self) -> &Arc<Workspace> {
        &self.workspace
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/views", get(list_views))
        .route("/api/views/{id}/schema", get(view_schema))
        .route("/api/views/{id}/content", get(view_content))
        .route("/api/project/publish", post(publish))
        .route("/ws", get(ws_upgrade))
        .with_state(state)
}

/// Serves until `shutdown` resolves, then lets open requests finish.
pub async fn serve(
    listener: TcpListener,
    workspace: Arc<Workspace>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(AppState::new(workspace))).with_graceful_shutdown(shutdown).await
}

fn error_response(status: StatusCode, code: &str, message: impl Into<String>) -> Response {
    (status, Json(json!({ "code": code, "message": message.into() }))).into_response()
}

fn sync_error_response(e: SyncError) -> Response {
    let status = match e {
        SyncError::UnknownView(_) => StatusCode::NOT_FOUND,
        SyncError::UnknownRole(_) => StatusCode::BAD_REQUEST,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    };
    error_response(status, e.code(), e.to_string())
}

fn text(doc: String, version: Option<u64>) -> Response {
    let mut headers = HeaderMap::new();
    headers.insert(header::CONTENT_TYPE, HeaderValue::from_static("text/plain; charset=utf-8"));
    if let Some(v) = version {
        headers.insert(VERSION_HEADER, HeaderValue::from(v));
    }
    (headers, doc).into_response()
}

async fn health(State(s): State<AppState>) -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "graph_version": s.workspace.version() }))
}

#[derive(Serialize)]
struct ViewDescriptor {
    view_id: String,
    concepts: Vec<String>,
    schema: String,
    content: String,
}

async fn list_views(State(s): State<AppState>) -> Json<Vec<ViewDescriptor>> {
    Json(
        s.workspace
            .views()
            .iter()
            .map(|v| ViewDescriptor {
                view_id: v.view_id.clone(),
                concepts: v.concepts.iter().map(|c| c.name.clone()).collect(),
                schema: format!("/api/views/{}/schema", v.view_id),
                content: format!("/api/views/{}/content", v.view_id),
            })
            .collect(),
    )
}

async fn view_schema(State(s): State<AppState>, Path(id): Path<String>) -> Response {
    match s.workspace.schema(&id) {
        Some(schema) => text(schema.document.clone(), None),
        None => sync_error_response(SyncError::UnknownView(id)),
    }
}

#[derive(Deserialize)]
struct RoleQuery {
    role: Option<String>,
}

async fn view_content(State(s): State<AppState>, Path(id): Path<String>, Query(q): Query<RoleQuery>) -> Response {
    let role = q.role.as_deref().unwrap_or(COORDINATOR_ROLE);
    match s.workspace.content_document(&id, role) {
        Ok((version, doc)) => text(doc, Some(version)),
        Err(e) => sync_error_response(e),
    }
}

async fn publish(State(s): State<AppState>, body: String) -> Response {
    let delta = match parse_delta(&body) {
        Ok(d) => d,
        Err(e) => return error_response(StatusCode::BAD_REQUEST, "parse_error", e.to_string()),
    };
    let ws = Arc::clone(&s.workspace);
    let outcome = tokio::task::spawn_blocking(move || ws.publish(&delta)).await;
    match outcome {
        Ok(Ok(version)) => {
            tracing::info!(version, "published");
            // No receivers just means no session is connected.
            let _ = s.published.send(version);
            Json(json!({ "graph_version": version })).into_response()
        }
        Ok(Err(WorkspaceError::Publish(e))) => {
            error_response(StatusCode::UNPROCESSABLE_ENTITY, "rejected", e.to_string())
        }
        Ok(Err(e)) => error_response(StatusCode::UNPROCESSABLE_ENTITY, "rejected", e.to_string()),
        Err(e) => error_response(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()),
    }
}

async fn ws_upgrade(State(s): State<AppState>, upgrade: WebSocketUpgrade) -> Response {
    upgrade.on_upgrade(move |socket| session_loop(s, socket))
}

/// One connection, one session. Inbound frames and publish notifications
/// are handled one at a time, so replies never interleave with a refresh.
async fn session_loop(s: AppState, mut socket: WebSocket) {
    let mut published = s.published.subscribe();
    let mut session: Option<u64> = None;
    loop {
        let out = tokio::select! {
            frame = socket.recv() => match frame {
                Some(Ok(Message::Text(t))) => handle_frame(&s.workspace, &mut session, t.as_str()),
                Some(Ok(Message::Binary(_))) => vec![WireMessage::error("malformed", "binary frames are not supported")],
                Some(Ok(_)) => continue,
                Some(Err(_)) | None => break,
            },
            v = published.recv() => match v {
                Ok(_) | Err(broadcast::error::RecvError::Lagged(_)) => match session {
                    Some(id) => refresh(&s.workspace, id),
                    None => continue,
                },
                Err(broadcast::error::RecvError::Closed) => break,
            },
        };
        for m in out {
            if socket.send(Message::Text(m.encode().into())).await.is_err() {
                break;
            }
        }
    }
    if let Some(id) = session {
        s.workspace.close_session(id);
    }
}

fn contents(ws: &Workspace, id: u64) -> Vec<WireMessage> {
    match ws.session_snapshot(id) {
        Ok(snap) => snap
            .contents
            .iter()
            .zip(snap.documents)
            .map(|(c, document)| WireMessage::Content {
                view_id: c.view_id.clone(),
                document,
                graph_version: snap.graph_version,
            })
            .collect(),
        Err(e) => vec![WireMessage::error(e.code(), e.to_string())],
    }
}

fn refresh(ws: &Workspace, id: u64) -> Vec<WireMessage> {
    let mut out = vec![WireMessage::Refresh { graph_version: ws.version() }];
    out.extend(contents(ws, id));
    out
}

/// Replies to one inbound frame. A hello or arrangement change is
/// acknowledged, then followed by the content of every arranged view.
pub fn handle_frame(ws: &Workspace, session: &mut Option<u64>, text: &str) -> Vec<WireMessage> {
    let msg = match WireMessage::decode(text) {
        Ok(m) => m,
        Err(e) => return vec![e],
    };
    let fail = |e: SyncError| vec![WireMessage::error(e.code(), e.to_string())];
    match msg {
        WireMessage::Hello { role, arrangement } => {
            if let Some(old) = session.take() {
                ws.close_session(old);
            }
            match ws.open_session(&role, arrangement.clone()) {
                Ok(id) => {
                    *session = Some(id);
                    let mut out = vec![WireMessage::Arrangement { views: arrangement }];
                    out.extend(contents(ws, id));
                    out
                }
                Err(e) => fail(e),
            }
        }
        WireMessage::Arrangement { views } => {
            let Some(id) = *session else {
                return vec![WireMessage::error("no_session", "send hello first")];
            };
            match ws.register_arrangement(id, views.clone()) {
                Ok(()) => {
                    let mut out = vec![WireMessage::Arrangement { views }];
                    out.extend(contents(ws, id));
                    out
                }
                Err(e) => fail(e),
            }
        }
        WireMessage::Select { view_id, element_key, graph_version } => {
            let Some(id) = *session else {
                return vec![WireMessage::error("no_session", "send hello first")];
            };
            match ws.select(id, &view_id, &element_key, graph_version) {
                Ok(d) => vec![WireMessage::from_directive(&d)],
                Err(SyncError::Stale { current, .. }) => vec![WireMessage::Refresh { graph_version: current }],
                Err(e) => fail(e),
            }
        }
        other => vec![WireMessage::error(
            "unexpected_kind",
            format!("`{}` messages are only sent by the server", other.kind()),
        )],
    }
}
