//! The live channel. Lecturers receive tallies; students send answers and
//! get acknowledgements, never aggregates.

use crate::api::live_ack;
use crate::auth::Auth;
use crate::error::{ApiError, ApiResult};
use crate::extract::ApiPath;
use crate::state::AppState;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use futures_util::{SinkExt, StreamExt};
use rats_core::{Actor, LiveSessionId, RatId, Response as Answer};
use serde::Deserialize;
use serde_json::{json, Value};
use std::time::Duration;

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum ClientMessage {
    Answer {
        session: LiveSessionId,
        rat: RatId,
        response: Answer,
    },
}

pub async fn upgrade(
    State(s): State<AppState>,
    Auth(actor): Auth,
    ApiPath(id): ApiPath<LiveSessionId>,
    ws: WebSocketUpgrade,
) -> ApiResult<Response> {
    let owner = {
        let db = s.db.read();
        let lecture = db.live_session(id)?.lecture;
        let owner = db.require_owner(&actor, lecture).is_ok();
        if !owner {
            db.require_member(&actor, lecture)?;
        }
        owner
    };
    Ok(ws.on_upgrade(move |socket| run(s, actor, id, owner, socket)))
}

fn error_message(e: &ApiError) -> Value {
    json!({ "type": "error", "error": e.body()["error"] })
}

fn handle(s: &AppState, actor: &Actor, id: LiveSessionId, text: &str) -> Value {
    let msg: ClientMessage = match serde_json::from_str(text) {
        Ok(m) => m,
        Err(e) => return error_message(&ApiError::BadRequest(e.to_string())),
    };
    let ClientMessage::Answer { session, rat, response } = msg;
    if session != id {
        return error_message(&ApiError::BadRequest("message targets another session".into()));
    }
    let now = s.now();
    match s.write(|db| db.submit_live(actor, id, rat, &response, now)) {
        Ok(_) => live_ack(id, rat),
        Err(e) => error_message(&e),
    }
}

async fn run(s: AppState, actor: Actor, id: LiveSessionId, owner: bool, socket: WebSocket) {
    let Ok(live) = s.read(|db| db.live_session(id).cloned()) else { return };
    let (mut tx, mut rx) = socket.split();
    let send = |v: Value| Message::Text(v.to_string().into());

    let mut seen = None;
    if owner {
        seen = Some(live.version());
        if tx.send(send(json!(live.stats()))).await.is_err() {
            return;
        }
    }
    let mut tick = tokio::time::interval(Duration::from_millis(s.config.stats_push_interval_ms));
    tick.tick().await;
    loop {
        tokio::select! {
            _ = tick.tick() => {
                let Ok(live) = s.read(|db| db.live_session(id).cloned()) else { return };
                let closed = !live.is_open();
                if owner {
                    let v = live.version();
                    if seen != Some(v) {
                        seen = Some(v);
                        if tx.send(send(json!(live.stats()))).await.is_err() {
                            return;
                        }
                    }
                } else if closed {
                    let _ = tx.send(send(json!({ "type": "closed", "session": id }))).await;
                }
                if closed {
                    let _ = tx.send(Message::Close(None)).await;
                    return;
                }
            }
            msg = rx.next() => {
                let reply = match msg {
                    Some(Ok(Message::Text(text))) if !owner => handle(&s, &actor, id, text.as_str()),
                    Some(Ok(Message::Text(_))) => error_message(&ApiError::Core(rats_core::Error::Forbidden)),
                    Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                    Some(Ok(_)) => continue,
                };
                if tx.send(send(reply)).await.is_err() {
                    return;
                }
            }
        }
    }
}
