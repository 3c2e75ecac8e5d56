//! Bearer-token authentication, the account endpoints and the request log.

use crate::error::{ApiError, ApiResult, AuthError};
use crate::extract::ApiJson;
use crate::state::AppState;
use crate::store::LogEntry;
use crate::users::{hash_password, normalize_email, verify_password};
use axum::extract::{FromRequestParts, MatchedPath, Request, State};
use axum::http::request::Parts;
use axum::http::{header, Method, StatusCode};
use axum::middleware::Next;
use axum::response::{IntoResponse, Response};
use axum::Json;
use rats_core::{Actor, Notification, Role, UserId};
use serde::Deserialize;
use serde_json::{json, Value};

/// The authenticated caller.
#[derive(Debug, Clone, Copy)]
pub struct Auth(pub Actor);

fn bearer(parts: &Parts) -> Option<String> {
    if let Some(value) = parts.headers.get(header::AUTHORIZATION) {
        let value = value.to_str().ok()?;
        let (scheme, token) = value.split_once(' ')?;
        return scheme.eq_ignore_ascii_case("bearer").then(|| token.trim().to_owned());
    }
    // browsers cannot set headers on a websocket upgrade
    let query = parts.uri.query()?;
    query.split('&').find_map(|pair| pair.strip_prefix("token=").map(str::to_owned))
}

fn resolve(state: &AppState, parts: &Parts) -> Option<Actor> {
    let token = bearer(parts)?;
    let users = state.users.lock();
    let user = users.authenticate(&token)?;
    Some(Actor::new(user.id, user.role))
}

impl FromRequestParts<AppState> for Auth {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, Self::Rejection> {
        resolve(state, parts)
            .map(Auth)
            .ok_or(ApiError::Auth(AuthError::Unauthenticated))
    }
}

/// Set by handlers whose caller is not known from the token (login, signup).
#[derive(Debug, Clone, Copy)]
pub struct LoggedUser(pub UserId);

/// Set by handlers that create an entity, so the log names it.
#[derive(Debug, Clone)]
pub struct LogSubject(pub String);

/// Writes one log entry per mutating request.
pub async fn log_mutations(State(state): State<AppState>, request: Request, next: Next) -> Response {
    let method = request.method().clone();
    if !matches!(method, Method::POST | Method::PUT | Method::DELETE | Method::PATCH) {
        return next.run(request).await;
    }
    let (parts, body) = request.into_parts();
    let user = resolve(&state, &parts).map(|a| a.id);
    let path = parts
        .extensions
        .get::<MatchedPath>()
        .map(|p| p.as_str().to_owned())
        .unwrap_or_else(|| parts.uri.path().to_owned());
    let path_subject = parts
        .uri
        .path()
        .split('/')
        .rev()
        .find(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
        .map(str::to_owned);
    let response = next.run(Request::from_parts(parts, body)).await;
    let entry = LogEntry {
        at: state.now(),
        user: response.extensions().get::<LoggedUser>().map(|u| u.0).or(user),
        action: format!("{method} {path}"),
        subject: response
            .extensions()
            .get::<LogSubject>()
            .map(|s| s.0.clone())
            .or(path_subject),
        status: response.status().as_u16(),
    };
    state.log(&entry);
    response
}

#[derive(Debug, Deserialize)]
pub struct Credentials {
    pub email: String,
    pub password: String,
}

pub async fn signup(State(state): State<AppState>, ApiJson(c): ApiJson<Credentials>) -> ApiResult<Response> {
    let email = normalize_email(&c.email)?;
    if !state.config.domain_allowed(&email) {
        return Err(AuthError::DomainNotAllowed.into());
    }
    if c.password.chars().count() < state.config.min_password_len {
        return Err(AuthError::WeakPassword(state.config.min_password_len).into());
    }
    let hash = hash_password(&c.password, state.hash_cost())?;
    let now = state.now();
    let verify = state.config.require_email_verification;
    let (id, token) = {
        let mut users = state.users.lock();
        let id = users.insert(email, hash, Role::Student, !verify, now)?;
        let token = verify.then(|| users.issue_verification(id));
        users.save()?;
        (id, token)
    };
    if let Some(token) = token {
        state.notify(Notification {
            to: id,
            subject: "Confirm your email address".into(),
            body: format!("Your verification token: {token}"),
            created_at: now,
        })?;
    }
    let mut response = (
        StatusCode::CREATED,
        Json(json!({ "user": id, "verification_required": verify })),
    )
        .into_response();
    response.extensions_mut().insert(LoggedUser(id));
    response.extensions_mut().insert(LogSubject(id.to_string()));
    Ok(response)
}

#[derive(Debug, Deserialize)]
pub struct VerifyBody {
    pub token: String,
}

pub async fn verify(State(state): State<AppState>, ApiJson(b): ApiJson<VerifyBody>) -> ApiResult<Response> {
    let id = {
        let mut users = state.users.lock();
        let id = users.verify(&b.token)?;
        users.save()?;
        id
    };
    let mut response = Json(json!({ "user": id, "verified": true })).into_response();
    response.extensions_mut().insert(LoggedUser(id));
    Ok(response)
}

pub async fn login(State(state): State<AppState>, ApiJson(c): ApiJson<Credentials>) -> ApiResult<Response> {
    let email = normalize_email(&c.email).map_err(|_| AuthError::BadCredentials)?;
    let record = state.users.lock().by_email(&email).cloned();
    // hash anyway so timing does not reveal which emails exist
    let hash = record
        .as_ref()
        .map(|r| r.password_hash.clone())
        .unwrap_or_else(|| "$argon2id$v=19$m=8,t=1,p=1$c2FsdHNhbHQ$AAAAAAAAAAAAAAAAAAAAAA".into());
    let ok = verify_password(&c.password, &hash);
    let record = match record {
        Some(r) if ok => r,
        _ => return Err(AuthError::BadCredentials.into()),
    };
    if state.config.require_email_verification && !record.email_verified {
        return Err(AuthError::Unverified.into());
    }
    let token = {
        let mut users = state.users.lock();
        let token = users.issue_token(record.id, state.now());
        users.save()?;
        token
    };
    let mut response = Json(json!({ "token": token, "user": record.id, "role": record.role })).into_response();
    response.extensions_mut().insert(LoggedUser(record.id));
    Ok(response)
}

#[derive(Debug, Deserialize)]
pub struct PasswordBody {
    pub old_password: String,
    pub new_password: String,
}

/// Revokes every token of the user, including the one used here.
pub async fn change_password(
    State(state): State<AppState>,
    Auth(actor): Auth,
    ApiJson(b): ApiJson<PasswordBody>,
) -> ApiResult<Json<Value>> {
    let current = state
        .users
        .lock()
        .get(actor.id)
        .map(|u| u.password_hash.clone())
        .ok_or(AuthError::Unauthenticated)?;
    if !verify_password(&b.old_password, &current) {
        return Err(AuthError::BadCredentials.into());
    }
    if b.new_password.chars().count() < state.config.min_password_len {
        return Err(AuthError::WeakPassword(state.config.min_password_len).into());
    }
    let hash = hash_password(&b.new_password, state.hash_cost())?;
    let mut users = state.users.lock();
    users.set_password_hash(actor.id, hash);
    let revoked = users.revoke_all(actor.id);
    users.save()?;
    Ok(Json(json!({ "revoked_tokens": revoked })))
}

pub async fn me(State(state): State<AppState>, Auth(actor): Auth) -> ApiResult<Json<Value>> {
    let users = state.users.lock();
    let u = users.get(actor.id).ok_or(AuthError::Unauthenticated)?;
    Ok(Json(json!({
        "id": u.id,
        "email": u.email,
        "role": u.role,
        "email_verified": u.email_verified,
    })))
}

/// Deletes the identity. Attempts, RATs and log entries stay under the
/// now orphaned pseudonym.
pub async fn delete_me(State(state): State<AppState>, Auth(actor): Auth) -> ApiResult<StatusCode> {
    let mut users = state.users.lock();
    users.delete(actor.id);
    users.save()?;
    Ok(StatusCode::NO_CONTENT)
}
