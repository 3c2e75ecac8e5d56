#![allow(dead_code)]

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use chrono::{DateTime, TimeZone, Utc};
use rats_server::store::{ContentStore, LogEntry};
use rats_server::{api, seed, AppState, Clock, Config};
use serde_json::Value;
use std::path::{Path, PathBuf};
use tower::ServiceExt;

pub const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

pub const ADMIN: (&str, &str) = ("admin@uni.example", "admin-password-1");
pub const LECTURER: (&str, &str) = ("lecturer@uni.example", "lecturer-password-1");
pub const CREATOR1: (&str, &str) = ("creator1@uni.example", "creator-password-1");
pub const CREATOR2: (&str, &str) = ("creator2@uni.example", "creator-password-2");
pub const STUDENT1: (&str, &str) = ("student1@uni.example", "student-password-1");
pub const STUDENT2: (&str, &str) = ("student2@uni.example", "student-password-2");

/// Seeded fixture lecture.
pub const LECTURE: u64 = 1;

/// Two days after the second appointment of the fixture lecture.
pub fn start() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 4, 17, 9, 0, 0).unwrap()
}

pub fn config(dir: &Path) -> Config {
    Config {
        content_dir: dir.join("content"),
        user_dir: dir.join("users"),
        allowed_email_domains: vec!["uni.example".into()],
        hash_memory_kib: 64,
        hash_iterations: 1,
        stats_push_interval_ms: 50,
        ..Config::default()
    }
}

pub struct TestApp {
    pub dir: tempfile::TempDir,
    pub config: Config,
    pub state: AppState,
    pub router: Router,
    pub clock: Clock,
}

impl TestApp {
    pub fn empty() -> Self {
        Self::with(|_| {}, false)
    }

    pub fn seeded() -> Self {
        Self::with(|_| {}, true)
    }

    pub fn with(tweak: impl FnOnce(&mut Config), seeded: bool) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let mut config = config(dir.path());
        tweak(&mut config);
        if seeded {
            seed::seed(&config, Path::new(FIXTURES)).unwrap();
        }
        let clock = Clock::fixed(start());
        let state = AppState::open(config.clone(), clock.clone()).unwrap();
        let router = api::router(state.clone());
        Self {
            dir,
            config,
            state,
            router,
            clock,
        }
    }

    pub async fn call(&self, method: Method, path: &str, token: Option<&str>, body: Option<Value>) -> (StatusCode, Value) {
        let mut req = Request::builder().method(method).uri(path);
        if let Some(t) = token {
            req = req.header("authorization", format!("Bearer {t}"));
        }
        let req = match body {
            Some(b) => req
                .header("content-type", "application/json")
                .body(Body::from(b.to_string()))
                .unwrap(),
            None => req.body(Body::empty()).unwrap(),
        };
        let res = self.router.clone().oneshot(req).await.unwrap();
        let status = res.status();
        let bytes = axum::body::to_bytes(res.into_body(), usize::MAX).await.unwrap();
        let value = if bytes.is_empty() {
            Value::Null
        } else {
            serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
        };
        (status, value)
    }

    pub async fn get(&self, path: &str, token: &str) -> (StatusCode, Value) {
        self.call(Method::GET, path, Some(token), None).await
    }

    pub async fn post(&self, path: &str, token: &str, body: Value) -> (StatusCode, Value) {
        self.call(Method::POST, path, Some(token), Some(body)).await
    }

    pub async fn put(&self, path: &str, token: &str, body: Value) -> (StatusCode, Value) {
        self.call(Method::PUT, path, Some(token), Some(body)).await
    }

    pub async fn login(&self, (email, password): (&str, &str)) -> String {
        let (status, body) = self
            .call(
                Method::POST,
                "/auth/login",
                None,
                Some(serde_json::json!({ "email": email, "password": password })),
            )
            .await;
        assert_eq!(status, StatusCode::OK, "login {email}: {body}");
        body["token"].as_str().unwrap().to_owned()
    }

    pub fn content_store(&self) -> ContentStore {
        ContentStore::new(&self.config.content_dir)
    }

    pub fn log(&self) -> Vec<LogEntry> {
        self.content_store().read_log().unwrap()
    }

    pub fn content_dir(&self) -> PathBuf {
        self.config.content_dir.clone()
    }
}

pub fn code(body: &Value) -> &str {
    body["error"]["code"].as_str().unwrap_or("")
}
