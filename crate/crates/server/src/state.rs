use crate::config::Config;
use crate::error::{ApiError, ApiResult};
use crate::store::{ContentStore, LogEntry};
use crate::users::{HashCost, UserStore};
use chrono::{DateTime, Duration, Utc};
use parking_lot::{Mutex, RwLock};
use rats_core::ContentDb;
use std::sync::Arc;

/// Wall clock, or a settable one for tests.
#[derive(Debug, Clone, Default)]
pub enum Clock {
    #[default]
    System,
    Fixed(Arc<Mutex<DateTime<Utc>>>),
}

impl Clock {
    pub fn fixed(at: DateTime<Utc>) -> Self {
        Clock::Fixed(Arc::new(Mutex::new(at)))
    }

    pub fn now(&self) -> DateTime<Utc> {
        match self {
            Clock::System => Utc::now(),
            Clock::Fixed(t) => *t.lock(),
        }
    }

    pub fn set(&self, at: DateTime<Utc>) {
        if let Clock::Fixed(t) = self {
            *t.lock() = at;
        }
    }

    pub fn advance(&self, by: Duration) {
        if let Clock::Fixed(t) = self {
            *t.lock() += by;
        }
    }
}

pub struct Inner {
    pub config: Config,
    pub content: ContentStore,
    pub db: RwLock<ContentDb>,
    pub users: Mutex<UserStore>,
    pub clock: Clock,
    // serializes log appends
    log_lock: Mutex<()>,
}

#[derive(Clone)]
pub struct AppState(pub Arc<Inner>);

impl std::ops::Deref for AppState {
    type Target = Inner;

    fn deref(&self) -> &Inner {
        &self.0
    }
}

impl AppState {
    /// Creates missing stores and loads both.
    pub fn open(config: Config, clock: Clock) -> anyhow::Result<Self> {
        let content = ContentStore::new(&config.content_dir);
        content.migrate()?;
        UserStore::migrate(&config.user_dir)?;
        let db = content.load(config.policy())?;
        let users = UserStore::open(&config.user_dir)?;
        Ok(Self(Arc::new(Inner {
            content,
            db: RwLock::new(db),
            users: Mutex::new(users),
            clock,
            config,
            log_lock: Mutex::new(()),
        })))
    }

    pub fn now(&self) -> DateTime<Utc> {
        self.clock.now()
    }

    pub fn hash_cost(&self) -> HashCost {
        HashCost {
            memory_kib: self.config.hash_memory_kib,
            iterations: self.config.hash_iterations,
        }
    }

    pub fn read<T>(&self, f: impl FnOnce(&ContentDb) -> rats_core::Result<T>) -> ApiResult<T> {
        Ok(f(&self.db.read())?)
    }

    /// Runs one transaction. On success the snapshot is persisted before the
    /// lock is released; notifications go to the outbox either way.
    pub fn write<T>(&self, f: impl FnOnce(&mut ContentDb) -> rats_core::Result<T>) -> ApiResult<T> {
        let mut db = self.db.write();
        let out = f(&mut db);
        if out.is_ok() {
            self.content.save(&db).map_err(ApiError::Internal)?;
        }
        let notes = db.take_notifications();
        self.content
            .append_outbox(&notes)
            .map_err(|e| ApiError::Internal(e.into()))?;
        Ok(out?)
    }

    pub fn log(&self, entry: &LogEntry) {
        let _guard = self.log_lock.lock();
        if let Err(e) = self.content.append_log(entry) {
            tracing::error!(error = %e, "cannot append log entry");
        }
    }

    /// Adds a notification outside a domain transaction.
    pub fn notify(&self, notification: rats_core::Notification) -> ApiResult<()> {
        let _guard = self.db.write();
        self.content
            .append_outbox(std::slice::from_ref(&notification))
            .map_err(|e| ApiError::Internal(e.into()))
    }
}
