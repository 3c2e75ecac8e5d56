//! On-disk layout of the two stores.
//!
//! The content store directory holds the content snapshot, the request log
//! and the notification outbox; none of them name a person other than by
//! pseudonym. The user store directory holds the only copy of emails and
//! password hashes.

use chrono::{DateTime, Utc};
use rats_core::{ContentDb, Notification, Policy, UserId};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

/// Writes through a temporary file so readers never see a torn file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<Option<T>> {
    match fs::read(path) {
        Ok(bytes) => Ok(Some(serde_json::from_slice(&bytes).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn append_lines<T: Serialize>(path: &Path, items: &[T]) -> std::io::Result<()> {
    if items.is_empty() {
        return Ok(());
    }
    let mut buf = Vec::new();
    for item in items {
        serde_json::to_writer(&mut buf, item)?;
        buf.push(b'\n');
    }
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(&buf)
}

fn read_lines<T: DeserializeOwned>(path: &Path) -> anyhow::Result<Vec<T>> {
    let f = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut out = Vec::new();
    for line in BufReader::new(f).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// One request-level audit record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub at: DateTime<Utc>,
    pub user: Option<UserId>,
    pub action: String,
    pub subject: Option<String>,
    pub status: u16,
}

/// Action code of a successful login; feeds lottery eligibility.
pub const LOGIN_ACTION: &str = "POST /auth/login";

#[derive(Debug, Clone)]
pub struct ContentStore {
    dir: PathBuf,
}

impl ContentStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn snapshot_path(&self) -> PathBuf {
        self.dir.join("content.json")
    }

    pub fn log_path(&self) -> PathBuf {
        self.dir.join("log.jsonl")
    }

    pub fn outbox_path(&self) -> PathBuf {
        self.dir.join("outbox.jsonl")
    }

    /// Creates the directory, schema description and an empty snapshot.
    /// Existing data is left alone.
    pub fn migrate(&self) -> anyhow::Result<bool> {
        fs::create_dir_all(&self.dir)?;
        let schema = serde_json::json!({
            "store": "content",
            "version": SCHEMA_VERSION,
            "files": {
                "content.json": collections(&serde_json::to_value(ContentDb::default())?),
                "log.jsonl": ["at", "user", "action", "subject", "status"],
                "outbox.jsonl": ["to", "subject", "body", "created_at"],
            }
        });
        write_atomic(&self.dir.join("schema.json"), &serde_json::to_vec_pretty(&schema)?)?;
        if self.snapshot_path().exists() {
            return Ok(false);
        }
        self.save(&ContentDb::default())?;
        Ok(true)
    }

    pub fn load(&self, policy: Policy) -> anyhow::Result<ContentDb> {
        let mut db = read_json::<ContentDb>(&self.snapshot_path())?.unwrap_or_default();
        db.policy = policy;
        Ok(db)
    }

    pub fn save(&self, db: &ContentDb) -> anyhow::Result<()> {
        write_atomic(&self.snapshot_path(), &serde_json::to_vec(db)?)?;
        Ok(())
    }

    pub fn append_log(&self, entry: &LogEntry) -> std::io::Result<()> {
        append_lines(&self.log_path(), std::slice::from_ref(entry))
    }

    pub fn read_log(&self) -> anyhow::Result<Vec<LogEntry>> {
        read_lines(&self.log_path())
    }

    pub fn append_outbox(&self, notifications: &[Notification]) -> std::io::Result<()> {
        append_lines(&self.outbox_path(), notifications)
    }

    pub fn read_outbox(&self) -> anyhow::Result<Vec<Notification>> {
        read_lines(&self.outbox_path())
    }
}

fn collections(value: &serde_json::Value) -> Vec<String> {
    value
        .as_object()
        .map(|m| m.keys().cloned().collect())
        .unwrap_or_default()
}
