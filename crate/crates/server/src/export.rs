//! Offline dashboard export for one lecture.

use crate::config::Config;
use crate::store::ContentStore;
use rats_core::analytics::LectureDashboard;
use rats_core::{Actor, LectureId, Role, UserId};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// The operator acts with administrator rights.
const OPERATOR: Actor = Actor {
    id: UserId(0),
    role: Role::Administrator,
};

pub fn dashboard(config: &Config, lecture: LectureId) -> anyhow::Result<LectureDashboard> {
    let content = ContentStore::new(&config.content_dir);
    if !content.snapshot_path().exists() {
        anyhow::bail!("content store {} is not initialised; run migrate", content.dir().display());
    }
    let db = content.load(config.policy())?;
    Ok(db.lecture_dashboard(&OPERATOR, lecture)?)
}

/// Error-category rows as CSV, one line per classified RAT.
pub fn to_csv(d: &LectureDashboard) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &d.errors.rows {
        w.serialize(row)?;
    }
    if d.errors.rows.is_empty() {
        w.write_record([
            "rat_id",
            "n",
            "correct",
            "correct_fraction",
            "always_incorrect",
            "often_incorrect",
            "deceptive",
            "top_option",
            "top_share",
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn write(d: &LectureDashboard, format: Format, out: Option<&Path>) -> anyhow::Result<()> {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(d)? + "\n",
        Format::Csv => to_csv(d)?,
    };
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
