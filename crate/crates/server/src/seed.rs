//! Loads demo fixtures: users, taxonomy, optional catalog, lectures and
//! RATs. Re-running adds nothing that already exists.

use crate::config::Config;
use crate::store::ContentStore;
use crate::users::{hash_password, normalize_email, HashCost, UserStore};
use anyhow::{anyhow, bail, Context};
use chrono::{NaiveDate, Utc};
use rats_core::competence::CriterionCatalog;
use rats_core::scheduling::{LectureDraft, SyllabusEntry};
use rats_core::{Actor, ConceptId, ContentDb, LectureId, RatContent, Role, TopicId, UserId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Deserialize)]
pub struct FixtureUser {
    pub email: String,
    pub password: String,
    pub role: Role,
}

#[derive(Debug, Deserialize)]
pub struct FixtureTaxonomy {
    pub topics: BTreeMap<TopicId, Vec<ConceptId>>,
}

#[derive(Debug, Deserialize)]
pub struct FixtureLecture {
    pub name: String,
    #[serde(default)]
    pub audience: String,
    #[serde(default)]
    pub term: String,
    pub appointment_dates: Vec<NaiveDate>,
    pub join_code: String,
    pub lecturer: String,
    #[serde(default)]
    pub members: Vec<String>,
    #[serde(default)]
    pub syllabus: Vec<SyllabusEntry>,
}

#[derive(Debug, Deserialize)]
pub struct FixtureRat {
    pub author: String,
    #[serde(default)]
    pub lecture_names: Vec<String>,
    #[serde(default)]
    pub approved_by: Vec<String>,
    #[serde(flatten)]
    pub content: RatContent,
}

#[derive(Debug, Default, Clone, PartialEq, Eq, Serialize)]
pub struct SeedReport {
    pub users_created: usize,
    pub users_existing: usize,
    pub concepts: usize,
    pub lectures_created: usize,
    pub lectures_existing: usize,
    pub rats_created: usize,
    pub rats_existing: usize,
    pub rats_published: usize,
}

fn load<T: serde::de::DeserializeOwned>(dir: &Path, name: &str) -> anyhow::Result<Option<T>> {
    let path = dir.join(name);
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .map(Some)
        .with_context(|| format!("parsing {}", path.display()))
}

fn actor(users: &UserStore, email: &str) -> anyhow::Result<Actor> {
    let email = normalize_email(email).map_err(|e| anyhow!("{email}: {e}"))?;
    let u = users.by_email(&email).ok_or_else(|| anyhow!("fixture refers to unknown user {email}"))?;
    Ok(Actor::new(u.id, u.role))
}

/// Applies the fixtures in `dir` to both stores.
pub fn seed(config: &Config, dir: &Path) -> anyhow::Result<SeedReport> {
    if !dir.is_dir() {
        bail!("fixture directory {} does not exist", dir.display());
    }
    let content = ContentStore::new(&config.content_dir);
    content.migrate()?;
    UserStore::migrate(&config.user_dir)?;
    let mut db = content.load(config.policy())?;
    let mut users = UserStore::open(&config.user_dir)?;
    let cost = HashCost {
        memory_kib: config.hash_memory_kib,
        iterations: config.hash_iterations,
    };
    let report = apply(&mut db, &mut users, dir, cost)?;
    users.save()?;
    content.save(&db)?;
    content.append_outbox(&db.take_notifications())?;
    Ok(report)
}

pub fn apply(db: &mut ContentDb, users: &mut UserStore, dir: &Path, cost: HashCost) -> anyhow::Result<SeedReport> {
    let mut report = SeedReport::default();
    let now = Utc::now();

    for u in load::<Vec<FixtureUser>>(dir, "users.json")?.unwrap_or_default() {
        let email = normalize_email(&u.email).map_err(|e| anyhow!("{}: {e}", u.email))?;
        if users.by_email(&email).is_some() {
            report.users_existing += 1;
            continue;
        }
        let hash = hash_password(&u.password, cost)?;
        users.insert(email, hash, u.role, true, now).map_err(|e| anyhow!("{e}"))?;
        report.users_created += 1;
    }

    if let Some(path) = Some(dir.join("catalog.json")).filter(|p| p.exists()) {
        let text = std::fs::read_to_string(&path)?;
        db.catalog = CriterionCatalog::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    }

    if let Some(t) = load::<FixtureTaxonomy>(dir, "taxonomy.json")? {
        for (topic, concepts) in t.topics {
            for c in concepts {
                db.taxonomy.add_concept(topic.clone(), c);
            }
        }
    }
    report.concepts = db.taxonomy.concepts.len();

    let mut lecture_ids: BTreeMap<String, LectureId> = db.lectures.values().map(|l| (l.name.clone(), l.id)).collect();
    for l in load::<Vec<FixtureLecture>>(dir, "lectures.json")?.unwrap_or_default() {
        let lecturer = actor(users, &l.lecturer)?;
        let id = match lecture_ids.get(&l.name) {
            Some(&id) => {
                report.lectures_existing += 1;
                id
            }
            None => {
                let id = db
                    .create_lecture(
                        &lecturer,
                        LectureDraft {
                            name: l.name.clone(),
                            audience: l.audience,
                            appointment_dates: l.appointment_dates,
                            term: l.term,
                            join_code: l.join_code.clone(),
                        },
                    )
                    .with_context(|| format!("lecture {}", l.name))?;
                if !l.syllabus.is_empty() {
                    db.set_syllabus(&lecturer, id, l.syllabus)
                        .with_context(|| format!("syllabus of {}", l.name))?;
                }
                lecture_ids.insert(l.name.clone(), id);
                report.lectures_created += 1;
                id
            }
        };
        for m in &l.members {
            let member = actor(users, m)?;
            db.join_lecture(&member, id, &l.join_code)?;
        }
    }

    for r in load::<Vec<FixtureRat>>(dir, "rats.json")?.unwrap_or_default() {
        let author = actor(users, &r.author)?;
        let mut content = r.content;
        for name in &r.lecture_names {
            let id = lecture_ids.get(name).ok_or_else(|| anyhow!("RAT refers to unknown lecture {name}"))?;
            content.lectures.insert(*id);
        }
        let exists = db
            .rats
            .values()
            .any(|x| x.author == author.id && x.content.question == content.question);
        if exists {
            report.rats_existing += 1;
            continue;
        }
        let question = content.question.as_str().to_owned();
        let id = db
            .create_rat(&author, content, now)
            .with_context(|| format!("RAT {question:?}"))?;
        for email in &r.approved_by {
            db.approve(&actor(users, email)?, id)
                .with_context(|| format!("approving RAT {question:?}"))?;
        }
        report.rats_created += 1;
        if db.rats[&id].is_published() {
            report.rats_published += 1;
        }
    }
    Ok(report)
}

/// Convenience for tests and tools.
pub fn user_id(users: &UserStore, email: &str) -> Option<UserId> {
    users.by_email(&normalize_email(email).ok()?).map(|u| u.id)
}
