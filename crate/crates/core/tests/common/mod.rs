#![allow(dead_code)]

use chrono::{DateTime, NaiveDate, TimeZone, Utc};
use rats_core::model::{AnswerOption, QuestionKind, RatContent, RichText};
use rats_core::scheduling::LectureDraft;
use rats_core::{Actor, ContentDb, LectureId, Policy, RatId, Role};
use std::collections::BTreeSet;

pub const LECTURER: Actor = Actor { id: rats_core::UserId(1), role: Role::Lecturer };
pub const AUTHOR: Actor = Actor { id: rats_core::UserId(2), role: Role::RatCreator };
pub const REVIEWERS: [Actor; 3] = [
    Actor { id: rats_core::UserId(3), role: Role::RatCreator },
    Actor { id: rats_core::UserId(4), role: Role::RatCreator },
    Actor { id: rats_core::UserId(5), role: Role::Lecturer },
];

pub fn student(n: u64) -> Actor {
    Actor::new((1000 + n).into(), Role::Student)
}

pub fn now() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 4, 2, 10, 0, 0).unwrap()
}

pub fn day(n: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(2024, 4, 1).unwrap() + chrono::Days::new(n as u64)
}

/// Multiple choice RAT with options 1 (correct), 2 and 3.
pub fn mc(topics: &[&str], concepts: &[&str], lectures: &[LectureId], criteria: &[u32]) -> RatContent {
    let option = |id: u64, correct: bool| AnswerOption {
        id: id.into(),
        text: RichText::new(format!("option {id}")),
        is_correct: correct,
        feedback: RichText::new(format!("feedback for option {id}")),
    };
    RatContent {
        question: "What is the value?".into(),
        kind: QuestionKind::MultipleChoice,
        options: vec![option(1, true), option(2, false), option(3, false)],
        accepted_answers: vec![],
        topics: topics.iter().map(|t| (*t).into()).collect(),
        concepts: concepts.iter().map(|c| (*c).into()).collect(),
        lectures: lectures.iter().copied().collect(),
        criteria: criteria.iter().copied().collect(),
        is_cross_lecture: false,
        general_feedback: RichText::default(),
    }
}

pub fn db(policy: Policy) -> ContentDb {
    let mut db = ContentDb::new(policy);
    for (topic, concept) in [("t0", "c0"), ("t0", "c1"), ("t1", "c2"), ("t1", "c3"), ("t2", "c4")] {
        db.taxonomy.add_concept(topic.into(), concept.into());
    }
    db
}

pub fn lecture(db: &mut ContentDb, dates: &[NaiveDate]) -> LectureId {
    db.create_lecture(
        &LECTURER,
        LectureDraft {
            name: "Linear algebra".into(),
            audience: "first term".into(),
            appointment_dates: dates.to_vec(),
            term: "SS24".into(),
            join_code: "secret".into(),
        },
    )
    .unwrap()
}

/// Creates and publishes a RAT with the default two reviewers.
pub fn published(db: &mut ContentDb, content: RatContent) -> RatId {
    let id = db.create_rat(&AUTHOR, content, now()).unwrap();
    for r in REVIEWERS.iter().take(db.policy.rat_approval_threshold) {
        db.approve(r, id).unwrap();
    }
    id
}

pub fn set<T: Ord + Clone>(items: &[T]) -> BTreeSet<T> {
    items.iter().cloned().collect()
}

/// x-mark matrix of the criteria catalog. Columns: data
/// literacy, representational competence, mathematical literacy.
pub const MATRIX: [&str; 21] = [
    "x..", "x..", "xx.", "x..", "x..", "..x", "xxx", "..x", "..x", "..x", "..x",
    "x.x", "x.x", "..x", ".x.", ".x.", ".x.", ".x.", ".x.", ".x.", ".x.",
];

/// Marks of criterion `id` as (dl, rc, ml) in 0/1.
pub fn marks(id: u32) -> [u64; 3] {
    let row = MATRIX[id as usize - 1].as_bytes();
    [0, 1, 2].map(|i| (row[i] == b'x') as u64)
}
