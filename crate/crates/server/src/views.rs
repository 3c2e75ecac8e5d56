//! Response shapes that differ from the stored entities.

use rats_core::assessment::SheetSession;
use rats_core::model::{QuestionKind, RichText};
use rats_core::scheduling::Lecture;
use rats_core::{ConceptId, ContentDb, LectureId, OptionId, Rat, RatId, Role, SessionId, SheetId, TopicId, UserId};
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Debug, Clone, Serialize)]
pub struct StudentOption {
    pub id: OptionId,
    pub text: RichText,
}

/// A RAT as a learner sees it before answering: no keys, no feedback.
#[derive(Debug, Clone, Serialize)]
pub struct StudentRat {
    pub id: RatId,
    pub question: RichText,
    pub kind: QuestionKind,
    pub options: Vec<StudentOption>,
    pub topics: BTreeSet<TopicId>,
    pub concepts: BTreeSet<ConceptId>,
    pub is_cross_lecture: bool,
}

impl From<&Rat> for StudentRat {
    fn from(rat: &Rat) -> Self {
        let c = &rat.content;
        Self {
            id: rat.id,
            question: c.question.clone(),
            kind: c.kind,
            options: c
                .options
                .iter()
                .map(|o| StudentOption {
                    id: o.id,
                    text: o.text.clone(),
                })
                .collect(),
            topics: c.topics.clone(),
            concepts: c.concepts.clone(),
            is_cross_lecture: c.is_cross_lecture,
        }
    }
}

/// Students get the stripped view, everyone else the full item.
pub fn rat_view(rat: &Rat, role: Role) -> serde_json::Value {
    if role == Role::Student {
        serde_json::to_value(StudentRat::from(rat))
    } else {
        serde_json::to_value(rat)
    }
    .unwrap_or_default()
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionView {
    pub id: SessionId,
    pub sheet: Option<SheetId>,
    pub lecture: LectureId,
    pub rats: Vec<RatId>,
    pub cursor: usize,
    pub completed: bool,
    pub current: Option<StudentRat>,
}

impl SessionView {
    pub fn new(s: &SheetSession, db: &ContentDb) -> Self {
        Self {
            id: s.id,
            sheet: s.sheet,
            lecture: s.lecture,
            rats: s.rats.clone(),
            cursor: s.cursor,
            completed: s.completed,
            current: s.current().and_then(|id| db.rats.get(&id)).map(StudentRat::from),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LectureView {
    pub id: LectureId,
    pub name: String,
    pub audience: String,
    pub term: String,
    pub appointment_dates: Vec<chrono::NaiveDate>,
    pub is_member: bool,
    pub is_owner: bool,
    /// Owners only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub join_code: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lecturers: Option<BTreeSet<UserId>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<usize>,
}

impl LectureView {
    pub fn new(l: &Lecture, actor: &rats_core::Actor) -> Self {
        let owner = (actor.role >= Role::Lecturer && l.lecturers.contains(&actor.id)) || actor.role == Role::Administrator;
        Self {
            id: l.id,
            name: l.name.clone(),
            audience: l.audience.clone(),
            term: l.term.clone(),
            appointment_dates: l.appointment_dates.clone(),
            is_member: l.members.contains(&actor.id),
            is_owner: owner,
            join_code: owner.then(|| l.join_code.clone()),
            lecturers: owner.then(|| l.lecturers.clone()),
            members: owner.then_some(l.members.len()),
        }
    }
}
