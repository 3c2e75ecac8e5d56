//! The content store: every non-personal collection the platform keeps.
//!
//! Domain operations are implemented as methods on [`ContentDb`] in the
//! module that owns them. Callers serialize mutations (the service holds the
//! database behind a lock and persists after each transaction).

use crate::competence::CriterionCatalog;
use crate::ids::{LectureId, LiveSessionId, RatId, ScaffoldId, SessionId, SheetId, UserId};
use crate::live::LiveSession;
use crate::model::{Actor, Attempt, Rat, Role, Scaffold, Taxonomy};
use crate::review::ReviewThread;
use crate::scheduling::{Lecture, RatSheet, Syllabus};
use crate::assessment::{ScaffoldAccess, SheetSession, StudentNote};
use crate::{Error, Result};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Tunable thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy {
    pub rat_approval_threshold: usize,
    pub scaffold_approval_threshold: usize,
    pub min_answers_for_classification: u64,
}

impl Default for Policy {
    fn default() -> Self {
        Self {
            rat_approval_threshold: 2,
            scaffold_approval_threshold: 1,
            min_answers_for_classification: 5,
        }
    }
}

/// A would-be email. Addressed by pseudonym; the mailer resolves the address
/// through the user store.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Notification {
    pub to: UserId,
    pub subject: String,
    pub body: String,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct ContentDb {
    #[serde(skip)]
    pub policy: Policy,
    next_id: u64,
    pub catalog: CriterionCatalog,
    pub taxonomy: Taxonomy,
    pub rats: BTreeMap<RatId, Rat>,
    pub scaffolds: BTreeMap<ScaffoldId, Scaffold>,
    pub scaffold_views: BTreeSet<(UserId, ScaffoldId)>,
    pub scaffold_access: Vec<ScaffoldAccess>,
    pub threads: BTreeMap<RatId, ReviewThread>,
    pub student_notes: Vec<StudentNote>,
    pub lectures: BTreeMap<LectureId, Lecture>,
    pub syllabi: BTreeMap<LectureId, Syllabus>,
    pub sheets: BTreeMap<SheetId, RatSheet>,
    pub sessions: BTreeMap<SessionId, SheetSession>,
    pub live: BTreeMap<LiveSessionId, LiveSession>,
    pub attempts: Vec<Attempt>,
    /// Free-form UI preferences per user; the server attaches no meaning.
    pub preferences: BTreeMap<UserId, serde_json::Value>,
    #[serde(skip)]
    outbox: Vec<Notification>,
}

impl ContentDb {
    pub fn new(policy: Policy) -> Self {
        Self {
            policy,
            ..Self::default()
        }
    }

    pub(crate) fn alloc<T: From<u64>>(&mut self) -> T {
        self.next_id += 1;
        T::from(self.next_id)
    }

    pub(crate) fn notify(&mut self, to: UserId, subject: String, body: String, at: DateTime<Utc>) {
        self.outbox.push(Notification {
            to,
            subject,
            body,
            created_at: at,
        });
    }

    /// Notifications produced since the last drain.
    pub fn notifications(&self) -> &[Notification] {
        &self.outbox
    }

    pub fn take_notifications(&mut self) -> Vec<Notification> {
        std::mem::take(&mut self.outbox)
    }

    pub fn rat(&self, id: RatId) -> Result<&Rat> {
        self.rats.get(&id).ok_or(Error::NotFound("RAT"))
    }

    pub fn lecture(&self, id: LectureId) -> Result<&Lecture> {
        self.lectures.get(&id).ok_or(Error::NotFound("lecture"))
    }

    pub fn sheet(&self, id: SheetId) -> Result<&RatSheet> {
        self.sheets.get(&id).ok_or(Error::NotFound("sheet"))
    }

    /// Lecturers of the lecture and administrators may manage it.
    pub fn require_owner(&self, actor: &Actor, lecture: LectureId) -> Result<&Lecture> {
        let lecture = self.lecture(lecture)?;
        let owns = actor.role >= Role::Lecturer && lecture.lecturers.contains(&actor.id);
        if owns || actor.role == Role::Administrator {
            Ok(lecture)
        } else {
            Err(Error::Forbidden)
        }
    }

    /// Members read lecture content; owners always may.
    pub fn require_member(&self, actor: &Actor, lecture: LectureId) -> Result<&Lecture> {
        let l = self.lecture(lecture)?;
        if l.members.contains(&actor.id) || self.require_owner(actor, lecture).is_ok() {
            Ok(l)
        } else {
            Err(Error::NotMember)
        }
    }

    pub fn attempts_of(&self, student: UserId) -> impl Iterator<Item = &Attempt> {
        self.attempts.iter().filter(move |a| a.student == student)
    }

    pub fn has_answered(&self, student: UserId, rat: RatId) -> bool {
        self.attempts
            .iter()
            .any(|a| a.student == student && a.rat == rat)
    }
}
