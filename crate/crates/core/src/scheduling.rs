//! Lectures, syllabi, RAT sheets and the cross-lecture pool.

use crate::db::ContentDb;
use crate::ids::{ConceptId, LectureId, LiveSessionId, RatId, SheetId, TopicId, UserId};
use crate::live::LiveSession;
use crate::model::{Actor, Rat, Role};
use crate::{Error, Result};
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lecture {
    pub id: LectureId,
    pub name: String,
    pub audience: String,
    pub appointment_dates: Vec<NaiveDate>,
    pub term: String,
    pub join_code: String,
    pub lecturers: BTreeSet<UserId>,
    #[serde(default)]
    pub members: BTreeSet<UserId>,
}

/// Fields supplied when creating a lecture.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LectureDraft {
    pub name: String,
    #[serde(default)]
    pub audience: String,
    pub appointment_dates: Vec<NaiveDate>,
    #[serde(default)]
    pub term: String,
    pub join_code: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyllabusEntry {
    pub date: NaiveDate,
    #[serde(default)]
    pub topics: BTreeSet<TopicId>,
    #[serde(default)]
    pub concepts: BTreeSet<ConceptId>,
}

/// Dated teaching plan of one lecture; at most one entry per date.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Syllabus {
    pub entries: BTreeMap<NaiveDate, SyllabusEntry>,
}

/// Topics and concepts taught up to a date.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Taught {
    pub topics: BTreeSet<TopicId>,
    pub concepts: BTreeSet<ConceptId>,
}

impl Taught {
    pub fn is_subset(&self, other: &Taught) -> bool {
        self.topics.is_subset(&other.topics) && self.concepts.is_subset(&other.concepts)
    }

    /// Everything the RAT requires has been taught.
    pub fn covers(&self, rat: &Rat) -> bool {
        rat.content.topics.is_subset(&self.topics) && rat.content.concepts.is_subset(&self.concepts)
    }
}

impl Syllabus {
    /// Union of all entries dated on or before `date`.
    pub fn taught_by(&self, date: NaiveDate) -> Taught {
        let mut taught = Taught::default();
        for entry in self.entries.range(..=date).map(|(_, e)| e) {
            taught.topics.extend(entry.topics.iter().cloned());
            taught.concepts.extend(entry.concepts.iter().cloned());
        }
        taught
    }
}

/// Whether a RAT may appear in an automatically generated pool.
pub fn auto_eligible(rat: &Rat, lecture: LectureId, taught: &Taught) -> bool {
    rat.is_published()
        && !rat.content.is_cross_lecture
        && rat.content.lectures.contains(&lecture)
        && taught.covers(rat)
}

/// Candidate pool for automatic sheet generation, ordered by id.
pub fn auto_pool<'a>(
    rats: impl IntoIterator<Item = &'a Rat>,
    lecture: LectureId,
    taught: &Taught,
) -> Vec<RatId> {
    rats.into_iter()
        .filter(|r| auto_eligible(r, lecture, taught))
        .map(|r| r.id)
        .collect()
}

/// Why a RAT cannot be a regular sheet member, if it cannot.
pub fn sheet_member_problem(rat: &Rat, lecture: LectureId) -> Option<&'static str> {
    if rat.content.is_cross_lecture {
        Some("cross-lecture RATs never appear in regular sheets")
    } else if !rat.is_published() {
        Some("RAT is not published")
    } else if !rat.content.lectures.contains(&lecture) {
        Some("RAT is not linked to the lecture")
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SheetOrigin {
    Auto,
    Manual,
}

/// A frozen, ordered selection of RATs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatSheet {
    pub id: SheetId,
    pub lecture: LectureId,
    pub name: String,
    pub rats: Vec<RatId>,
    pub available_from: NaiveDate,
    pub origin: SheetOrigin,
}

impl ContentDb {
    pub fn create_lecture(&mut self, actor: &Actor, draft: LectureDraft) -> Result<LectureId> {
        actor.require(Role::Lecturer)?;
        if draft.name.trim().is_empty() {
            return Err(Error::InvalidLecture("name is empty"));
        }
        if draft.join_code.trim().is_empty() {
            return Err(Error::InvalidLecture("join code is empty"));
        }
        if draft.appointment_dates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidLecture("appointment dates must be strictly increasing"));
        }
        let id = self.alloc();
        self.lectures.insert(
            id,
            Lecture {
                id,
                name: draft.name,
                audience: draft.audience,
                appointment_dates: draft.appointment_dates,
                term: draft.term,
                join_code: draft.join_code,
                lecturers: [actor.id].into(),
                members: BTreeSet::new(),
            },
        );
        Ok(id)
    }

    /// Joins with the lecture password. Returns `false` if already a member.
    pub fn join_lecture(&mut self, actor: &Actor, lecture: LectureId, code: &str) -> Result<bool> {
        let l = self
            .lectures
            .get_mut(&lecture)
            .ok_or(Error::NotFound("lecture"))?;
        if l.join_code != code {
            return Err(Error::BadCode);
        }
        Ok(l.members.insert(actor.id))
    }

    pub fn set_syllabus(&mut self, actor: &Actor, lecture: LectureId, entries: Vec<SyllabusEntry>) -> Result<()> {
        let dates: BTreeSet<NaiveDate> = self
            .require_owner(actor, lecture)?
            .appointment_dates
            .iter()
            .copied()
            .collect();
        let mut syllabus = Syllabus::default();
        for entry in entries {
            if !dates.contains(&entry.date) {
                return Err(Error::DateNotScheduled);
            }
            if syllabus.entries.insert(entry.date, entry).is_some() {
                return Err(Error::InvalidLecture("duplicate syllabus date"));
            }
        }
        self.syllabi.insert(lecture, syllabus);
        Ok(())
    }

    pub fn taught_by(&self, lecture: LectureId, date: NaiveDate) -> Taught {
        self.syllabi
            .get(&lecture)
            .map(|s| s.taught_by(date))
            .unwrap_or_default()
    }

    /// Recomputed on every call so newly published RATs show up.
    pub fn auto_generate_sheet(&self, lecture: LectureId, date: NaiveDate) -> Result<Vec<RatId>> {
        self.lecture(lecture)?;
        let syllabus = self.syllabi.get(&lecture).ok_or(Error::NoSyllabus)?;
        Ok(auto_pool(self.rats.values(), lecture, &syllabus.taught_by(date)))
    }

    /// Automatically selected RATs outside sheets, optionally limited to
    /// some topics. Lectures without a syllabus offer nothing.
    pub fn auto_selection(
        &self,
        lecture: LectureId,
        today: NaiveDate,
        topics: &BTreeSet<TopicId>,
    ) -> Result<Vec<RatId>> {
        let pool = match self.auto_generate_sheet(lecture, today) {
            Ok(pool) => pool,
            Err(Error::NoSyllabus) => Vec::new(),
            Err(e) => return Err(e),
        };
        Ok(pool
            .into_iter()
            .filter(|id| {
                topics.is_empty() || !self.rats[id].content.topics.is_disjoint(topics)
            })
            .collect())
    }

    /// Commits the automatic pool for `date` minus the pruned RATs.
    pub fn commit_auto_sheet(
        &mut self,
        actor: &Actor,
        lecture: LectureId,
        name: &str,
        date: NaiveDate,
        pruned: &BTreeSet<RatId>,
    ) -> Result<SheetId> {
        self.require_owner(actor, lecture)?;
        let rats: Vec<RatId> = self
            .auto_generate_sheet(lecture, date)?
            .into_iter()
            .filter(|id| !pruned.contains(id))
            .collect();
        self.insert_sheet(lecture, name, rats, date, SheetOrigin::Auto)
    }

    pub fn create_manual_sheet(
        &mut self,
        actor: &Actor,
        lecture: LectureId,
        name: &str,
        rats: Vec<RatId>,
        available_from: NaiveDate,
    ) -> Result<SheetId> {
        self.require_owner(actor, lecture)?;
        let mut seen = BTreeSet::new();
        for &id in &rats {
            let rat = self
                .rats
                .get(&id)
                .ok_or(Error::InvalidMember(id, "RAT does not exist"))?;
            if let Some(reason) = sheet_member_problem(rat, lecture) {
                return Err(Error::InvalidMember(id, reason));
            }
            if !seen.insert(id) {
                return Err(Error::InvalidMember(id, "RAT appears twice"));
            }
        }
        self.insert_sheet(lecture, name, rats, available_from, SheetOrigin::Manual)
    }

    fn insert_sheet(
        &mut self,
        lecture: LectureId,
        name: &str,
        rats: Vec<RatId>,
        available_from: NaiveDate,
        origin: SheetOrigin,
    ) -> Result<SheetId> {
        let name = name.trim();
        if name.is_empty() {
            return Err(Error::InvalidLecture("sheet name is empty"));
        }
        if self
            .sheets
            .values()
            .any(|s| s.lecture == lecture && s.name == name)
        {
            return Err(Error::DuplicateName);
        }
        let id = self.alloc();
        self.sheets.insert(
            id,
            RatSheet {
                id,
                lecture,
                name: name.to_owned(),
                rats,
                available_from,
                origin,
            },
        );
        Ok(id)
    }

    /// Sheets of a lecture the actor may open: owners see all, members see
    /// those already available.
    pub fn sheets_for(&self, actor: &Actor, lecture: LectureId, today: NaiveDate) -> Result<Vec<&RatSheet>> {
        self.require_member(actor, lecture)?;
        let owner = self.require_owner(actor, lecture).is_ok();
        Ok(self
            .sheets
            .values()
            .filter(|s| s.lecture == lecture && (owner || s.available_from <= today))
            .collect())
    }

    /// Published cross-lecture RATs the student has not answered yet.
    pub fn cross_lecture_pool(&self, actor: &Actor) -> Result<Vec<RatId>> {
        if actor.role != Role::Student {
            return Err(Error::Forbidden);
        }
        let answered: BTreeSet<RatId> = self.attempts_of(actor.id).map(|a| a.rat).collect();
        Ok(self
            .rats
            .values()
            .filter(|r| r.is_published() && r.content.is_cross_lecture && !answered.contains(&r.id))
            .map(|r| r.id)
            .collect())
    }

    pub fn answer_cross_lecture(
        &mut self,
        actor: &Actor,
        rat_id: RatId,
        response: &crate::model::Response,
        now: chrono::DateTime<chrono::Utc>,
    ) -> Result<crate::assessment::GradedResult> {
        use crate::assessment::{grade, informative_feedback, GradedResult};
        use crate::model::AttemptContext;

        if !self.cross_lecture_pool(actor)?.contains(&rat_id) {
            let rat = self.rat(rat_id)?;
            return Err(if !rat.content.is_cross_lecture {
                Error::NotFound("cross-lecture RAT")
            } else if !rat.is_published() {
                Error::RatNotPublished(rat_id)
            } else {
                Error::AlreadyAnswered
            });
        }
        let rat = self.rat(rat_id)?;
        let verdict = grade(rat, response)?;
        let informative = informative_feedback(rat, response, verdict);
        let attempt = self.record_attempt(
            actor.id,
            rat_id,
            None,
            AttemptContext::CrossLecture,
            response.clone(),
            verdict,
            now,
        )?;
        let next_rat = self.cross_lecture_pool(actor)?.first().copied();
        Ok(GradedResult {
            attempt,
            rat: rat_id,
            correct: verdict.as_bool(),
            evaluative: verdict,
            informative,
            updated_levels: None,
            completed: next_rat.is_none(),
            next_rat,
        })
    }

    /// Opens a live run of a sheet. At most one open run per sheet.
    pub fn open_live(&mut self, actor: &Actor, sheet_id: SheetId) -> Result<LiveSessionId> {
        let sheet = self.sheet(sheet_id)?.clone();
        self.require_owner(actor, sheet.lecture)?;
        if self
            .live
            .values()
            .any(|s| s.sheet == sheet_id && s.is_open())
        {
            return Err(Error::LiveAlreadyOpen);
        }
        let id = self.alloc();
        self.live
            .insert(id, LiveSession::new(id, sheet_id, sheet.lecture, sheet.rats));
        Ok(id)
    }

    pub fn live_session(&self, id: LiveSessionId) -> Result<&LiveSession> {
        self.live.get(&id).ok_or(Error::NotFound("live session"))
    }

    /// Grades and tallies a live answer; the first answer per student and
    /// RAT counts, repeats are rejected.
    pub fn submit_live(
        &mut self,
        actor: &Actor,
        live_id: LiveSessionId,
        rat_id: RatId,
        response: &crate::model::Response,
        now: chrono::DateTime<chrono::Utc>,
    ) -> Result<crate::model::Verdict> {
        use crate::assessment::grade;
        use crate::live::tally_key;
        use crate::model::AttemptContext;

        let session = self.live_session(live_id)?;
        if !session.is_open() {
            return Err(Error::SessionClosed);
        }
        let lecture = session.lecture;
        if !self.lecture(lecture)?.members.contains(&actor.id) {
            return Err(Error::NotMember);
        }
        let rat = self.rat(rat_id)?;
        let verdict = grade(rat, response)?;
        let key = tally_key(response, verdict);
        self.live[&live_id].record(actor.id, rat_id, key, verdict)?;
        self.record_attempt(
            actor.id,
            rat_id,
            Some(lecture),
            AttemptContext::LiveSheet,
            response.clone(),
            verdict,
            now,
        )?;
        Ok(verdict)
    }

    pub fn close_live(&mut self, actor: &Actor, live_id: LiveSessionId) -> Result<()> {
        let lecture = self.live_session(live_id)?.lecture;
        self.require_owner(actor, lecture)?;
        self.live[&live_id].close();
        Ok(())
    }
}
