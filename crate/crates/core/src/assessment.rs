//! Grading, elaborated feedback, sheet sessions and scaffold access.

use crate::competence::{competence_report, criteria_counts, Level, PerCompetence};
use crate::db::ContentDb;
use crate::ids::{AttemptId, LectureId, OptionId, RatId, ScaffoldId, SessionId, SheetId, TopicId, UserId};
use crate::model::{
    normalize_answer, Actor, Attempt, AttemptContext, QuestionKind, Rat, Response, RichText, Role,
    Scaffold, ScaffoldKind, Verdict,
};
use crate::{Error, Result};
use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

/// Grades a response. Multiple true/false items are all-or-nothing.
/// Unmatched open-ended answers are `Ungraded` and wait for manual grading.
pub fn grade(rat: &Rat, response: &Response) -> Result<Verdict> {
    let options = &rat.content.options;
    match (rat.content.kind, response) {
        (QuestionKind::MultipleChoice, Response::Choice(chosen)) => {
            let option = rat.option(*chosen).ok_or(Error::ShapeMismatch)?;
            Ok(Verdict::from_bool(option.is_correct))
        }
        (QuestionKind::MultipleTrueFalse, Response::Statements(answers)) => {
            if answers.len() != options.len() {
                return Err(Error::ShapeMismatch);
            }
            let mut all_match = true;
            for statement in options {
                let given = answers.get(&statement.id).ok_or(Error::ShapeMismatch)?;
                all_match &= *given == statement.is_correct;
            }
            Ok(Verdict::from_bool(all_match))
        }
        (QuestionKind::OpenEnded, Response::Text(text)) => {
            let given = normalize_answer(text);
            let matched = rat
                .content
                .accepted_answers
                .iter()
                .any(|a| normalize_answer(a) == given);
            Ok(if matched {
                Verdict::Correct
            } else {
                Verdict::Ungraded
            })
        }
        _ => Err(Error::ShapeMismatch),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum FeedbackSource {
    /// Feedback attached to the chosen (incorrect) option.
    Option { option: OptionId },
    /// Feedback attached to a statement judged wrongly.
    Statement { option: OptionId },
    General,
    /// The answer awaits manual grading.
    Pending,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackBlock {
    #[serde(flatten)]
    pub source: FeedbackSource,
    pub text: RichText,
}

const PENDING_TEXT: &str = "Your answer was recorded and will be reviewed by the lecturer.";

/// Informative component: answer-specific feedback for what was answered
/// wrongly, then the general feedback.
pub fn informative_feedback(rat: &Rat, response: &Response, verdict: Verdict) -> Vec<FeedbackBlock> {
    let mut blocks = Vec::new();
    match (verdict, response) {
        (Verdict::Incorrect, Response::Choice(chosen)) => {
            if let Some(option) = rat.option(*chosen) {
                if !option.feedback.is_blank() {
                    blocks.push(FeedbackBlock {
                        source: FeedbackSource::Option { option: option.id },
                        text: option.feedback.clone(),
                    });
                }
            }
        }
        (Verdict::Incorrect, Response::Statements(answers)) => {
            for statement in &rat.content.options {
                let wrong = answers
                    .get(&statement.id)
                    .is_some_and(|&given| given != statement.is_correct);
                if wrong && !statement.feedback.is_blank() {
                    blocks.push(FeedbackBlock {
                        source: FeedbackSource::Statement {
                            option: statement.id,
                        },
                        text: statement.feedback.clone(),
                    });
                }
            }
        }
        (Verdict::Ungraded, _) => blocks.push(FeedbackBlock {
            source: FeedbackSource::Pending,
            text: RichText::new(PENDING_TEXT),
        }),
        _ => {}
    }
    if !rat.content.general_feedback.is_blank() {
        blocks.push(FeedbackBlock {
            source: FeedbackSource::General,
            text: rat.content.general_feedback.clone(),
        });
    }
    blocks
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradedResult {
    pub attempt: AttemptId,
    pub rat: RatId,
    pub correct: Option<bool>,
    pub evaluative: Verdict,
    pub informative: Vec<FeedbackBlock>,
    /// Present once the sheet is complete.
    pub updated_levels: Option<PerCompetence<Level>>,
    pub next_rat: Option<RatId>,
    pub completed: bool,
}

/// A student's walk through an ordered list of RATs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheetSession {
    pub id: SessionId,
    pub student: UserId,
    /// `None` for sessions over automatically selected RATs.
    pub sheet: Option<SheetId>,
    pub lecture: LectureId,
    pub context: AttemptContext,
    pub rats: Vec<RatId>,
    pub cursor: usize,
    pub completed: bool,
}

impl SheetSession {
    pub fn current(&self) -> Option<RatId> {
        self.rats.get(self.cursor).copied()
    }
}

/// One scaffold-tab access.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaffoldAccess {
    pub user: UserId,
    pub rat: RatId,
    pub scaffolds: Vec<ScaffoldId>,
    pub at: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoteKind {
    Comment,
    ErrorReport,
}

/// A student comment or error report on a RAT.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudentNote {
    pub kind: NoteKind,
    pub student: UserId,
    pub rat: RatId,
    pub body: String,
    pub at: DateTime<Utc>,
}

impl ContentDb {
    pub fn begin_sheet_session(
        &mut self,
        actor: &Actor,
        sheet_id: SheetId,
        today: NaiveDate,
    ) -> Result<SheetSession> {
        let sheet = self.sheet(sheet_id)?.clone();
        self.require_member(actor, sheet.lecture)?;
        if sheet.available_from > today && self.require_owner(actor, sheet.lecture).is_err() {
            return Err(Error::NotFound("sheet"));
        }
        let session = SheetSession {
            id: self.alloc(),
            student: actor.id,
            sheet: Some(sheet_id),
            lecture: sheet.lecture,
            context: AttemptContext::Sheet,
            completed: sheet.rats.is_empty(),
            rats: sheet.rats,
            cursor: 0,
        };
        self.sessions.insert(session.id, session.clone());
        Ok(session)
    }

    /// A session over the automatically selected RATs of a lecture, limited
    /// to `topics` when non-empty.
    pub fn begin_auto_session(
        &mut self,
        actor: &Actor,
        lecture: LectureId,
        today: NaiveDate,
        topics: &BTreeSet<TopicId>,
    ) -> Result<SheetSession> {
        self.require_member(actor, lecture)?;
        let rats = self.auto_selection(lecture, today, topics)?;
        let session = SheetSession {
            id: self.alloc(),
            student: actor.id,
            sheet: None,
            lecture,
            context: AttemptContext::AutoRats,
            completed: rats.is_empty(),
            rats,
            cursor: 0,
        };
        self.sessions.insert(session.id, session.clone());
        Ok(session)
    }

    pub fn session(&self, actor: &Actor, id: SessionId) -> Result<&SheetSession> {
        match self.sessions.get(&id) {
            Some(s) if s.student == actor.id => Ok(s),
            _ => Err(Error::NotFound("session")),
        }
    }

    pub fn submit_answer(
        &mut self,
        actor: &Actor,
        session_id: SessionId,
        rat_id: RatId,
        response: &Response,
        now: DateTime<Utc>,
    ) -> Result<GradedResult> {
        let session = self.session(actor, session_id)?.clone();
        if session.completed {
            return Err(Error::SessionComplete);
        }
        if session.current() != Some(rat_id) {
            return Err(Error::StaleSubmission);
        }
        let rat = self.rat(rat_id)?;
        if !rat.is_published() {
            return Err(Error::RatNotPublished(rat_id));
        }
        let verdict = grade(rat, response)?;
        let informative = informative_feedback(rat, response, verdict);
        let attempt = self.record_attempt(
            actor.id,
            rat_id,
            Some(session.lecture),
            session.context,
            response.clone(),
            verdict,
            now,
        )?;

        let session = self
            .sessions
            .get_mut(&session_id)
            .expect("session checked above");
        session.cursor += 1;
        session.completed = session.cursor == session.rats.len();
        let completed = session.completed;
        let next_rat = session.current();
        let lecture = session.lecture;

        let updated_levels = completed.then(|| {
            competence_report(actor.id, Some(lecture), &self.attempts).levels
        });
        Ok(GradedResult {
            attempt,
            rat: rat_id,
            correct: verdict.as_bool(),
            evaluative: verdict,
            informative,
            updated_levels,
            next_rat,
            completed,
        })
    }

    /// Stores an attempt with the RAT's current criteria counts.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn record_attempt(
        &mut self,
        student: UserId,
        rat_id: RatId,
        lecture: Option<LectureId>,
        context: AttemptContext,
        response: Response,
        verdict: Verdict,
        now: DateTime<Utc>,
    ) -> Result<AttemptId> {
        let counts = criteria_counts(&self.rat(rat_id)?.content.criteria, &self.catalog)?;
        let is_first_for_rat = !self.has_answered(student, rat_id);
        // Clamp so submission times stay monotone per student.
        let submitted_at = self
            .attempts_of(student)
            .map(|a| a.submitted_at)
            .max()
            .map_or(now, |last| last.max(now));
        let id = self.alloc();
        self.attempts.push(Attempt {
            id,
            student,
            rat: rat_id,
            lecture,
            context,
            response,
            verdict,
            submitted_at,
            is_first_for_rat,
            counts,
        });
        Ok(id)
    }

    /// Manually grades an open-ended attempt that matched no accepted answer.
    pub fn grade_attempt(&mut self, actor: &Actor, attempt: AttemptId, correct: bool) -> Result<()> {
        actor.require(Role::Lecturer)?;
        let index = self
            .attempts
            .iter()
            .position(|a| a.id == attempt)
            .ok_or(Error::NotFound("attempt"))?;
        if let Some(lecture) = self.attempts[index].lecture {
            self.require_owner(actor, lecture)?;
        }
        let target = &mut self.attempts[index];
        if target.verdict.is_graded() {
            return Err(Error::AlreadyGraded);
        }
        target.verdict = Verdict::from_bool(correct);
        Ok(())
    }

    /// Ungraded attempts of a lecture, oldest first.
    pub fn ungraded(&self, actor: &Actor, lecture: LectureId) -> Result<Vec<&Attempt>> {
        self.require_owner(actor, lecture)?;
        Ok(self
            .attempts
            .iter()
            .filter(|a| a.lecture == Some(lecture) && a.verdict == Verdict::Ungraded)
            .collect())
    }

    /// Approved scaffolds of a RAT, best rated first. Logs the access and
    /// marks the returned scaffolds as viewed by the caller.
    pub fn scaffolds_for(&mut self, actor: &Actor, rat: RatId, now: DateTime<Utc>) -> Result<Vec<Scaffold>> {
        if !self.rat_visible_to(actor, rat) {
            return Err(Error::NotFound("RAT"));
        }
        let threshold = self.policy.scaffold_approval_threshold;
        let mut list: Vec<Scaffold> = self
            .scaffolds
            .values()
            .filter(|s| s.rat_id == rat && s.is_visible(threshold))
            .cloned()
            .collect();
        list.sort_by(|a, b| compare_by_rating(a, b).then(a.id.cmp(&b.id)));

        for s in &list {
            self.scaffold_views.insert((actor.id, s.id));
        }
        self.scaffold_access.push(ScaffoldAccess {
            user: actor.id,
            rat,
            scaffolds: list.iter().map(|s| s.id).collect(),
            at: now,
        });
        Ok(list)
    }

    pub fn rate_scaffold(&mut self, actor: &Actor, scaffold: ScaffoldId, stars: u8) -> Result<f64> {
        if !(1..=5).contains(&stars) {
            return Err(Error::OutOfRange);
        }
        if !self.scaffolds.contains_key(&scaffold) {
            return Err(Error::NotFound("scaffold"));
        }
        if !self.scaffold_views.contains(&(actor.id, scaffold)) {
            return Err(Error::NotViewed(scaffold));
        }
        let s = self.scaffolds.get_mut(&scaffold).expect("checked above");
        s.ratings.insert(actor.id, stars);
        Ok(s.mean_rating().unwrap_or_default())
    }

    /// A student proposes a scaffold; it enters review as a draft.
    pub fn suggest_scaffold(
        &mut self,
        actor: &Actor,
        rat: RatId,
        kind: ScaffoldKind,
        body: RichText,
        now: DateTime<Utc>,
    ) -> Result<ScaffoldId> {
        self.rat(rat)?;
        if actor.role == Role::Student && !self.has_answered(actor.id, rat) {
            return Err(Error::NotAnswered);
        }
        if body.is_blank() {
            return Err(Error::EmptyBody);
        }
        let id = self.alloc();
        self.scaffolds.insert(
            id,
            Scaffold {
                id,
                rat_id: rat,
                kind,
                body,
                approvals: BTreeSet::new(),
                ratings: BTreeMap::new(),
                suggested_by: actor.id,
                created_at: now,
            },
        );
        Ok(id)
    }

    /// Student comment or error report; notifies the RAT author.
    pub fn student_note(
        &mut self,
        actor: &Actor,
        rat: RatId,
        kind: NoteKind,
        body: &str,
        now: DateTime<Utc>,
    ) -> Result<()> {
        let author = self.rat(rat)?.author;
        if !self.has_answered(actor.id, rat) {
            return Err(Error::NotAnswered);
        }
        if body.trim().is_empty() {
            return Err(Error::EmptyBody);
        }
        self.student_notes.push(StudentNote {
            kind,
            student: actor.id,
            rat,
            body: body.to_owned(),
            at: now,
        });
        let subject = match kind {
            NoteKind::Comment => format!("New comment on RAT {rat}"),
            NoteKind::ErrorReport => format!("Possible error reported in RAT {rat}"),
        };
        self.notify(author, subject, format!("RAT {rat}: {body}"), now);
        Ok(())
    }
}

fn compare_by_rating(a: &Scaffold, b: &Scaffold) -> Ordering {
    // Descending by mean; unrated scaffolds go last.
    match (a.mean_rating(), b.mean_rating()) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AnswerOption, PublicationState, RatContent, ReviewStage};
    use chrono::TimeZone;

    fn opt(id: u64, correct: bool, feedback: &str) -> AnswerOption {
        AnswerOption {
            id: OptionId(id),
            text: RichText::new(format!("o{id}")),
            is_correct: correct,
            feedback: feedback.into(),
        }
    }

    fn rat(kind: QuestionKind, options: Vec<AnswerOption>, accepted: &[&str]) -> Rat {
        Rat {
            id: RatId(1),
            content: RatContent {
                question: "q".into(),
                kind,
                options,
                accepted_answers: accepted.iter().map(|s| s.to_string()).collect(),
                topics: ["t".into()].into(),
                concepts: BTreeSet::new(),
                lectures: BTreeSet::new(),
                criteria: BTreeSet::new(),
                is_cross_lecture: false,
                general_feedback: "general".into(),
            },
            author: UserId(1),
            state: PublicationState {
                value: ReviewStage::Published,
                approvals: BTreeSet::new(),
            },
            created_at: Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap(),
        }
    }

    fn mc() -> Rat {
        rat(
            QuestionKind::MultipleChoice,
            vec![opt(1, true, ""), opt(2, false, "wrong because B"), opt(3, false, "wrong because C")],
            &[],
        )
    }

    #[test]
    fn multiple_choice() {
        let r = mc();
        assert_eq!(grade(&r, &Response::Choice(OptionId(1))), Ok(Verdict::Correct));
        assert_eq!(grade(&r, &Response::Choice(OptionId(2))), Ok(Verdict::Incorrect));
        assert_eq!(grade(&r, &Response::Choice(OptionId(9))), Err(Error::ShapeMismatch));
        assert_eq!(grade(&r, &Response::Text("1".into())), Err(Error::ShapeMismatch));
    }

    fn true_false(truth: &[bool]) -> Rat {
        rat(
            QuestionKind::MultipleTrueFalse,
            truth
                .iter()
                .enumerate()
                .map(|(i, &t)| opt(i as u64 + 1, t, &format!("statement {}", i + 1)))
                .collect(),
            &[],
        )
    }

    fn pattern(bits: u32, n: usize) -> Response {
        Response::Statements(
            (0..n)
                .map(|i| (OptionId(i as u64 + 1), bits & (1 << i) != 0))
                .collect(),
        )
    }

    #[test]
    fn true_false_three_statements_two_match() {
        let r = true_false(&[true, false, true]);
        let two_match = Response::Statements(
            [(OptionId(1), true), (OptionId(2), false), (OptionId(3), false)].into(),
        );
        assert_eq!(grade(&r, &two_match), Ok(Verdict::Incorrect));
        // Of all 8 patterns exactly one is correct.
        let correct = (0..8)
            .filter(|&bits| grade(&r, &pattern(bits, 3)) == Ok(Verdict::Correct))
            .count();
        assert_eq!(correct, 1);
    }

    #[test]
    fn exactly_one_pattern_grades_true_up_to_four_statements() {
        for n in 1..=4usize {
            for key in 0..(1u32 << n) {
                let truth: Vec<bool> = (0..n).map(|i| key & (1 << i) != 0).collect();
                let r = true_false(&truth);
                let hits: Vec<u32> = (0..(1u32 << n))
                    .filter(|&bits| grade(&r, &pattern(bits, n)) == Ok(Verdict::Correct))
                    .collect();
                assert_eq!(hits, vec![key]);
            }
        }
    }

    #[test]
    fn true_false_shape() {
        let r = true_false(&[true, false]);
        let missing = Response::Statements([(OptionId(1), true)].into());
        assert_eq!(grade(&r, &missing), Err(Error::ShapeMismatch));
        let foreign = Response::Statements([(OptionId(1), true), (OptionId(7), false)].into());
        assert_eq!(grade(&r, &foreign), Err(Error::ShapeMismatch));
    }

    #[test]
    fn open_ended() {
        let r = rat(QuestionKind::OpenEnded, vec![], &["42", "Forty Two"]);
        assert_eq!(grade(&r, &Response::Text("  42 ".into())), Ok(Verdict::Correct));
        assert_eq!(grade(&r, &Response::Text("forty   two".into())), Ok(Verdict::Correct));
        assert_eq!(grade(&r, &Response::Text("41".into())), Ok(Verdict::Ungraded));
    }

    #[test]
    fn feedback_for_wrong_choice() {
        let r = mc();
        let blocks = informative_feedback(&r, &Response::Choice(OptionId(3)), Verdict::Incorrect);
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].source, FeedbackSource::Option { option: OptionId(3) });
        assert_eq!(blocks[0].text.as_str(), "wrong because C");
        assert_eq!(blocks[1].source, FeedbackSource::General);

        let blocks = informative_feedback(&r, &Response::Choice(OptionId(1)), Verdict::Correct);
        assert_eq!(blocks.len(), 1);
        let mut silent = r.clone();
        silent.content.general_feedback = RichText::default();
        assert!(informative_feedback(&silent, &Response::Choice(OptionId(1)), Verdict::Correct).is_empty());
    }

    #[test]
    fn feedback_for_true_false_lists_wrong_statements() {
        let r = true_false(&[true, false, true]);
        let resp = Response::Statements(
            [(OptionId(1), false), (OptionId(2), false), (OptionId(3), false)].into(),
        );
        let blocks = informative_feedback(&r, &resp, Verdict::Incorrect);
        let sources: Vec<_> = blocks.iter().map(|b| b.source.clone()).collect();
        assert_eq!(
            sources,
            vec![
                FeedbackSource::Statement { option: OptionId(1) },
                FeedbackSource::Statement { option: OptionId(3) },
                FeedbackSource::General
            ]
        );
    }

    #[test]
    fn ungraded_feedback_is_never_empty() {
        let mut r = rat(QuestionKind::OpenEnded, vec![], &["42"]);
        r.content.general_feedback = RichText::default();
        let blocks = informative_feedback(&r, &Response::Text("x".into()), Verdict::Ungraded);
        assert_eq!(blocks[0].source, FeedbackSource::Pending);
    }

    #[test]
    fn scaffold_ordering() {
        let mk = |id: u64, ratings: &[u8]| Scaffold {
            id: ScaffoldId(id),
            rat_id: RatId(1),
            kind: ScaffoldKind::Text,
            body: "b".into(),
            approvals: BTreeSet::new(),
            ratings: ratings
                .iter()
                .enumerate()
                .map(|(i, &r)| (UserId(i as u64), r))
                .collect(),
            suggested_by: UserId(1),
            created_at: Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap(),
        };
        let mut list = [mk(1, &[3]), mk(2, &[]), mk(3, &[4, 5]), mk(4, &[3])];
        list.sort_by(|a, b| compare_by_rating(a, b).then(a.id.cmp(&b.id)));
        let ids: Vec<u64> = list.iter().map(|s| s.id.0).collect();
        assert_eq!(ids, vec![3, 1, 4, 2]);
    }
}
