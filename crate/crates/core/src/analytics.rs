//! Dashboard aggregates.

use crate::competence::{lecture_levels, Level, PerCompetence};
use crate::db::ContentDb;
use crate::ids::{LectureId, OptionId, RatId, UserId};
use crate::model::{Actor, Attempt, QuestionKind, Response, Role, Verdict};
use crate::Result;
use chrono::{DateTime, Datelike, NaiveDate, Utc};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// ISO-8601 week label such as `2024-W15`.
pub fn iso_week(at: DateTime<Utc>) -> String {
    let w = at.iso_week();
    format!("{}-W{:02}", w.year(), w.week())
}

fn level(num: u64, den: u64) -> Level {
    if den == 0 {
        Level::NoData
    } else {
        Level::Value(Ratio::new(num, den))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudentStats {
    pub percent_correct: Level,
    pub percent_incorrect: Level,
    pub per_week: BTreeMap<String, u64>,
    pub total: u64,
}

/// Statistics over every attempt (repeats included). Ungraded attempts are
/// counted per week but not in the percentages.
pub fn student_stats<'a>(attempts: impl IntoIterator<Item = &'a Attempt>) -> StudentStats {
    let mut per_week = BTreeMap::new();
    let (mut correct, mut incorrect, mut total) = (0, 0, 0);
    for a in attempts {
        *per_week.entry(iso_week(a.submitted_at)).or_insert(0) += 1;
        total += 1;
        match a.verdict {
            Verdict::Correct => correct += 1,
            Verdict::Incorrect => incorrect += 1,
            Verdict::Ungraded => {}
        }
    }
    StudentStats {
        percent_correct: level(correct, correct + incorrect),
        percent_incorrect: level(incorrect, correct + incorrect),
        per_week,
        total,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeceptiveOption {
    pub rat: RatId,
    pub option: OptionId,
    pub count: u64,
    pub n: u64,
    pub share: f64,
}

/// One classified RAT, also the CSV row of the export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatErrorRow {
    pub rat_id: RatId,
    pub n: u64,
    pub correct: u64,
    pub correct_fraction: f64,
    pub always_incorrect: bool,
    pub often_incorrect: bool,
    pub deceptive: bool,
    pub top_option: Option<OptionId>,
    pub top_share: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorCategoryReport {
    pub always_incorrect: BTreeSet<RatId>,
    pub often_incorrect: BTreeSet<RatId>,
    pub deceptive: Vec<DeceptiveOption>,
    pub most_frequent_option: BTreeMap<RatId, OptionId>,
    pub rows: Vec<RatErrorRow>,
}

/// Answers of one RAT as seen by the classifier.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RatAnswers {
    pub n: u64,
    pub correct: u64,
    /// Multiple choice only: count per chosen option.
    pub options: BTreeMap<OptionId, u64>,
    /// Multiple choice only: the options that are wrong.
    pub wrong: BTreeSet<OptionId>,
}

/// Classifies RATs with at least `min_answers` answers. Shares use all
/// answers as the denominator; thresholds are strict.
pub fn classify(answers: &BTreeMap<RatId, RatAnswers>, min_answers: u64) -> ErrorCategoryReport {
    let mut report = ErrorCategoryReport::default();
    for (&rat, a) in answers {
        if a.n == 0 || a.n < min_answers {
            continue;
        }
        let always = a.correct == 0;
        let often = a.correct * 5 < 2 * a.n;
        let mut deceptive = false;
        for (&option, &count) in &a.options {
            if a.wrong.contains(&option) && count * 10 > 3 * a.n {
                deceptive = true;
                report.deceptive.push(DeceptiveOption {
                    rat,
                    option,
                    count,
                    n: a.n,
                    share: count as f64 / a.n as f64,
                });
            }
        }
        let mut top: Option<(OptionId, u64)> = None;
        for (&option, &count) in &a.options {
            if top.is_none_or(|(_, best)| count > best) {
                top = Some((option, count));
            }
        }
        if always {
            report.always_incorrect.insert(rat);
        }
        if often {
            report.often_incorrect.insert(rat);
        }
        if let Some((option, _)) = top {
            report.most_frequent_option.insert(rat, option);
        }
        report.rows.push(RatErrorRow {
            rat_id: rat,
            n: a.n,
            correct: a.correct,
            correct_fraction: a.correct as f64 / a.n as f64,
            always_incorrect: always,
            often_incorrect: often,
            deceptive,
            top_option: top.map(|t| t.0),
            top_share: top.map(|t| t.1 as f64 / a.n as f64),
        });
    }
    report
}

/// First graded attempt per (student, RAT), in submission order.
pub fn first_graded_attempts<'a>(attempts: impl IntoIterator<Item = &'a Attempt>) -> Vec<&'a Attempt> {
    let mut sorted: Vec<&Attempt> = attempts.into_iter().collect();
    sorted.sort_by_key(|a| (a.submitted_at, a.id));
    let mut seen = BTreeSet::new();
    sorted
        .into_iter()
        .filter(|a| seen.insert((a.student, a.rat)))
        .filter(|a| a.verdict.is_graded())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatCreation {
    pub creator: UserId,
    pub count: u64,
}

/// Created RATs per lecture and ISO week. RATs without a lecture are
/// grouped under `lecture: null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreationBucket {
    pub lecture: Option<LectureId>,
    pub week: String,
    pub creators: Vec<RatCreation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdminStats {
    pub rats_created: Vec<CreationBucket>,
}

/// Greedy lottery rule: four logins, each at least 24 hours after the
/// previously chosen one.
pub fn lottery_eligible(logins: &[DateTime<Utc>]) -> bool {
    let mut sorted = logins.to_vec();
    sorted.sort();
    let mut chosen = 0;
    let mut last: Option<DateTime<Utc>> = None;
    for t in sorted {
        if last.is_none_or(|l| t - l >= chrono::Duration::hours(24)) {
            chosen += 1;
            last = Some(t);
            if chosen >= 4 {
                return true;
            }
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatSummary {
    pub rat: RatId,
    pub n: u64,
    pub correct_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LectureDashboard {
    pub lecture: LectureId,
    pub members: usize,
    pub errors: ErrorCategoryReport,
    pub levels: BTreeMap<UserId, PerCompetence<Level>>,
    pub ungraded: usize,
}

impl ContentDb {
    pub fn student_stats(&self, student: UserId, lecture: Option<LectureId>) -> StudentStats {
        student_stats(
            self.attempts_of(student)
                .filter(|a| lecture.is_none() || a.lecture == lecture),
        )
    }

    /// Answer aggregates of a lecture's RATs from first graded attempts.
    pub fn rat_answers(&self, lecture: LectureId) -> BTreeMap<RatId, RatAnswers> {
        let mut out: BTreeMap<RatId, RatAnswers> = BTreeMap::new();
        for a in first_graded_attempts(self.attempts.iter().filter(|a| a.lecture == Some(lecture))) {
            let Some(rat) = self.rats.get(&a.rat) else { continue };
            let entry = out.entry(a.rat).or_insert_with(|| RatAnswers {
                wrong: match rat.content.kind {
                    QuestionKind::MultipleChoice => rat
                        .content
                        .options
                        .iter()
                        .filter(|o| !o.is_correct)
                        .map(|o| o.id)
                        .collect(),
                    _ => BTreeSet::new(),
                },
                ..RatAnswers::default()
            });
            entry.n += 1;
            if a.verdict == Verdict::Correct {
                entry.correct += 1;
            }
            if let Response::Choice(option) = a.response {
                *entry.options.entry(option).or_insert(0) += 1;
            }
        }
        out
    }

    pub fn classify_errors(&self, lecture: LectureId, min_answers: u64) -> ErrorCategoryReport {
        classify(&self.rat_answers(lecture), min_answers.max(1))
    }

    pub fn lecture_dashboard(&self, actor: &Actor, lecture: LectureId) -> Result<LectureDashboard> {
        let l = self.require_owner(actor, lecture)?;
        Ok(LectureDashboard {
            lecture,
            members: l.members.len(),
            errors: self.classify_errors(lecture, self.policy.min_answers_for_classification),
            levels: lecture_levels(lecture, &self.attempts),
            ungraded: self
                .attempts
                .iter()
                .filter(|a| a.lecture == Some(lecture) && !a.verdict.is_graded())
                .count(),
        })
    }

    /// Public per-RAT summary shown next to a question.
    pub fn rat_summary(&self, actor: &Actor, rat: RatId) -> Result<RatSummary> {
        self.rat_for(actor, rat)?;
        let firsts = first_graded_attempts(self.attempts.iter().filter(|a| a.rat == rat));
        let n = firsts.len() as u64;
        let correct = firsts.iter().filter(|a| a.verdict == Verdict::Correct).count() as u64;
        Ok(RatSummary {
            rat,
            n,
            correct_fraction: (n > 0).then(|| correct as f64 / n as f64),
        })
    }

    /// RAT creation counts, optionally limited to `[from, to]`.
    pub fn admin_stats(&self, actor: &Actor, from: Option<NaiveDate>, to: Option<NaiveDate>) -> Result<AdminStats> {
        actor.require(Role::Administrator)?;
        let mut buckets: BTreeMap<(Option<LectureId>, String), BTreeMap<UserId, u64>> = BTreeMap::new();
        for rat in self.rats.values() {
            let day = rat.created_at.date_naive();
            if from.is_some_and(|f| day < f) || to.is_some_and(|t| day > t) {
                continue;
            }
            let week = iso_week(rat.created_at);
            let lectures: Vec<Option<LectureId>> = if rat.content.lectures.is_empty() {
                vec![None]
            } else {
                rat.content.lectures.iter().copied().map(Some).collect()
            };
            for lecture in lectures {
                *buckets
                    .entry((lecture, week.clone()))
                    .or_default()
                    .entry(rat.author)
                    .or_insert(0) += 1;
            }
        }
        Ok(AdminStats {
            rats_created: buckets
                .into_iter()
                .map(|((lecture, week), creators)| CreationBucket {
                    lecture,
                    week,
                    creators: creators
                        .into_iter()
                        .map(|(creator, count)| RatCreation { creator, count })
                        .collect(),
                })
                .collect(),
        })
    }
}
