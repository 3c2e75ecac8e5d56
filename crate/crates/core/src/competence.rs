//! Criteria catalog and relative competence levels.
//!
//! Every RAT is flagged with catalog criteria. A criterion contributes one
//! point to each competence it belongs to. Answering a RAT adds its points to
//! the student's maximum, and a correct answer also adds them to the current
//! score. The level of a competence is `current / maximum`, kept as an exact
//! integer pair.

use crate::error::{Error, Result};
use crate::ids::{LectureId, RatId, UserId};
use crate::model::{Attempt, Verdict};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::ops::{Index, IndexMut};

const CATALOG_V1: &str = include_str!("../data/catalog_v1.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Competence {
    DataLiteracy,
    RepresentationalCompetence,
    MathematicalLiteracy,
}

impl Competence {
    pub const ALL: [Competence; 3] = [
        Competence::DataLiteracy,
        Competence::RepresentationalCompetence,
        Competence::MathematicalLiteracy,
    ];
}

/// One value per competence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PerCompetence<T> {
    pub data_literacy: T,
    pub representational_competence: T,
    pub mathematical_literacy: T,
}

impl<T> PerCompetence<T> {
    pub fn from_fn(mut f: impl FnMut(Competence) -> T) -> Self {
        Self {
            data_literacy: f(Competence::DataLiteracy),
            representational_competence: f(Competence::RepresentationalCompetence),
            mathematical_literacy: f(Competence::MathematicalLiteracy),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Competence, &T)> {
        Competence::ALL.into_iter().map(move |c| (c, &self[c]))
    }
}

impl<T> Index<Competence> for PerCompetence<T> {
    type Output = T;

    fn index(&self, c: Competence) -> &T {
        match c {
            Competence::DataLiteracy => &self.data_literacy,
            Competence::RepresentationalCompetence => &self.representational_competence,
            Competence::MathematicalLiteracy => &self.mathematical_literacy,
        }
    }
}

impl<T> IndexMut<Competence> for PerCompetence<T> {
    fn index_mut(&mut self, c: Competence) -> &mut T {
        match c {
            Competence::DataLiteracy => &mut self.data_literacy,
            Competence::RepresentationalCompetence => &mut self.representational_competence,
            Competence::MathematicalLiteracy => &mut self.mathematical_literacy,
        }
    }
}

/// Number of criteria per competence fulfilled by one RAT.
pub type CompetenceCounts = PerCompetence<u64>;

impl CompetenceCounts {
    pub fn is_zero(&self) -> bool {
        self.iter().all(|(_, &n)| n == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: u32,
    pub description: String,
    pub competencies: Vec<Competence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionCatalog {
    pub catalog_version: u32,
    pub entries: Vec<Criterion>,
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("catalog is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("criterion ids must be 1..=n in order; entry {position} has id {id}")]
    NonSequentialId { position: usize, id: u32 },
    #[error("criterion {0} maps to no competence")]
    NoCompetence(u32),
}

impl CriterionCatalog {
    /// The shipped 21-entry catalog.
    pub fn v1() -> Self {
        Self::from_json(CATALOG_V1).expect("bundled catalog is well-formed")
    }

    pub fn from_json(text: &str) -> Result<Self, CatalogError> {
        let catalog: CriterionCatalog = serde_json::from_str(text)?;
        for (position, entry) in catalog.entries.iter().enumerate() {
            if entry.id as usize != position + 1 {
                return Err(CatalogError::NonSequentialId {
                    position,
                    id: entry.id,
                });
            }
            if entry.competencies.is_empty() {
                return Err(CatalogError::NoCompetence(entry.id));
            }
        }
        Ok(catalog)
    }

    pub fn get(&self, id: u32) -> Option<&Criterion> {
        let index = usize::try_from(id).ok()?.checked_sub(1)?;
        self.entries.get(index)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// How many criteria belong to each competence.
    pub fn per_competence(&self) -> CompetenceCounts {
        let mut counts = CompetenceCounts::default();
        for entry in &self.entries {
            for &c in &entry.competencies {
                counts[c] += 1;
            }
        }
        counts
    }
}

impl Default for CriterionCatalog {
    fn default() -> Self {
        Self::v1()
    }
}

pub fn criteria_counts<'a>(
    criteria: impl IntoIterator<Item = &'a u32>,
    catalog: &CriterionCatalog,
) -> Result<CompetenceCounts> {
    let mut counts = CompetenceCounts::default();
    for &id in criteria {
        let criterion = catalog.get(id).ok_or(Error::UnknownCriterion(id))?;
        for &c in &criterion.competencies {
            counts[c] += 1;
        }
    }
    Ok(counts)
}

/// Relative level of one competence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    NoData,
    Value(Ratio<u64>),
}

impl Level {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Level::NoData => None,
            Level::Value(r) => Some(*r.numer() as f64 / *r.denom() as f64),
        }
    }

    pub fn ratio(&self) -> Option<Ratio<u64>> {
        match self {
            Level::NoData => None,
            Level::Value(r) => Some(*r),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct LevelRepr {
    numer: u64,
    denom: u64,
    value: f64,
}

impl Serialize for Level {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Level::NoData => serializer.serialize_none(),
            Level::Value(r) => serializer.serialize_some(&LevelRepr {
                numer: *r.numer(),
                denom: *r.denom(),
                value: self.as_f64().unwrap_or_default(),
            }),
        }
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr: Option<LevelRepr> = Option::deserialize(deserializer)?;
        match repr {
            None => Ok(Level::NoData),
            Some(r) if r.denom == 0 => Err(serde::de::Error::custom("zero denominator")),
            Some(r) => Ok(Level::Value(Ratio::new(r.numer, r.denom))),
        }
    }
}

/// Per-student scores within one scope (a lecture, or all lectures when
/// `lecture` is `None`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompetenceProfile {
    pub student: UserId,
    pub lecture: Option<LectureId>,
    pub current_score: CompetenceCounts,
    pub max_score: CompetenceCounts,
}

impl CompetenceProfile {
    pub fn new(student: UserId, lecture: Option<LectureId>) -> Self {
        Self {
            student,
            lecture,
            ..Self::default()
        }
    }

    pub fn levels(&self) -> PerCompetence<Level> {
        PerCompetence::from_fn(|c| relative_level(self, c))
    }
}

pub fn update_profile(
    mut profile: CompetenceProfile,
    counts: &CompetenceCounts,
    correct: bool,
) -> CompetenceProfile {
    for c in Competence::ALL {
        profile.max_score[c] += counts[c];
        if correct {
            profile.current_score[c] += counts[c];
        }
    }
    profile
}

pub fn relative_level(profile: &CompetenceProfile, c: Competence) -> Level {
    match profile.max_score[c] {
        0 => Level::NoData,
        max => Level::Value(Ratio::new(profile.current_score[c], max)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressionPoint {
    pub competence: Competence,
    pub attempt_index: usize,
    pub level: Level,
}

/// Level of every competence after each scored attempt. Point `i` of a
/// series is the level of the profile folded over the first `i` attempts.
pub fn progression_series(attempts: &[(CompetenceCounts, bool)]) -> PerCompetence<Vec<ProgressionPoint>> {
    let mut series = PerCompetence::from_fn(|_| Vec::with_capacity(attempts.len()));
    let mut profile = CompetenceProfile::default();
    for (i, (counts, correct)) in attempts.iter().enumerate() {
        profile = update_profile(profile, counts, *correct);
        for c in Competence::ALL {
            series[c].push(ProgressionPoint {
                competence: c,
                attempt_index: i + 1,
                level: relative_level(&profile, c),
            });
        }
    }
    series
}

/// Selects the attempts that feed the estimator, in submission order.
///
/// Only the first attempt per (RAT, lecture) counts, and only once it carries
/// a verdict. A first attempt that is still ungraded blocks later attempts on
/// the same RAT from counting; manual grading releases it.
pub fn scoring_sequence<'a>(
    attempts: impl IntoIterator<Item = &'a Attempt>,
    lecture: Option<LectureId>,
) -> Vec<(CompetenceCounts, bool)> {
    let mut ordered: Vec<&Attempt> = attempts
        .into_iter()
        .filter(|a| lecture.is_none() || a.lecture == lecture)
        .collect();
    ordered.sort_by_key(|a| (a.submitted_at, a.id));

    let mut seen: HashSet<(RatId, Option<LectureId>)> = HashSet::new();
    let mut out = Vec::new();
    for attempt in ordered {
        if !seen.insert((attempt.rat, attempt.lecture)) {
            continue;
        }
        match attempt.verdict {
            Verdict::Correct => out.push((attempt.counts, true)),
            Verdict::Incorrect => out.push((attempt.counts, false)),
            Verdict::Ungraded => {}
        }
    }
    out
}

pub fn fold_profile(
    student: UserId,
    lecture: Option<LectureId>,
    sequence: &[(CompetenceCounts, bool)],
) -> CompetenceProfile {
    sequence
        .iter()
        .fold(CompetenceProfile::new(student, lecture), |p, (counts, correct)| {
            update_profile(p, counts, *correct)
        })
}

/// Levels and progression for one student in one scope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetenceReport {
    pub profile: CompetenceProfile,
    pub levels: PerCompetence<Level>,
    pub series: PerCompetence<Vec<ProgressionPoint>>,
}

pub fn competence_report<'a>(
    student: UserId,
    lecture: Option<LectureId>,
    attempts: impl IntoIterator<Item = &'a Attempt>,
) -> CompetenceReport {
    let sequence = scoring_sequence(
        attempts.into_iter().filter(|a| a.student == student),
        lecture,
    );
    let profile = fold_profile(student, lecture, &sequence);
    CompetenceReport {
        levels: profile.levels(),
        series: progression_series(&sequence),
        profile,
    }
}

/// Levels of every student with at least one scored attempt in the lecture.
pub fn lecture_levels<'a>(
    lecture: LectureId,
    attempts: impl IntoIterator<Item = &'a Attempt>,
) -> BTreeMap<UserId, PerCompetence<Level>> {
    let mut by_student: BTreeMap<UserId, Vec<&Attempt>> = BTreeMap::new();
    for a in attempts.into_iter().filter(|a| a.lecture == Some(lecture)) {
        by_student.entry(a.student).or_default().push(a);
    }
    by_student
        .into_iter()
        .map(|(student, list)| {
            let seq = scoring_sequence(list, Some(lecture));
            (student, fold_profile(student, Some(lecture), &seq).levels())
        })
        .collect()
}
