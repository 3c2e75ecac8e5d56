//! Shared domain vocabulary: roles, RATs, scaffolds, attempts and the
//! authoring rules every other module relies on.

use crate::competence::{CompetenceCounts, CriterionCatalog};
use crate::ids::{
    AttemptId, ConceptId, LectureId, OptionId, RatId, ScaffoldId, TopicId, UserId,
};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// User category. Declaration order is the access order: every role holds
/// the rights of all roles before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Student,
    RatCreator,
    Lecturer,
    Administrator,
}

impl Role {
    pub const ALL: [Role; 4] = [
        Role::Student,
        Role::RatCreator,
        Role::Lecturer,
        Role::Administrator,
    ];
}

impl std::str::FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Student" => Ok(Role::Student),
            "RatCreator" => Ok(Role::RatCreator),
            "Lecturer" => Ok(Role::Lecturer),
            "Administrator" => Ok(Role::Administrator),
            other => Err(format!("unknown role {other:?}")),
        }
    }
}

pub fn check_access(actor_role: Role, required_role: Role) -> bool {
    actor_role >= required_role
}

/// The authenticated caller of a domain operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Actor {
    pub id: UserId,
    pub role: Role,
}

impl Actor {
    pub fn new(id: UserId, role: Role) -> Self {
        Self { id, role }
    }

    pub fn require(&self, role: Role) -> crate::Result<()> {
        if check_access(self.role, role) {
            Ok(())
        } else {
            Err(crate::Error::Forbidden)
        }
    }
}

/// Markdown with `$...$` / `$$...$$` math and image references of the form
/// `![alt](asset:<id>)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RichText(pub String);

impl RichText {
    pub fn new(text: impl Into<String>) -> Self {
        Self(text.into())
    }

    pub fn is_blank(&self) -> bool {
        self.0.trim().is_empty()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Asset ids referenced by embedded images, in order of appearance.
    pub fn asset_refs(&self) -> Vec<&str> {
        let mut refs = Vec::new();
        let mut rest = self.0.as_str();
        while let Some(pos) = rest.find("](asset:") {
            let tail = &rest[pos + "](asset:".len()..];
            match tail.find(')') {
                Some(end) => {
                    refs.push(&tail[..end]);
                    rest = &tail[end..];
                }
                None => break,
            }
        }
        refs
    }
}

impl From<&str> for RichText {
    fn from(text: &str) -> Self {
        Self(text.to_owned())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuestionKind {
    MultipleChoice,
    MultipleTrueFalse,
    OpenEnded,
}

/// One answer option. For multiple-choice items `is_correct` marks the key;
/// for multiple true/false items each option is a statement and `is_correct`
/// is its truth value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerOption {
    pub id: OptionId,
    pub text: RichText,
    pub is_correct: bool,
    /// Answer-specific informative feedback.
    #[serde(default)]
    pub feedback: RichText,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ReviewStage {
    Draft,
    InReview,
    Published,
    Retired,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationState {
    pub value: ReviewStage,
    pub approvals: BTreeSet<UserId>,
}

impl PublicationState {
    pub fn draft() -> Self {
        Self {
            value: ReviewStage::Draft,
            approvals: BTreeSet::new(),
        }
    }

    pub fn is_published(&self) -> bool {
        self.value == ReviewStage::Published
    }
}

impl Default for PublicationState {
    fn default() -> Self {
        Self::draft()
    }
}

/// The authorable part of a RAT. Everything a creator may set or edit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatContent {
    pub question: RichText,
    pub kind: QuestionKind,
    #[serde(default)]
    pub options: Vec<AnswerOption>,
    #[serde(default)]
    pub accepted_answers: Vec<String>,
    #[serde(default)]
    pub topics: BTreeSet<TopicId>,
    #[serde(default)]
    pub concepts: BTreeSet<ConceptId>,
    #[serde(default)]
    pub lectures: BTreeSet<LectureId>,
    #[serde(default)]
    pub criteria: BTreeSet<u32>,
    #[serde(default)]
    pub is_cross_lecture: bool,
    #[serde(default)]
    pub general_feedback: RichText,
}

/// Rapid assessment task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rat {
    pub id: RatId,
    #[serde(flatten)]
    pub content: RatContent,
    pub author: UserId,
    pub state: PublicationState,
    pub created_at: DateTime<Utc>,
}

impl Rat {
    pub fn option(&self, id: OptionId) -> Option<&AnswerOption> {
        self.content.options.iter().find(|o| o.id == id)
    }

    pub fn is_published(&self) -> bool {
        self.state.is_published()
    }
}

/// Which concept belongs to which topic.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Taxonomy {
    pub concepts: BTreeMap<ConceptId, TopicId>,
}

impl Taxonomy {
    pub fn add_concept(&mut self, topic: TopicId, concept: ConceptId) {
        self.concepts.insert(concept, topic);
    }

    pub fn topic_of(&self, concept: &ConceptId) -> Option<&TopicId> {
        self.concepts.get(concept)
    }
}

/// A broken authoring rule. Violations are data, not failures.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "code")]
pub enum Violation {
    EmptyQuestion,
    NoTopic,
    TooFewOptions,
    NoCorrectOption,
    MultipleCorrectOptions,
    NoStatements,
    NoAcceptedAnswer,
    OptionsOnOpenEnded,
    DuplicateOptionId { option: OptionId },
    MissingOptionFeedback { option: OptionId },
    UnknownConcept { concept: ConceptId },
    ConceptOutsideTopics { concept: ConceptId },
    UnknownCriterion { criterion: u32 },
}

impl Violation {
    /// The RAT field the violation is about.
    pub fn field(&self) -> &'static str {
        match self {
            Violation::EmptyQuestion => "question",
            Violation::NoTopic => "topics",
            Violation::TooFewOptions
            | Violation::NoCorrectOption
            | Violation::MultipleCorrectOptions
            | Violation::NoStatements
            | Violation::OptionsOnOpenEnded
            | Violation::DuplicateOptionId { .. } => "options",
            Violation::MissingOptionFeedback { .. } => "options.feedback",
            Violation::NoAcceptedAnswer => "accepted_answers",
            Violation::UnknownConcept { .. } | Violation::ConceptOutsideTopics { .. } => {
                "concepts"
            }
            Violation::UnknownCriterion { .. } => "criteria",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?} ({})", self.field())
    }
}

/// Checks every authoring rule. Returns violations sorted and deduplicated,
/// so the same input always yields the same list.
pub fn validate_rat(
    content: &RatContent,
    taxonomy: &Taxonomy,
    catalog: &CriterionCatalog,
) -> Vec<Violation> {
    let mut out = BTreeSet::new();

    if content.question.is_blank() {
        out.insert(Violation::EmptyQuestion);
    }
    if content.topics.is_empty() {
        out.insert(Violation::NoTopic);
    }

    let mut seen = BTreeSet::new();
    for option in &content.options {
        if !seen.insert(option.id) {
            out.insert(Violation::DuplicateOptionId { option: option.id });
        }
    }

    match content.kind {
        QuestionKind::MultipleChoice => {
            if content.options.len() < 2 {
                out.insert(Violation::TooFewOptions);
            }
            match content.options.iter().filter(|o| o.is_correct).count() {
                0 => {
                    out.insert(Violation::NoCorrectOption);
                }
                1 => {}
                _ => {
                    out.insert(Violation::MultipleCorrectOptions);
                }
            }
            for option in content.options.iter().filter(|o| !o.is_correct) {
                if option.feedback.is_blank() {
                    out.insert(Violation::MissingOptionFeedback { option: option.id });
                }
            }
        }
        QuestionKind::MultipleTrueFalse => {
            if content.options.is_empty() {
                out.insert(Violation::NoStatements);
            }
            // Any statement can be judged wrongly, so each needs feedback.
            for statement in &content.options {
                if statement.feedback.is_blank() {
                    out.insert(Violation::MissingOptionFeedback {
                        option: statement.id,
                    });
                }
            }
        }
        QuestionKind::OpenEnded => {
            if !content.options.is_empty() {
                out.insert(Violation::OptionsOnOpenEnded);
            }
            if content
                .accepted_answers
                .iter()
                .all(|a| normalize_answer(a).is_empty())
            {
                out.insert(Violation::NoAcceptedAnswer);
            }
        }
    }

    for concept in &content.concepts {
        match taxonomy.topic_of(concept) {
            None => {
                out.insert(Violation::UnknownConcept {
                    concept: concept.clone(),
                });
            }
            Some(topic) if !content.topics.contains(topic) => {
                out.insert(Violation::ConceptOutsideTopics {
                    concept: concept.clone(),
                });
            }
            Some(_) => {}
        }
    }

    for &criterion in &content.criteria {
        if catalog.get(criterion).is_none() {
            out.insert(Violation::UnknownCriterion { criterion });
        }
    }

    out.into_iter().collect()
}

/// Trim, collapse inner whitespace, case-fold.
pub fn normalize_answer(raw: &str) -> String {
    raw.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScaffoldKind {
    Text,
    VideoLink,
    ExternalLink,
    BookReference,
}

/// Optional, learner-requested support material attached to a RAT.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scaffold {
    pub id: ScaffoldId,
    pub rat_id: RatId,
    pub kind: ScaffoldKind,
    pub body: RichText,
    pub approvals: BTreeSet<UserId>,
    /// One rating per user, 1..=5.
    pub ratings: BTreeMap<UserId, u8>,
    pub suggested_by: UserId,
    pub created_at: DateTime<Utc>,
}

impl Scaffold {
    pub fn is_visible(&self, threshold: usize) -> bool {
        self.approvals.len() >= threshold
    }

    pub fn mean_rating(&self) -> Option<f64> {
        if self.ratings.is_empty() {
            return None;
        }
        let sum: u32 = self.ratings.values().map(|&r| u32::from(r)).sum();
        Some(f64::from(sum) / self.ratings.len() as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttemptContext {
    AutoRats,
    Sheet,
    LiveSheet,
    CrossLecture,
}

/// A student's answer. The variant must match the RAT's [`QuestionKind`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Response {
    /// Chosen option of a multiple-choice item.
    Choice(OptionId),
    /// Submitted truth value per statement of a multiple true/false item.
    Statements(BTreeMap<OptionId, bool>),
    /// Free text of an open-ended item.
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Correct,
    Incorrect,
    Ungraded,
}

impl Verdict {
    pub fn from_bool(correct: bool) -> Self {
        if correct {
            Verdict::Correct
        } else {
            Verdict::Incorrect
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Verdict::Correct => Some(true),
            Verdict::Incorrect => Some(false),
            Verdict::Ungraded => None,
        }
    }

    pub fn is_graded(self) -> bool {
        self != Verdict::Ungraded
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    pub id: AttemptId,
    pub student: UserId,
    pub rat: RatId,
    pub lecture: Option<LectureId>,
    pub context: AttemptContext,
    pub response: Response,
    pub verdict: Verdict,
    pub submitted_at: DateTime<Utc>,
    pub is_first_for_rat: bool,
    /// Criteria counts of the RAT at submission time, so later edits of the
    /// RAT do not rewrite competence history.
    pub counts: CompetenceCounts,
}
