//! Technology-acceptance questionnaire model and its statistics: frequency
//! encoding, category scores, simple regression with a t-test on r,
//! Sobel mediation and centered moderation.

pub mod ingest;
pub mod questionnaire;
pub mod report;
pub mod stats;

pub use questionnaire::{category_score, confirmation_rate, encode_frequency, Category, CategoryDef, Frequency, SurveyResponse};
pub use report::{analyze, SurveyReport};
pub use stats::{mediation, moderation, regress, MediationResult, ModerationResult, RegressionResult};
pub use ingest::read_csv;

#[derive(Debug, thiserror::Error)]
pub enum SurveyError {
    #[error("value is missing")]
    Missing,
    #[error("need at least {needed} complete observations, got {got}")]
    TooFewPairs { needed: usize, got: usize },
    #[error("a variable has zero variance or the predictors are collinear")]
    ZeroVariance,
    #[error("unknown usage frequency {0:?}")]
    UnknownFrequency(String),
    #[error("item {item}: {value} is outside 1..=7")]
    LikertOutOfRange { item: String, value: i64 },
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
