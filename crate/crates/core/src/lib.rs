//! Domain model and engines of the RAT feedback platform: content and
//! review, grading and feedback, competence estimation, scheduling, live
//! sessions and dashboard aggregates.
//!
//! All state lives in [`ContentDb`]. It holds no personal data; users are
//! referred to by pseudonymous [`UserId`]s only.

pub mod analytics;
pub mod assessment;
pub mod competence;
pub mod db;
pub mod error;
pub mod ids;
pub mod live;
pub mod model;
pub mod review;
pub mod scheduling;

pub use competence::{Competence, CompetenceCounts, CriterionCatalog, Level, PerCompetence};
pub use db::{ContentDb, Notification, Policy};
pub use error::{Error, ErrorClass, Result};
pub use ids::*;
pub use model::{Actor, Rat, RatContent, Response, Role, Verdict};
