use crate::ids::{RatId, ScaffoldId};
use crate::model::Violation;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse class of a failure, used by the HTTP layer to pick a status code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Forbidden,
    NotFound,
    Conflict,
    Invalid,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("caller lacks the required role or ownership")]
    Forbidden,
    #[error("{0} not found")]
    NotFound(&'static str),
    #[error("RAT failed validation: {0:?}")]
    ValidationFailed(Vec<Violation>),
    #[error("criterion {0} is not in the catalog")]
    UnknownCriterion(u32),
    #[error("authors cannot approve their own content")]
    SelfApproval,
    #[error("reviewer already approved")]
    DuplicateApproval,
    #[error("content is not in a reviewable state")]
    NotReviewable,
    #[error("comment body is empty")]
    EmptyBody,
    #[error("sheet session is already complete")]
    SessionComplete,
    #[error("submission does not target the current RAT of the session")]
    StaleSubmission,
    #[error("RAT {0} is not published")]
    RatNotPublished(RatId),
    #[error("response does not match the question kind")]
    ShapeMismatch,
    #[error("rating must be between 1 and 5")]
    OutOfRange,
    #[error("scaffold {0} was not viewed by this student")]
    NotViewed(ScaffoldId),
    #[error("student has not answered this RAT")]
    NotAnswered,
    #[error("join code does not match the lecture")]
    BadCode,
    #[error("lecture has no syllabus")]
    NoSyllabus,
    #[error("RAT {0} cannot be part of this sheet: {1}")]
    InvalidMember(RatId, &'static str),
    #[error("a sheet with this name already exists in the lecture")]
    DuplicateName,
    #[error("live session is closed")]
    SessionClosed,
    #[error("a live session for this sheet is already open")]
    LiveAlreadyOpen,
    #[error("student already answered this RAT")]
    AlreadyAnswered,
    #[error("student is not a member of the lecture")]
    NotMember,
    #[error("attempt is already graded")]
    AlreadyGraded,
    #[error("invalid lecture: {0}")]
    InvalidLecture(&'static str),
    #[error("syllabus date is not an appointment date of the lecture")]
    DateNotScheduled,
}

impl Error {
    /// Machine-readable code, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Forbidden => "Forbidden",
            Error::NotFound(_) => "NotFound",
            Error::ValidationFailed(_) => "ValidationFailed",
            Error::UnknownCriterion(_) => "UnknownCriterion",
            Error::SelfApproval => "SelfApproval",
            Error::DuplicateApproval => "DuplicateApproval",
            Error::NotReviewable => "NotReviewable",
            Error::EmptyBody => "EmptyBody",
            Error::SessionComplete => "SessionComplete",
            Error::StaleSubmission => "StaleSubmission",
            Error::RatNotPublished(_) => "RatNotPublished",
            Error::ShapeMismatch => "ShapeMismatch",
            Error::OutOfRange => "OutOfRange",
            Error::NotViewed(_) => "NotViewed",
            Error::NotAnswered => "NotAnswered",
            Error::BadCode => "BadCode",
            Error::NoSyllabus => "NoSyllabus",
            Error::InvalidMember(..) => "InvalidMember",
            Error::DuplicateName => "DuplicateName",
            Error::SessionClosed => "SessionClosed",
            Error::LiveAlreadyOpen => "LiveAlreadyOpen",
            Error::AlreadyAnswered => "AlreadyAnswered",
            Error::NotMember => "NotMember",
            Error::AlreadyGraded => "AlreadyGraded",
            Error::InvalidLecture(_) => "InvalidLecture",
            Error::DateNotScheduled => "DateNotScheduled",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Forbidden | Error::NotMember | Error::BadCode => ErrorClass::Forbidden,
            Error::NotFound(_) => ErrorClass::NotFound,
            Error::ValidationFailed(_)
            | Error::UnknownCriterion(_)
            | Error::EmptyBody
            | Error::ShapeMismatch
            | Error::OutOfRange
            | Error::InvalidMember(..)
            | Error::InvalidLecture(_)
            | Error::DateNotScheduled => ErrorClass::Invalid,
            Error::SelfApproval
            | Error::DuplicateApproval
            | Error::NotReviewable
            | Error::SessionComplete
            | Error::StaleSubmission
            | Error::RatNotPublished(_)
            | Error::NotViewed(_)
            | Error::NotAnswered
            | Error::NoSyllabus
            | Error::DuplicateName
            | Error::SessionClosed
            | Error::LiveAlreadyOpen
            | Error::AlreadyAnswered
            | Error::AlreadyGraded => ErrorClass::Conflict,
        }
    }
}
