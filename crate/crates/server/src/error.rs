use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use rats_core::{Error as CoreError, ErrorClass};
use serde_json::json;

/// Errors outside the domain model.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AuthError {
    #[error("missing or invalid bearer token")]
    Unauthenticated,
    #[error("email domain is not allowed")]
    DomainNotAllowed,
    #[error("password must have at least {0} characters")]
    WeakPassword(usize),
    #[error("email or password is wrong")]
    BadCredentials,
    #[error("email address is not verified")]
    Unverified,
    #[error("an account with this email exists")]
    EmailTaken,
    #[error("not a valid email address")]
    InvalidEmail,
    #[error("verification token is unknown or used")]
    BadToken,
}

impl AuthError {
    pub fn code(&self) -> &'static str {
        match self {
            AuthError::Unauthenticated => "Unauthenticated",
            AuthError::DomainNotAllowed => "DomainNotAllowed",
            AuthError::WeakPassword(_) => "WeakPassword",
            AuthError::BadCredentials => "BadCredentials",
            AuthError::Unverified => "Unverified",
            AuthError::EmailTaken => "EmailTaken",
            AuthError::InvalidEmail => "InvalidEmail",
            AuthError::BadToken => "BadToken",
        }
    }

    fn status(&self) -> StatusCode {
        match self {
            AuthError::Unauthenticated | AuthError::BadCredentials => StatusCode::UNAUTHORIZED,
            AuthError::Unverified => StatusCode::FORBIDDEN,
            AuthError::EmailTaken => StatusCode::CONFLICT,
            AuthError::BadToken => StatusCode::NOT_FOUND,
            AuthError::DomainNotAllowed | AuthError::WeakPassword(_) | AuthError::InvalidEmail => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
        }
    }
}

#[derive(Debug)]
pub enum ApiError {
    Core(CoreError),
    Auth(AuthError),
    BadRequest(String),
    Internal(anyhow::Error),
}

pub type ApiResult<T> = Result<T, ApiError>;

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        ApiError::Core(e)
    }
}

impl From<AuthError> for ApiError {
    fn from(e: AuthError) -> Self {
        ApiError::Auth(e)
    }
}

impl From<anyhow::Error> for ApiError {
    fn from(e: anyhow::Error) -> Self {
        ApiError::Internal(e)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::BadRequest(e.body_text())
    }
}

impl From<PathRejection> for ApiError {
    fn from(e: PathRejection) -> Self {
        ApiError::BadRequest(e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::BadRequest(e.body_text())
    }
}

pub fn status_of(class: ErrorClass) -> StatusCode {
    match class {
        ErrorClass::Forbidden => StatusCode::FORBIDDEN,
        ErrorClass::NotFound => StatusCode::NOT_FOUND,
        ErrorClass::Conflict => StatusCode::CONFLICT,
        ErrorClass::Invalid => StatusCode::UNPROCESSABLE_ENTITY,
    }
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::Core(e) => status_of(e.class()),
            ApiError::Auth(e) => e.status(),
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            ApiError::Core(e) => e.code(),
            ApiError::Auth(e) => e.code(),
            ApiError::BadRequest(_) => "BadRequest",
            ApiError::Internal(_) => "Internal",
        }
    }

    pub fn body(&self) -> serde_json::Value {
        let message = match self {
            ApiError::Core(e) => e.to_string(),
            ApiError::Auth(e) => e.to_string(),
            ApiError::BadRequest(m) => m.clone(),
            // details go to the log, not the client
            ApiError::Internal(_) => "internal error".into(),
        };
        let mut error = json!({ "code": self.code(), "message": message });
        match self {
            ApiError::Core(CoreError::ValidationFailed(violations)) => {
                error["violations"] = json!(violations
                    .iter()
                    .map(|v| {
                        let mut value = serde_json::to_value(v).unwrap_or_default();
                        value["field"] = json!(v.field());
                        value
                    })
                    .collect::<Vec<_>>());
            }
            ApiError::Core(CoreError::InvalidMember(rat, reason)) => {
                error["rat"] = json!(rat);
                error["reason"] = json!(reason);
            }
            _ => {}
        }
        json!({ "error": error })
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if let ApiError::Internal(e) = &self {
            tracing::error!(error = %e, "request failed");
        }
        (self.status(), axum::Json(self.body())).into_response()
    }
}
