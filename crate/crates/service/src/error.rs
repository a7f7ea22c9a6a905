use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;
use votesearch_core::Error as CoreError;

/// An error body `{"error": ..., "status": ...}` plus any extra fields.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
            extra: Default::default(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    pub fn with(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.extra.insert(key.to_owned(), value.into());
        self
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let status = match &e {
            CoreError::UnknownResource(_) => StatusCode::NOT_FOUND,
            CoreError::NoSupporters | CoreError::NoResults => StatusCode::UNPROCESSABLE_ENTITY,
            CoreError::InvalidParameter(_)
            | CoreError::EmptyCommittee
            | CoreError::CommitteeTooLarge { .. }
            | CoreError::EnumerationCap { .. }
            | CoreError::DuplicateMember(_)
            | CoreError::LengthMismatch { .. } => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let message = match &e {
            CoreError::NoSupporters => "no supporters: nobody approves any query movie".to_owned(),
            CoreError::NoResults => "no supporters: the query's supporters approve nothing else".to_owned(),
            _ => e.to_string(),
        };
        if status == StatusCode::INTERNAL_SERVER_ERROR {
            log::error!("{e}");
        }
        Self::new(status, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = self.extra;
        body.insert("error".into(), json!(self.message));
        body.insert("status".into(), json!(self.status.as_u16()));
        (self.status, Json(serde_json::Value::Object(body))).into_response()
    }
}
