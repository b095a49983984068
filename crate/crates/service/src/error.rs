use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use thiserror::Error;

use wsml_axiom::engine::EngineError;
use wsml_axiom::ontology::OntologyError;
use wsml_axiom::persist::PersistError;
use wsml_axiom::wsml::Position;

/// Error body: `{code, message, position?}`.
#[derive(Debug, Clone, Serialize, Error)]
#[error("{code}: {message}")]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<Position>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: impl Into<String>, message: impl Into<String>) -> Self {
        ApiError { status, code: code.into(), message: message.into(), position: None }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", message)
    }

    pub fn no_session(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "NoSuchSession", format!("no axiom session '{id}'"))
    }

    pub fn stale(seen: u64, current: u64) -> Self {
        ApiError::new(StatusCode::CONFLICT, "StaleRevision", format!("request saw revision {seen}, session is at {current}"))
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        ApiError::new(StatusCode::CONFLICT, e.code.as_str(), e.message)
    }
}

impl From<OntologyError> for ApiError {
    fn from(e: OntologyError) -> Self {
        let status = match e {
            OntologyError::NotInWarehouse(_) | OntologyError::DirectoryNotFound(_) => StatusCode::NOT_FOUND,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        let position = match &e {
            OntologyError::Parse { error, .. } => Some(error.pos),
            _ => None,
        };
        ApiError { status, code: e.code().to_string(), message: e.to_string(), position }
    }
}

impl From<PersistError> for ApiError {
    fn from(e: PersistError) -> Self {
        let status = match e {
            PersistError::Json(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}
