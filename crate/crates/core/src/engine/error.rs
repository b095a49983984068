use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ontology::OntologyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorCode {
    ModeError,
    SlotOccupied,
    Incompatible,
    WouldCycle,
    NotArity,
    StubConcept,
    StubType,
    BadLiteral,
    AmbiguousDefault,
    NoDefaultType,
    UnknownConcept,
    UnknownInstance,
    UnknownRelation,
    UnknownNode,
    UnknownConnection,
    WrongKind,
    NoSuchSlot,
    DuplicateName,
    BadName,
    CannotDeleteRoot,
    NotAllowed,
    UnknownChain,
    MissingOperand,
    HasConnections,
    Unbound,
    EmptyStack,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::ModeError => "ModeError",
            ErrorCode::SlotOccupied => "SlotOccupied",
            ErrorCode::Incompatible => "Incompatible",
            ErrorCode::WouldCycle => "WouldCycle",
            ErrorCode::NotArity => "NotArity",
            ErrorCode::StubConcept => "StubConcept",
            ErrorCode::StubType => "StubType",
            ErrorCode::BadLiteral => "BadLiteral",
            ErrorCode::AmbiguousDefault => "AmbiguousDefault",
            ErrorCode::NoDefaultType => "NoDefaultType",
            ErrorCode::UnknownConcept => "UnknownConcept",
            ErrorCode::UnknownInstance => "UnknownInstance",
            ErrorCode::UnknownRelation => "UnknownRelation",
            ErrorCode::UnknownNode => "UnknownNode",
            ErrorCode::UnknownConnection => "UnknownConnection",
            ErrorCode::WrongKind => "WrongKind",
            ErrorCode::NoSuchSlot => "NoSuchSlot",
            ErrorCode::DuplicateName => "DuplicateName",
            ErrorCode::BadName => "BadName",
            ErrorCode::CannotDeleteRoot => "CannotDeleteRoot",
            ErrorCode::NotAllowed => "NotAllowed",
            ErrorCode::UnknownChain => "UnknownChain",
            ErrorCode::MissingOperand => "MissingOperand",
            ErrorCode::HasConnections => "HasConnections",
            ErrorCode::Unbound => "Unbound",
            ErrorCode::EmptyStack => "EmptyStack",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A refused edit. The model is left untouched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("{code}: {message}")]
pub struct EngineError {
    pub code: ErrorCode,
    pub message: String,
}

impl EngineError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        EngineError { code, message: message.into() }
    }
}

pub(crate) fn err<T>(code: ErrorCode, message: impl Into<String>) -> Result<T, EngineError> {
    Err(EngineError::new(code, message))
}

/// Compatibility failures caused by unloaded ontologies surface as StubType.
impl From<OntologyError> for EngineError {
    fn from(e: OntologyError) -> Self {
        match e {
            OntologyError::UnresolvedStub(_) => EngineError::new(ErrorCode::StubType, e.to_string()),
            OntologyError::UnknownElement(_) => EngineError::new(ErrorCode::UnknownConcept, e.to_string()),
            other => EngineError::new(ErrorCode::NotAllowed, other.to_string()),
        }
    }
}
