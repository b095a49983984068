//! Ontology warehouse, registry and subsumption queries.

mod model;
mod registry;
mod resolve;
pub mod tree;
mod warehouse;

use std::path::{Path, PathBuf};

pub use model::*;
pub use registry::{CompatibleConcepts, OntologyRegistry, BUILTIN_ONTOLOGY};
pub use warehouse::OntologyWarehouse;

use crate::iri::Iri;
use crate::wsml::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OntologyError {
    #[error("directory not found: {}", .0.display())]
    DirectoryNotFound(PathBuf),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("ontology {iri} declared in both {} and {}", first.display(), second.display())]
    DuplicateIri { iri: Iri, first: PathBuf, second: PathBuf },
    #[error("{}{error}", path.as_ref().map(|p| format!("{}:", p.display())).unwrap_or_default())]
    Parse { path: Option<PathBuf>, error: ParseError },
    #[error("ontology not in warehouse: {0}")]
    NotInWarehouse(Iri),
    #[error("unknown element: {0}")]
    UnknownElement(Iri),
    #[error("cyclic inheritance: {}", .0.iter().map(Iri::as_str).collect::<Vec<_>>().join(" -> "))]
    CyclicInheritance(Vec<Iri>),
    #[error("{0} is not loaded; load its ontology first")]
    UnresolvedStub(Iri),
}

impl OntologyError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        OntologyError::Io { path: path.to_path_buf(), message: e.to_string() }
    }

    pub fn code(&self) -> &'static str {
        match self {
            OntologyError::DirectoryNotFound(_) => "DirectoryNotFound",
            OntologyError::Io { .. } => "IoError",
            OntologyError::DuplicateIri { .. } => "DuplicateIri",
            OntologyError::Parse { .. } => "ParseError",
            OntologyError::NotInWarehouse(_) => "NotInWarehouse",
            OntologyError::UnknownElement(_) => "UnknownElement",
            OntologyError::CyclicInheritance(_) => "CyclicInheritance",
            OntologyError::UnresolvedStub(_) => "UnresolvedStub",
        }
    }
}
