//! Saving and restoring axiom models as JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{EditMode, Editor};
use crate::graph::{AxiomModel, Connection, Node, NodeKind};
use crate::iri::Iri;
use crate::ontology::{OntologyError, OntologyRegistry, OntologyWarehouse, BUILTIN_ONTOLOGY};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("ontology {0} is not in the warehouse")]
    MissingOntology(Iri),
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("inconsistent model: {0}")]
    Integrity(String),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}

impl PersistError {
    pub fn code(&self) -> &'static str {
        match self {
            PersistError::MissingOntology(_) => "MissingOntology",
            PersistError::Json(_) => "MalformedDocument",
            PersistError::Version(_) => "UnsupportedVersion",
            PersistError::Integrity(_) => "Integrity",
            PersistError::Ontology(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistedAxiom {
    pub format: u32,
    pub axiom_name: String,
    /// Ontologies that must be loadable on restore, in load order.
    pub ontologies: Vec<Iri>,
    pub home_ontology: Option<Iri>,
    /// Last `autoGeneratedAxiom_N` number handed out by the session.
    #[serde(default)]
    pub counter: u64,
    #[serde(default)]
    pub mode: EditMode,
    pub nodes: Vec<Node>,
    pub connections: Vec<Connection>,
    pub next_node: u32,
    pub next_conn: u32,
}

fn referenced(node: &Node) -> Vec<&Iri> {
    match &node.kind {
        NodeKind::Variable { concept, .. } => vec![concept],
        NodeKind::InstanceRef { instance, concept } => vec![instance, concept],
        NodeKind::PrimitiveValue { datatype, .. } => vec![datatype],
        NodeKind::RelationUse { relation, .. } => vec![relation],
        NodeKind::Root | NodeKind::Operator { .. } => vec![],
    }
}

impl PersistedAxiom {
    pub fn capture(editor: &Editor, reg: &OntologyRegistry, counter: u64) -> Self {
        let m = editor.model();
        let mut needed: Vec<&Iri> = m.nodes.values().flat_map(referenced).filter_map(|e| reg.ontology_of(e)).collect();
        needed.extend(m.home_ontology.as_ref());
        let ontologies = reg
            .ontologies()
            .map(|o| &o.iri)
            .filter(|o| o.as_str() != BUILTIN_ONTOLOGY && needed.contains(o))
            .cloned()
            .collect();
        PersistedAxiom {
            format: FORMAT_VERSION,
            axiom_name: m.axiom_name.clone(),
            ontologies,
            home_ontology: m.home_ontology.clone(),
            counter,
            mode: editor.mode,
            nodes: m.nodes.values().cloned().collect(),
            connections: m.connections.values().cloned().collect(),
            next_node: m.next_node,
            next_conn: m.next_conn,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, PersistError> {
        let doc: PersistedAxiom = serde_json::from_str(text)?;
        if doc.format != FORMAT_VERSION {
            return Err(PersistError::Version(doc.format));
        }
        Ok(doc)
    }

    pub fn model(&self) -> Result<AxiomModel, PersistError> {
        let m = AxiomModel {
            axiom_name: self.axiom_name.clone(),
            home_ontology: self.home_ontology.clone(),
            nodes: self.nodes.iter().map(|n| (n.id, n.clone())).collect::<BTreeMap<_, _>>(),
            connections: self.connections.iter().map(|c| (c.id, c.clone())).collect(),
            next_node: self.next_node,
            next_conn: self.next_conn,
        };
        if m.nodes.len() != self.nodes.len() || m.connections.len() != self.connections.len() {
            return Err(PersistError::Integrity("duplicate ids".into()));
        }
        if m.nodes.keys().any(|n| n.0 >= m.next_node) || m.connections.keys().any(|c| c.0 >= m.next_conn) {
            return Err(PersistError::Integrity("id counters behind existing ids".into()));
        }
        m.check_integrity().map_err(PersistError::Integrity)?;
        Ok(m)
    }

    /// Loads the listed ontologies that are missing and rebuilds the editor.
    /// Undo history starts empty.
    pub fn restore(&self, reg: &mut OntologyRegistry, warehouse: Option<&OntologyWarehouse>) -> Result<Editor, PersistError> {
        for iri in &self.ontologies {
            if reg.is_loaded(iri) {
                continue;
            }
            match warehouse {
                Some(wh) if wh.contains(iri) => {
                    reg.load_by_iri(wh, iri)?;
                }
                _ => return Err(PersistError::MissingOntology(iri.clone())),
            }
        }
        let mut editor = Editor::from_model(self.model()?);
        editor.mode = self.mode;
        Ok(editor)
    }
}
