//! The axiom graph: nodes, typed connections, and structural queries.

mod analysis;
mod outline;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::iri::Iri;
use crate::ontology::{AttributeDef, ParameterDef};

pub use analysis::{ChainKind, Validity};
pub use outline::{outline, OutlineNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConnId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for ConnId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

pub const ROOT: NodeId = NodeId(0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum OperatorKind {
    And,
    Or,
    Not,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 3] = [OperatorKind::And, OperatorKind::Or, OperatorKind::Not];

    pub fn label(self) -> &'static str {
        match self {
            OperatorKind::And => "AND",
            OperatorKind::Or => "OR",
            OperatorKind::Not => "NOT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSlot {
    pub attr: AttributeDef,
    /// Name shown beside the attribute and used in generated text. Set
    /// exactly when the slot has an outgoing connection.
    pub bound_var_name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterSlot {
    pub param: ParameterDef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeKind {
    Root,
    Variable { name: String, concept: Iri, slots: Vec<AttributeSlot> },
    InstanceRef { instance: Iri, concept: Iri },
    PrimitiveValue { datatype: Iri, value: String },
    RelationUse { relation: Iri, params: Vec<ParameterSlot> },
    Operator { operator: OperatorKind },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    #[serde(flatten)]
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<Layout>,
}

impl Node {
    pub fn variable_name(&self) -> Option<&str> {
        match &self.kind {
            NodeKind::Variable { name, .. } => Some(name),
            _ => None,
        }
    }

    pub fn operator(&self) -> Option<OperatorKind> {
        match self.kind {
            NodeKind::Operator { operator } => Some(operator),
            _ => None,
        }
    }

    pub fn slot(&self, attr: &str) -> Option<&AttributeSlot> {
        match &self.kind {
            NodeKind::Variable { slots, .. } => slots.iter().find(|s| s.attr.name == attr),
            _ => None,
        }
    }

    pub fn slot_mut(&mut self, attr: &str) -> Option<&mut AttributeSlot> {
        match &mut self.kind {
            NodeKind::Variable { slots, .. } => slots.iter_mut().find(|s| s.attr.name == attr),
            _ => None,
        }
    }

    pub fn param(&self, index: usize) -> Option<&ParameterSlot> {
        match &self.kind {
            NodeKind::RelationUse { params, .. } => params.get(index),
            _ => None,
        }
    }

    /// Concept or datatype that values produced by this node belong to.
    pub fn value_type(&self) -> Option<&Iri> {
        match &self.kind {
            NodeKind::Variable { concept, .. } | NodeKind::InstanceRef { concept, .. } => Some(concept),
            NodeKind::PrimitiveValue { datatype, .. } => Some(datatype),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            NodeKind::Root => "root",
            NodeKind::Variable { .. } => "variable",
            NodeKind::InstanceRef { .. } => "instance",
            NodeKind::PrimitiveValue { .. } => "primitive",
            NodeKind::RelationUse { .. } => "relation",
            NodeKind::Operator { .. } => "operator",
        }
    }
}

/// Where a connection starts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Endpoint {
    Root,
    Attribute { node: NodeId, attr: String },
    Parameter { node: NodeId, index: usize },
    Operator { node: NodeId },
}

impl Endpoint {
    pub fn node(&self) -> NodeId {
        match self {
            Endpoint::Root => ROOT,
            Endpoint::Attribute { node, .. } | Endpoint::Parameter { node, .. } | Endpoint::Operator { node } => {
                *node
            }
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Root => f.write_str("start"),
            Endpoint::Attribute { node, attr } => write!(f, "{node}.{attr}"),
            Endpoint::Parameter { node, index } => write!(f, "{node}#{index}"),
            Endpoint::Operator { node } => write!(f, "{node}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connection {
    pub id: ConnId,
    pub source: Endpoint,
    pub target: NodeId,
}

/// An axiom under construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomModel {
    pub axiom_name: String,
    /// Ontology of the first variable created; its elements print unqualified.
    pub home_ontology: Option<Iri>,
    pub nodes: BTreeMap<NodeId, Node>,
    pub connections: BTreeMap<ConnId, Connection>,
    pub next_node: u32,
    pub next_conn: u32,
}

impl AxiomModel {
    pub fn new(axiom_name: impl Into<String>) -> Self {
        let mut nodes = BTreeMap::new();
        nodes.insert(ROOT, Node { id: ROOT, kind: NodeKind::Root, layout: None });
        AxiomModel {
            axiom_name: axiom_name.into(),
            home_ontology: None,
            nodes,
            connections: BTreeMap::new(),
            next_node: 1,
            next_conn: 0,
        }
    }

    pub fn root(&self) -> NodeId {
        ROOT
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    pub fn node_mut(&mut self, id: NodeId) -> Option<&mut Node> {
        self.nodes.get_mut(&id)
    }

    pub fn connection(&self, id: ConnId) -> Option<&Connection> {
        self.connections.get(&id)
    }

    pub fn add_node(&mut self, kind: NodeKind) -> NodeId {
        let id = NodeId(self.next_node);
        self.next_node += 1;
        self.nodes.insert(id, Node { id, kind, layout: None });
        id
    }

    pub fn add_connection(&mut self, source: Endpoint, target: NodeId) -> ConnId {
        let id = ConnId(self.next_conn);
        self.next_conn += 1;
        self.connections.insert(id, Connection { id, source, target });
        id
    }

    /// Removes a node and every connection touching it.
    pub fn remove_node(&mut self, id: NodeId) -> Option<Node> {
        let node = self.nodes.remove(&id)?;
        self.connections.retain(|_, c| c.target != id && c.source.node() != id);
        Some(node)
    }

    pub fn remove_connection(&mut self, id: ConnId) -> Option<Connection> {
        self.connections.remove(&id)
    }

    /// Connections in id order.
    pub fn connections_iter(&self) -> impl Iterator<Item = &Connection> {
        self.connections.values()
    }

    pub fn variables(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values().filter(|n| matches!(n.kind, NodeKind::Variable { .. }))
    }

    /// The non-root node count.
    pub fn element_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Canonical JSON used for equality checks across undo/redo and persistence.
    pub fn serialization(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }
}
