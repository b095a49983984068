//! Wire types. A [`GraphStateDto`] is a pure function of the editor and
//! registry, so replaying the same operations elsewhere yields the same DTO.

use serde::{Deserialize, Serialize};

use wsml_axiom::codegen::{generate_axiom_text, RenderOptions};
use wsml_axiom::engine::{EditMode, Editor, MenuTarget, OpOutcome};
use wsml_axiom::graph::{outline, ConnId, Endpoint, Layout, NodeId, NodeKind, OutlineNode, Validity};
use wsml_axiom::iri::Iri;
use wsml_axiom::ontology::{LoadedOntology, OntologyRegistry};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotDto {
    pub attr: String,
    #[serde(rename = "type")]
    pub types: Vec<String>,
    pub bound: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamDto {
    pub index: usize,
    pub name: Option<String>,
    #[serde(rename = "type")]
    pub types: Vec<String>,
    /// Variable bound to the parameter, if any.
    pub bound: Option<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDto {
    pub id: NodeId,
    pub kind: String,
    pub label: String,
    /// Concept, datatype or relation, as written in generated text.
    #[serde(rename = "type", skip_serializing_if = "Option::is_none")]
    pub type_name: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub slots: Vec<SlotDto>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<ParamDto>,
    pub validity: Validity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layout: Option<Layout>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionDto {
    pub id: ConnId,
    pub source: Endpoint,
    pub target: NodeId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStateDto {
    pub axiom_name: String,
    pub revision: u64,
    pub mode: EditMode,
    pub can_undo: bool,
    pub can_redo: bool,
    pub nodes: Vec<NodeDto>,
    pub connections: Vec<ConnectionDto>,
    pub text: String,
    pub outline: OutlineNode,
}

impl GraphStateDto {
    pub fn build(editor: &Editor, reg: &OntologyRegistry) -> Self {
        let m = editor.model();
        let home = m.home_ontology.as_ref();
        let q = |iri: &Iri| reg.qualified_name(iri, home);
        let reach = m.reachable_from_root();
        let nodes = m
            .nodes
            .values()
            .map(|n| {
                let (label, type_name) = match &n.kind {
                    NodeKind::Root => ("Start".to_string(), None),
                    NodeKind::Variable { name, concept, .. } => (name.clone(), Some(q(concept))),
                    NodeKind::InstanceRef { instance, concept } => (q(instance), Some(q(concept))),
                    NodeKind::PrimitiveValue { datatype, value } => (value.clone(), Some(q(datatype))),
                    NodeKind::RelationUse { relation, .. } => (q(relation), Some(q(relation))),
                    NodeKind::Operator { operator } => (operator.label().to_string(), None),
                };
                let slots = match &n.kind {
                    NodeKind::Variable { slots, .. } => slots
                        .iter()
                        .map(|s| SlotDto {
                            attr: s.attr.name.clone(),
                            types: s.attr.type_constraints.iter().map(q).collect(),
                            bound: s.bound_var_name.clone(),
                        })
                        .collect(),
                    _ => Vec::new(),
                };
                let params = match &n.kind {
                    NodeKind::RelationUse { params, .. } => params
                        .iter()
                        .enumerate()
                        .map(|(index, p)| ParamDto {
                            index,
                            name: p.param.name.clone(),
                            types: p.param.type_constraints.iter().map(q).collect(),
                            bound: m.connection_from(&Endpoint::Parameter { node: n.id, index }).map(|c| c.target),
                        })
                        .collect(),
                    _ => Vec::new(),
                };
                NodeDto {
                    id: n.id,
                    kind: n.kind_name().to_string(),
                    label,
                    type_name,
                    slots,
                    params,
                    validity: m.validity(n.id, &reach),
                    layout: n.layout,
                }
            })
            .collect();
        let connections =
            m.connections.values().map(|c| ConnectionDto { id: c.id, source: c.source.clone(), target: c.target }).collect();
        GraphStateDto {
            axiom_name: m.axiom_name.clone(),
            revision: editor.revision(),
            mode: editor.mode,
            can_undo: editor.can_undo(),
            can_redo: editor.can_redo(),
            nodes,
            connections,
            text: generate_axiom_text(m, reg, RenderOptions::default()),
            outline: outline(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionDto {
    pub id: String,
    pub state: GraphStateDto,
}

/// Response to an applied operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpResponse {
    pub outcome: OpOutcome,
    pub state: GraphStateDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OntologySummary {
    pub iri: Iri,
    pub short_name: String,
    pub concepts: usize,
    pub instances: usize,
    pub relations: usize,
    pub imports: Vec<Iri>,
}

impl From<&LoadedOntology> for OntologySummary {
    fn from(o: &LoadedOntology) -> Self {
        OntologySummary {
            iri: o.iri.clone(),
            short_name: o.short_name.clone(),
            concepts: o.concepts.len(),
            instances: o.instances.len(),
            relations: o.relations.len(),
            imports: o.imports.clone(),
        }
    }
}

/// Parses the compact target syntax used in query strings:
/// `surface`, `node:3`, `slot:3:attr`, `param:4:0`, `connection:5`.
pub fn parse_target(s: &str) -> Option<MenuTarget> {
    let mut parts = s.splitn(3, ':');
    let kind = parts.next()?;
    let num = |p: Option<&str>| p.and_then(|x| x.parse::<u32>().ok());
    let t = match kind {
        "surface" => MenuTarget::Surface,
        "node" => MenuTarget::Node { node: NodeId(num(parts.next())?) },
        "slot" => MenuTarget::Slot { node: NodeId(num(parts.next())?), attr: parts.next()?.to_string() },
        "param" => MenuTarget::Param { node: NodeId(num(parts.next())?), index: num(parts.next())? as usize },
        "connection" => MenuTarget::Connection { connection: ConnId(num(parts.next())?) },
        _ => return None,
    };
    if parts.next().is_some() {
        return None;
    }
    Some(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn targets() {
        assert_eq!(parse_target("surface"), Some(MenuTarget::Surface));
        assert_eq!(parse_target("slot:3:hasName"), Some(MenuTarget::Slot { node: NodeId(3), attr: "hasName".into() }));
        assert_eq!(parse_target("slot:3:a:b"), Some(MenuTarget::Slot { node: NodeId(3), attr: "a:b".into() }));
        assert_eq!(parse_target("param:4:1"), Some(MenuTarget::Param { node: NodeId(4), index: 1 }));
        assert_eq!(parse_target("connection:x"), None);
        assert_eq!(parse_target("node"), None);
        assert_eq!(parse_target("node:1:2"), None);
        assert_eq!(parse_target("edge:1"), None);
    }

    #[test]
    fn fresh_state() {
        let dto = GraphStateDto::build(&Editor::new("autoGeneratedAxiom_1"), &OntologyRegistry::new());
        assert_eq!(dto.nodes.len(), 1);
        assert_eq!(dto.nodes[0].label, "Start");
        assert!(dto.connections.is_empty());
        assert!(dto.text.ends_with("definedBy\n  .\n"));
    }
}
