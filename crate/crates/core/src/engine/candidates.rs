//! Context menus computed by dry-running every operation that could
//! apply to a target. A choice is offered only if the engine would
//! accept it, so menus and operations cannot disagree.

use serde::{Deserialize, Serialize};

use crate::graph::{AxiomModel, ConnId, Endpoint, NodeId, NodeKind, OperatorKind};
use crate::iri::Iri;
use crate::ontology::OntologyRegistry;

use super::error::ErrorCode;
use super::literal::sample_literal;
use super::naming::gen_variable_name;
use super::ops::{apply_op, default_type, is_datatype};
use super::{BindingSpec, EditMode, EditOp, MoveEnd, NameTarget, OperandSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MenuTarget {
    Surface,
    Node { node: NodeId },
    Slot { node: NodeId, attr: String },
    Param { node: NodeId, index: usize },
    Connection { connection: ConnId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MenuOp {
    CreateVariable,
    CreateOperator,
    CreateInstanceNode,
    CreateRelationNode,
    Rename,
    Copy,
    Delete,
    SetValue,
    ChangeType,
    AddOperand,
    CreateConnection,
    RefineNewVarDefaultType,
    RefineNewVarOfConcept,
    RefineExistingVariable,
    RefineInstanceFromOntology,
    RefineExistingInstance,
    RefineLiteralDefaultType,
    RefineLiteralOfType,
    BindNewVarDefaultType,
    BindExistingVariable,
    InsertAnd,
    InsertOr,
    InsertNot,
    MoveSource,
    MoveTarget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Choice {
    pub label: String,
    pub op: EditOp,
    /// The value in `op` is a sample; the user supplies the real one.
    pub needs_input: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MenuEntry {
    pub op: MenuOp,
    pub enabled: bool,
    /// Why the entry is disabled: every distinct refusal, in order of
    /// first appearance. Empty when enabled.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<ErrorCode>,
    pub choices: Vec<Choice>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Menu {
    pub target: MenuTarget,
    pub entries: Vec<MenuEntry>,
}

impl Menu {
    pub fn entry(&self, op: MenuOp) -> Option<&MenuEntry> {
        self.entries.iter().find(|e| e.op == op)
    }

    pub fn enabled(&self) -> impl Iterator<Item = MenuOp> + '_ {
        self.entries.iter().filter(|e| e.enabled).map(|e| e.op)
    }
}

struct Ctx<'a> {
    m: &'a AxiomModel,
    reg: &'a OntologyRegistry,
    mode: EditMode,
}

impl Ctx<'_> {
    fn label(&self, iri: &Iri) -> String {
        self.reg.display_name(iri).unwrap_or_else(|_| iri.local_name().to_string())
    }

    fn node_label(&self, n: NodeId) -> String {
        match self.m.node(n).map(|x| &x.kind) {
            Some(NodeKind::Variable { name, .. }) => name.clone(),
            Some(NodeKind::InstanceRef { instance, .. }) => self.label(instance),
            Some(NodeKind::PrimitiveValue { value, .. }) => format!("\"{value}\""),
            Some(NodeKind::RelationUse { relation, .. }) => self.label(relation),
            Some(NodeKind::Operator { operator }) => format!("{} {n}", operator.label()),
            Some(NodeKind::Root) => "start".into(),
            None => n.to_string(),
        }
    }

    fn concepts(&self) -> Vec<Iri> {
        self.reg.concepts().map(|c| c.id.clone()).collect()
    }

    fn instances(&self) -> Vec<Iri> {
        self.reg.instances().map(|i| i.id.clone()).collect()
    }

    fn relations(&self) -> Vec<Iri> {
        self.reg.list_relations().into_iter().map(|r| r.id.clone()).collect()
    }

    fn nodes_where(&self, f: impl Fn(&NodeKind) -> bool) -> Vec<NodeId> {
        self.m.nodes.values().filter(|n| f(&n.kind)).map(|n| n.id).collect()
    }

    fn datatypes(&self) -> Vec<Iri> {
        self.concepts().into_iter().filter(|c| is_datatype(self.reg, c)).collect()
    }

    fn endpoints(&self) -> Vec<Endpoint> {
        let mut out = vec![Endpoint::Root];
        for n in self.m.nodes.values() {
            match &n.kind {
                NodeKind::Variable { slots, .. } => {
                    out.extend(slots.iter().map(|s| Endpoint::Attribute { node: n.id, attr: s.attr.name.clone() }))
                }
                NodeKind::RelationUse { params, .. } => {
                    out.extend((0..params.len()).map(|i| Endpoint::Parameter { node: n.id, index: i }))
                }
                NodeKind::Operator { .. } => out.push(Endpoint::Operator { node: n.id }),
                _ => {}
            }
        }
        out
    }

    /// Every binding the registry and model could supply, with labels.
    fn bindings(&self, slot_type: &[Iri]) -> Vec<(MenuOp, String, BindingSpec, bool)> {
        let mut out = vec![(MenuOp::RefineNewVarDefaultType, "new variable".to_string(), BindingSpec::NewVarDefaultType, false)];
        for c in self.concepts() {
            out.push((MenuOp::RefineNewVarOfConcept, self.label(&c), BindingSpec::NewVarOfConcept { concept: c }, false));
        }
        for v in self.nodes_where(|k| matches!(k, NodeKind::Variable { .. })) {
            out.push((MenuOp::RefineExistingVariable, self.node_label(v), BindingSpec::ExistingVariable { node: v }, false));
        }
        for i in self.instances() {
            out.push((MenuOp::RefineInstanceFromOntology, self.label(&i), BindingSpec::InstanceFromOntology { instance: i }, false));
        }
        for n in self.nodes_where(|k| matches!(k, NodeKind::InstanceRef { .. })) {
            out.push((MenuOp::RefineExistingInstance, self.node_label(n), BindingSpec::ExistingInstance { node: n }, false));
        }
        let sample = default_type(self.reg, slot_type).map(|t| sample_literal(&t)).unwrap_or("text");
        out.push((
            MenuOp::RefineLiteralDefaultType,
            "value".to_string(),
            BindingSpec::LiteralDefaultType { value: sample.to_string() },
            true,
        ));
        for dt in self.datatypes() {
            let value = sample_literal(&dt).to_string();
            out.push((MenuOp::RefineLiteralOfType, self.label(&dt), BindingSpec::LiteralOfType { datatype: dt, value }, true));
        }
        out
    }

    fn origin_type(&self, origin: Option<Endpoint>) -> Vec<Iri> {
        match origin {
            Some(Endpoint::Attribute { node, attr }) => {
                self.m.node(node).and_then(|n| n.slot(&attr)).map(|s| s.attr.type_constraints.clone()).unwrap_or_default()
            }
            _ => vec![],
        }
    }

    fn operands(&self, slot_type: &[Iri]) -> Vec<(String, OperandSpec, bool)> {
        let mut out: Vec<(String, OperandSpec, bool)> =
            self.bindings(slot_type).into_iter().map(|(_, l, b, input)| (l, b.into(), input)).collect();
        for r in self.relations() {
            out.push((self.label(&r), OperandSpec::NewRelation { relation: r }, false));
        }
        for k in OperatorKind::ALL {
            out.push((k.label().to_string(), OperandSpec::NewOperator { operator: k }, false));
        }
        out
    }

    fn probe(&self, op: MenuOp, probes: Vec<(String, EditOp, bool)>) -> MenuEntry {
        let mut choices = Vec::new();
        let mut codes = Vec::new();
        for (label, edit, needs_input) in probes {
            let mut scratch = self.m.clone();
            match apply_op(&mut scratch, self.reg, self.mode, &edit) {
                Ok(_) => choices.push(Choice { label, op: edit, needs_input }),
                Err(e) => codes.push(e.code),
            }
        }
        let enabled = !choices.is_empty();
        let mut errors = Vec::new();
        if !enabled {
            for c in codes {
                if !errors.contains(&c) {
                    errors.push(c);
                }
            }
        }
        MenuEntry { op, enabled, errors, choices }
    }
}

fn single(label: &str, op: EditOp) -> Vec<(String, EditOp, bool)> {
    vec![(label.to_string(), op, false)]
}

/// The menu for `target`: every operation that belongs there, enabled
/// when at least one of its concrete forms would succeed.
pub fn candidates_for(m: &AxiomModel, reg: &OntologyRegistry, mode: EditMode, target: &MenuTarget) -> Menu {
    let cx = Ctx { m, reg, mode };
    let mut entries = Vec::new();
    let connect_from = |source: Endpoint| -> Vec<(String, EditOp, bool)> {
        m.nodes
            .keys()
            .map(|t| (cx.node_label(*t), EditOp::CreateConnection { source: source.clone(), target: *t }, false))
            .collect()
    };
    let rename = |t: NameTarget| single("rename", EditOp::RenameVariable { target: t, name: gen_variable_name(m, "renamed") });
    match target {
        MenuTarget::Surface => {
            let probes = cx.concepts().into_iter().map(|c| (cx.label(&c), EditOp::CreateVariable { concept: c }, false)).collect();
            entries.push(cx.probe(MenuOp::CreateVariable, probes));
            let probes = OperatorKind::ALL
                .into_iter()
                .map(|k| (k.label().to_string(), EditOp::CreateOperator { kind: k }, false))
                .collect();
            entries.push(cx.probe(MenuOp::CreateOperator, probes));
            let probes =
                cx.instances().into_iter().map(|i| (cx.label(&i), EditOp::CreateInstanceNode { instance: i }, false)).collect();
            entries.push(cx.probe(MenuOp::CreateInstanceNode, probes));
            let probes =
                cx.relations().into_iter().map(|r| (cx.label(&r), EditOp::CreateRelationNode { relation: r }, false)).collect();
            entries.push(cx.probe(MenuOp::CreateRelationNode, probes));
        }
        MenuTarget::Node { node } => {
            let n = *node;
            let delete = single("delete", EditOp::DeleteNode { node: n });
            match m.node(n).map(|x| &x.kind) {
                None => entries.push(cx.probe(MenuOp::Delete, delete)),
                Some(NodeKind::Root) => {
                    entries.push(cx.probe(MenuOp::CreateConnection, connect_from(Endpoint::Root)));
                }
                Some(NodeKind::Variable { .. }) => {
                    entries.push(cx.probe(MenuOp::Rename, rename(NameTarget::Node { node: n })));
                    entries.push(cx.probe(MenuOp::Copy, single("copy", EditOp::CopyVariable { node: n })));
                    entries.push(cx.probe(MenuOp::Delete, delete));
                }
                Some(NodeKind::InstanceRef { .. }) | Some(NodeKind::RelationUse { .. }) => {
                    entries.push(cx.probe(MenuOp::Delete, delete));
                }
                Some(NodeKind::PrimitiveValue { datatype, .. }) => {
                    let value = sample_literal(datatype).to_string();
                    entries.push(cx.probe(MenuOp::SetValue, vec![("value".into(), EditOp::SetPrimitiveValue { node: n, value }, true)]));
                    entries.push(cx.probe(MenuOp::Delete, delete));
                }
                Some(NodeKind::Operator { .. }) => {
                    let probes = OperatorKind::ALL
                        .into_iter()
                        .map(|k| (k.label().to_string(), EditOp::ChangeOperatorType { node: n, kind: k }, false))
                        .collect();
                    entries.push(cx.probe(MenuOp::ChangeType, probes));
                    let t = cx.origin_type(m.operator_chain(n).map(|(_, o)| o));
                    let probes = cx
                        .operands(&t)
                        .into_iter()
                        .map(|(l, o, input)| (l, EditOp::AddOperand { node: n, operand: o }, input))
                        .collect();
                    entries.push(cx.probe(MenuOp::AddOperand, probes));
                    entries.push(cx.probe(MenuOp::CreateConnection, connect_from(Endpoint::Operator { node: n })));
                    entries.push(cx.probe(MenuOp::Delete, delete));
                }
            }
        }
        MenuTarget::Slot { node, attr } => {
            let slot_type = m
                .node(*node)
                .and_then(|n| n.slot(attr))
                .map(|s| s.attr.type_constraints.clone())
                .unwrap_or_default();
            let mut grouped: Vec<(MenuOp, Vec<(String, EditOp, bool)>)> = [
                MenuOp::RefineNewVarDefaultType,
                MenuOp::RefineNewVarOfConcept,
                MenuOp::RefineExistingVariable,
                MenuOp::RefineInstanceFromOntology,
                MenuOp::RefineExistingInstance,
                MenuOp::RefineLiteralDefaultType,
                MenuOp::RefineLiteralOfType,
            ]
            .into_iter()
            .map(|op| (op, Vec::new()))
            .collect();
            for (op, label, spec, input) in cx.bindings(&slot_type) {
                let edit = EditOp::RefineAttribute { node: *node, attr: attr.clone(), spec };
                grouped.iter_mut().find(|(o, _)| *o == op).expect("grouped").1.push((label, edit, input));
            }
            for (op, probes) in grouped {
                entries.push(cx.probe(op, probes));
            }
            entries.push(cx.probe(MenuOp::Rename, rename(NameTarget::Slot { node: *node, attr: attr.clone() })));
            entries.push(cx.probe(MenuOp::CreateConnection, connect_from(Endpoint::Attribute { node: *node, attr: attr.clone() })));
        }
        MenuTarget::Param { node, index } => {
            let bind = |spec: BindingSpec| EditOp::BindParameter { node: *node, index: *index, spec };
            entries.push(cx.probe(MenuOp::BindNewVarDefaultType, single("new variable", bind(BindingSpec::NewVarDefaultType))));
            let probes = cx
                .nodes_where(|k| matches!(k, NodeKind::Variable { .. }))
                .into_iter()
                .map(|v| (cx.node_label(v), bind(BindingSpec::ExistingVariable { node: v }), false))
                .collect();
            entries.push(cx.probe(MenuOp::BindExistingVariable, probes));
            entries.push(cx.probe(MenuOp::Rename, rename(NameTarget::Param { node: *node, index: *index })));
            entries.push(cx.probe(MenuOp::CreateConnection, connect_from(Endpoint::Parameter { node: *node, index: *index })));
        }
        MenuTarget::Connection { connection } => {
            let c = *connection;
            for (menu, kind) in
                [(MenuOp::InsertAnd, OperatorKind::And), (MenuOp::InsertOr, OperatorKind::Or), (MenuOp::InsertNot, OperatorKind::Not)]
            {
                let mut probes = vec![(kind.label().to_string(), EditOp::InsertOperator { connection: c, kind, second: None }, false)];
                for (l, o, input) in cx.operands(&cx.origin_type(m.chain_origin(c))) {
                    probes.push((l, EditOp::InsertOperator { connection: c, kind, second: Some(o) }, input));
                }
                entries.push(cx.probe(menu, probes));
            }
            entries.push(cx.probe(MenuOp::Delete, single("delete", EditOp::DeleteConnection { connection: c })));
            let probes = cx
                .endpoints()
                .into_iter()
                .map(|e| (e.to_string(), EditOp::MoveEndpoint { connection: c, end: MoveEnd::Source { endpoint: e } }, false))
                .collect();
            entries.push(cx.probe(MenuOp::MoveSource, probes));
            let probes = m
                .nodes
                .keys()
                .map(|t| (cx.node_label(*t), EditOp::MoveEndpoint { connection: c, end: MoveEnd::Target { node: *t } }, false))
                .collect();
            entries.push(cx.probe(MenuOp::MoveTarget, probes));
        }
    }
    Menu { target: target.clone(), entries }
}
