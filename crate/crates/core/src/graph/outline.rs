use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{AxiomModel, NodeId, NodeKind, ROOT};

/// Condensed tree of the axiom: start, variables, operators, instances and
/// relations nested along connections. Unconnected elements are left out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutlineNode {
    pub node: NodeId,
    pub label: String,
    pub children: Vec<OutlineNode>,
}

fn label(m: &AxiomModel, id: NodeId) -> String {
    match &m.node(id).map(|n| &n.kind) {
        Some(NodeKind::Root) => "(start)".into(),
        Some(NodeKind::Variable { name, .. }) => name.trim_start_matches('?').to_string(),
        Some(NodeKind::InstanceRef { instance, .. }) => instance.local_name().to_string(),
        Some(NodeKind::PrimitiveValue { value, .. }) => value.clone(),
        Some(NodeKind::RelationUse { relation, .. }) => relation.local_name().to_string(),
        Some(NodeKind::Operator { operator }) => operator.label().to_string(),
        None => String::new(),
    }
}

pub fn outline(m: &AxiomModel) -> OutlineNode {
    fn go(m: &AxiomModel, id: NodeId, seen: &mut BTreeSet<NodeId>) -> OutlineNode {
        let mut children = Vec::new();
        if seen.insert(id) {
            for c in m.outgoing(id) {
                children.push(go(m, c.target, seen));
            }
        }
        OutlineNode { node: id, label: label(m, id), children }
    }
    go(m, ROOT, &mut BTreeSet::new())
}

impl OutlineNode {
    pub fn render(&self) -> String {
        fn go(n: &OutlineNode, depth: usize, out: &mut String) {
            out.push_str(&"  ".repeat(depth));
            out.push_str("- ");
            out.push_str(&n.label);
            out.push('\n');
            for c in &n.children {
                go(c, depth + 1, out);
            }
        }
        let mut out = String::new();
        go(self, 0, &mut out);
        out
    }
}
