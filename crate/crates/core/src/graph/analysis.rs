use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{AxiomModel, ConnId, Connection, Endpoint, NodeId, NodeKind, OperatorKind, ROOT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    RootChain,
    AttributeChain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", content = "reason", rename_all = "snake_case")]
pub enum Validity {
    Valid,
    Invalid(String),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

impl AxiomModel {
    pub fn incoming(&self, node: NodeId) -> impl Iterator<Item = &Connection> {
        self.connections.values().filter(move |c| c.target == node)
    }

    /// Outgoing connections of a node, through its slots, parameters or operator endpoint.
    pub fn outgoing(&self, node: NodeId) -> impl Iterator<Item = &Connection> {
        self.connections.values().filter(move |c| c.source.node() == node)
    }

    pub fn connection_from(&self, source: &Endpoint) -> Option<&Connection> {
        self.connections.values().find(|c| &c.source == source)
    }

    /// Operands of an operator in connection order.
    pub fn operands(&self, op: NodeId) -> Vec<&Connection> {
        self.connections.values().filter(|c| c.source == Endpoint::Operator { node: op }).collect()
    }

    pub fn reachable_from_root(&self) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::from([ROOT]);
        let mut queue = VecDeque::from([ROOT]);
        while let Some(n) = queue.pop_front() {
            for c in self.outgoing(n) {
                if seen.insert(c.target) {
                    queue.push_back(c.target);
                }
            }
        }
        seen
    }

    /// The connection that introduces a node: the lowest-id incoming
    /// connection whose source is reachable, else the lowest-id one.
    /// Other incoming connections only reference the node by name.
    pub fn defining_connection(&self, node: NodeId, reachable: &BTreeSet<NodeId>) -> Option<ConnId> {
        let mut first = None;
        for c in self.incoming(node) {
            if reachable.contains(&c.source.node()) {
                return Some(c.id);
            }
            first.get_or_insert(c.id);
        }
        first
    }

    /// Walks source endpoints upward through operators. Returns the
    /// originating Root, attribute or parameter endpoint, or None when the
    /// walk ends at an operator with no incoming connection.
    pub fn chain_origin(&self, conn: ConnId) -> Option<Endpoint> {
        let mut cur = self.connection(conn)?;
        let mut steps = 0;
        loop {
            match &cur.source {
                Endpoint::Operator { node } => {
                    cur = self.incoming(*node).next()?;
                }
                other => return Some(other.clone()),
            }
            steps += 1;
            if steps > self.connections.len() {
                return None;
            }
        }
    }

    pub fn chain_kind(&self, conn: ConnId) -> Option<ChainKind> {
        self.chain_origin(conn).map(|e| match e {
            Endpoint::Root => ChainKind::RootChain,
            _ => ChainKind::AttributeChain,
        })
    }

    /// Chain kind of an operator, from its (single) incoming connection.
    pub fn operator_chain(&self, op: NodeId) -> Option<(ChainKind, Endpoint)> {
        let c = self.incoming(op).next()?;
        let origin = self.chain_origin(c.id)?;
        let kind = if origin == Endpoint::Root { ChainKind::RootChain } else { ChainKind::AttributeChain };
        Some((kind, origin))
    }

    pub fn validity(&self, node: NodeId, reachable: &BTreeSet<NodeId>) -> Validity {
        let Some(n) = self.node(node) else {
            return Validity::Invalid("no such node".into());
        };
        if let NodeKind::Operator { operator } = n.kind {
            if self.incoming(node).next().is_none() {
                return Validity::Invalid("no incoming connection".into());
            }
            let count = self.operands(node).len();
            match operator {
                OperatorKind::Not if count != 1 => return Validity::Invalid("needs exactly 1 operand".into()),
                OperatorKind::And | OperatorKind::Or if count < 2 => {
                    return Validity::Invalid("needs ≥2 operands".into())
                }
                _ => {}
            }
        }
        if reachable.contains(&node) {
            Validity::Valid
        } else {
            Validity::Invalid("not connected to start".into())
        }
    }

    /// True when `target` can reach `node` along connections.
    pub fn reaches(&self, from: NodeId, to: NodeId) -> bool {
        let mut seen = BTreeSet::from([from]);
        let mut stack = vec![from];
        while let Some(n) = stack.pop() {
            if n == to {
                return true;
            }
            for c in self.outgoing(n) {
                if seen.insert(c.target) {
                    stack.push(c.target);
                }
            }
        }
        false
    }

    /// Variable name → nodes carrying it. Slot-held names (instance and
    /// literal bindings) map to the slot's owner.
    pub fn name_index(&self) -> BTreeMap<String, BTreeSet<NodeId>> {
        let mut out: BTreeMap<String, BTreeSet<NodeId>> = BTreeMap::new();
        for n in self.nodes.values() {
            if let NodeKind::Variable { name, slots, .. } = &n.kind {
                out.entry(name.clone()).or_default().insert(n.id);
                for s in slots {
                    if let Some(b) = &s.bound_var_name {
                        out.entry(b.clone()).or_default().insert(n.id);
                    }
                }
            }
        }
        out
    }

    /// Every structural invariant the editor maintains. Used by tests after
    /// each mutation.
    pub fn check_integrity(&self) -> Result<(), String> {
        if !matches!(self.node(ROOT).map(|n| &n.kind), Some(NodeKind::Root)) {
            return Err("root missing".into());
        }
        if self.nodes.values().filter(|n| matches!(n.kind, NodeKind::Root)).count() != 1 {
            return Err("more than one root".into());
        }
        let mut sources = BTreeSet::new();
        for c in self.connections.values() {
            if !self.nodes.contains_key(&c.target) || !self.nodes.contains_key(&c.source.node()) {
                return Err(format!("dangling connection {}", c.id));
            }
            if c.target == ROOT {
                return Err(format!("connection {} targets the root", c.id));
            }
            let src = self.node(c.source.node()).unwrap();
            let ok = match &c.source {
                Endpoint::Root => true,
                Endpoint::Attribute { attr, .. } => src.slot(attr).is_some(),
                Endpoint::Parameter { index, .. } => src.param(*index).is_some(),
                Endpoint::Operator { .. } => src.operator().is_some(),
            };
            if !ok {
                return Err(format!("connection {} leaves a missing endpoint {}", c.id, c.source));
            }
            if !matches!(c.source, Endpoint::Operator { .. }) && !sources.insert(c.source.clone()) {
                return Err(format!("endpoint {} has two connections", c.source));
            }
            if matches!(c.source, Endpoint::Parameter { .. })
                && !matches!(self.node(c.target).map(|n| &n.kind), Some(NodeKind::Variable { .. }))
            {
                return Err(format!("parameter connection {} does not target a variable", c.id));
            }
        }
        for n in self.nodes.values() {
            if let Some(k) = n.operator() {
                if self.incoming(n.id).count() > 1 {
                    return Err(format!("operator {} has several incoming connections", n.id));
                }
                if k == OperatorKind::Not && self.operands(n.id).len() > 1 {
                    return Err(format!("NOT {} has several operands", n.id));
                }
            }
            if let NodeKind::Variable { slots, .. } = &n.kind {
                for s in slots {
                    let connected =
                        self.connection_from(&Endpoint::Attribute { node: n.id, attr: s.attr.name.clone() }).is_some();
                    if connected != s.bound_var_name.is_some() {
                        return Err(format!("slot {}.{} name/connection mismatch", n.id, s.attr.name));
                    }
                }
            }
        }
        for n in self.nodes.keys() {
            for c in self.outgoing(*n) {
                if self.reaches(c.target, *n) {
                    return Err(format!("cycle through {n}"));
                }
            }
        }
        Ok(())
    }
}
