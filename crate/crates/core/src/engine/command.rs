use serde::{Deserialize, Serialize};

use crate::graph::{AxiomModel, ConnId, Connection, Node, NodeId};
use crate::iri::Iri;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Header {
    axiom_name: String,
    home_ontology: Option<Iri>,
    next_node: u32,
    next_conn: u32,
}

impl Header {
    fn of(m: &AxiomModel) -> Self {
        Header {
            axiom_name: m.axiom_name.clone(),
            home_ontology: m.home_ontology.clone(),
            next_node: m.next_node,
            next_conn: m.next_conn,
        }
    }

    fn write(&self, m: &mut AxiomModel) {
        m.axiom_name = self.axiom_name.clone();
        m.home_ontology = self.home_ontology.clone();
        m.next_node = self.next_node;
        m.next_conn = self.next_conn;
    }
}

/// A recorded change: the before and after image of every node and
/// connection it touched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Command {
    pub label: String,
    nodes: Vec<(NodeId, Option<Node>, Option<Node>)>,
    connections: Vec<(ConnId, Option<Connection>, Option<Connection>)>,
    header: (Header, Header),
}

impl Command {
    pub fn diff(label: &str, before: &AxiomModel, after: &AxiomModel) -> Self {
        let mut nodes = Vec::new();
        for id in before.nodes.keys().chain(after.nodes.keys()) {
            let (b, a) = (before.nodes.get(id), after.nodes.get(id));
            if b != a && !nodes.iter().any(|(n, _, _)| n == id) {
                nodes.push((*id, b.cloned(), a.cloned()));
            }
        }
        let mut connections = Vec::new();
        for id in before.connections.keys().chain(after.connections.keys()) {
            let (b, a) = (before.connections.get(id), after.connections.get(id));
            if b != a && !connections.iter().any(|(c, _, _)| c == id) {
                connections.push((*id, b.cloned(), a.cloned()));
            }
        }
        Command { label: label.to_string(), nodes, connections, header: (Header::of(before), Header::of(after)) }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.connections.is_empty() && self.header.0 == self.header.1
    }

    fn put(m: &mut AxiomModel, nodes: impl Iterator<Item = (NodeId, Option<Node>)>, conns: impl Iterator<Item = (ConnId, Option<Connection>)>) {
        for (id, n) in nodes {
            match n {
                Some(n) => m.nodes.insert(id, n),
                None => m.nodes.remove(&id),
            };
        }
        for (id, c) in conns {
            match c {
                Some(c) => m.connections.insert(id, c),
                None => m.connections.remove(&id),
            };
        }
    }

    pub fn revert(&self, m: &mut AxiomModel) {
        Self::put(
            m,
            self.nodes.iter().map(|(i, b, _)| (*i, b.clone())),
            self.connections.iter().map(|(i, b, _)| (*i, b.clone())),
        );
        self.header.0.write(m);
    }

    pub fn reapply(&self, m: &mut AxiomModel) {
        Self::put(
            m,
            self.nodes.iter().map(|(i, _, a)| (*i, a.clone())),
            self.connections.iter().map(|(i, _, a)| (*i, a.clone())),
        );
        self.header.1.write(m);
    }
}
