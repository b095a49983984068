//! Variable names: generation, validation and the ownership pass that
//! keeps slot names and alternative names coherent after every edit.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use regex::Regex;

use crate::graph::{AxiomModel, ConnId, Endpoint, NodeId, NodeKind, OperatorKind};

pub fn is_valid_name(name: &str) -> bool {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\?[\p{L}_][\p{L}\p{N}_\-]*$").unwrap()).is_match(name)
}

fn taken(m: &AxiomModel) -> BTreeSet<String> {
    m.name_index().into_keys().collect()
}

/// `?base`, or `?base1`, `?base2`, ... whichever is free first.
pub fn gen_variable_name(m: &AxiomModel, base: &str) -> String {
    fresh_name(&taken(m), base)
}

fn fresh_name(taken: &BTreeSet<String>, base: &str) -> String {
    let base = base.trim_start_matches('?');
    let base = if base.is_empty() { "x" } else { base };
    let first = format!("?{base}");
    if !taken.contains(&first) {
        return first;
    }
    (1..).map(|n| format!("?{base}{n}")).find(|c| !taken.contains(c)).unwrap()
}

/// Who owns a variable's name. Variables bound through a slot (directly
/// or through OR/NOT) share the slot's name; alternatives of a free-standing
/// OR/NOT may share a name; anything else owns its name alone.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Anchor {
    Slot(NodeId, String),
    Node(NodeId),
}

impl Anchor {
    fn key(&self) -> NodeId {
        match self {
            Anchor::Slot(n, _) | Anchor::Node(n) => *n,
        }
    }
}

pub(crate) fn anchor(m: &AxiomModel, v: NodeId, reach: &BTreeSet<NodeId>) -> Anchor {
    let Some(mut cur) = m.defining_connection(v, reach) else {
        return Anchor::Node(v);
    };
    let mut top: Option<NodeId> = None;
    for _ in 0..=m.connections.len() {
        let c = &m.connections[&cur];
        match &c.source {
            Endpoint::Attribute { node, attr } => return Anchor::Slot(*node, attr.clone()),
            Endpoint::Parameter { .. } | Endpoint::Root => return Anchor::Node(top.unwrap_or(v)),
            Endpoint::Operator { node } => {
                if m.node(*node).and_then(|n| n.operator()) == Some(OperatorKind::And) {
                    return Anchor::Node(top.unwrap_or(v));
                }
                top = Some(*node);
                match m.incoming(*node).next() {
                    Some(up) => cur = up.id,
                    None => return Anchor::Node(*node),
                }
            }
        }
    }
    Anchor::Node(top.unwrap_or(v))
}

fn slot_refs(m: &AxiomModel) -> Vec<(NodeId, String, Option<(ConnId, NodeId)>)> {
    let mut out = Vec::new();
    for n in m.nodes.values() {
        if let NodeKind::Variable { slots, .. } = &n.kind {
            for s in slots {
                let ep = Endpoint::Attribute { node: n.id, attr: s.attr.name.clone() };
                out.push((n.id, s.attr.name.clone(), m.connection_from(&ep).map(|c| (c.id, c.target))));
            }
        }
    }
    out
}

fn set_slot_name(m: &mut AxiomModel, node: NodeId, attr: &str, name: Option<String>) {
    if let Some(s) = m.node_mut(node).and_then(|n| n.slot_mut(attr)) {
        s.bound_var_name = name;
    }
}

fn set_var_name(m: &mut AxiomModel, v: NodeId, new: &str) {
    if let Some(NodeKind::Variable { name, .. }) = m.node_mut(v).map(|n| &mut n.kind) {
        *name = new.to_string();
    }
}

/// Re-establishes the naming invariants: slot names present exactly on
/// connected slots, slot-bound variables carrying the slot's name, and
/// every name owned by a single anchor.
pub(crate) fn normalize(m: &mut AxiomModel) {
    for _ in 0..8 {
        if !normalize_pass(m) {
            return;
        }
    }
}

fn normalize_pass(m: &mut AxiomModel) -> bool {
    let before = m.clone();
    let reach = m.reachable_from_root();

    // slot names follow their connections
    for (node, attr, conn) in slot_refs(m) {
        match conn {
            None => set_slot_name(m, node, &attr, None),
            Some((cid, target)) => {
                let target_name = m.node(target).and_then(|n| n.variable_name()).map(str::to_string);
                let is_def = m.defining_connection(target, &reach) == Some(cid);
                let current = m.node(node).and_then(|n| n.slot(&attr)).and_then(|s| s.bound_var_name.clone());
                match (target_name, is_def, current) {
                    (Some(t), false, _) => set_slot_name(m, node, &attr, Some(t)),
                    (_, _, Some(_)) => {}
                    (Some(t), true, None) => set_slot_name(m, node, &attr, Some(t)),
                    (None, _, None) => {
                        let fresh = gen_variable_name(m, &attr);
                        set_slot_name(m, node, &attr, Some(fresh));
                    }
                }
            }
        }
    }

    // slot-bound variables take the slot's name
    let vars: Vec<NodeId> = m.variables().map(|n| n.id).collect();
    let anchors: BTreeMap<NodeId, Anchor> = vars.iter().map(|v| (*v, anchor(m, *v, &reach))).collect();
    for (v, a) in &anchors {
        if let Anchor::Slot(n, attr) = a {
            if let Some(name) = m.node(*n).and_then(|n| n.slot(attr)).and_then(|s| s.bound_var_name.clone()) {
                set_var_name(m, *v, &name);
            }
        }
    }

    // one owner per name
    let mut owners: BTreeMap<String, BTreeSet<Anchor>> = BTreeMap::new();
    for (v, a) in &anchors {
        let name = m.node(*v).and_then(|n| n.variable_name()).unwrap_or_default().to_string();
        owners.entry(name).or_default().insert(a.clone());
    }
    for (node, attr, conn) in slot_refs(m) {
        let Some((cid, target)) = conn else { continue };
        let is_var = m.node(target).and_then(|n| n.variable_name()).is_some();
        if is_var {
            continue; // covered through the variable's anchor
        }
        let _ = cid;
        if let Some(name) = m.node(node).and_then(|n| n.slot(&attr)).and_then(|s| s.bound_var_name.clone()) {
            owners.entry(name).or_default().insert(Anchor::Slot(node, attr));
        }
    }
    let mut used: BTreeSet<String> = owners.keys().cloned().collect();
    for (name, set) in owners {
        if set.len() < 2 {
            continue;
        }
        let mut list: Vec<Anchor> = set.into_iter().collect();
        list.sort_by_key(|a| (a.key(), a.clone()));
        let base = name.trim_start_matches('?').trim_end_matches(|c: char| c.is_ascii_digit()).to_string();
        for a in list.into_iter().skip(1) {
            let fresh = fresh_name(&used, &base);
            used.insert(fresh.clone());
            match &a {
                Anchor::Slot(n, attr) => {
                    set_slot_name(m, *n, attr, Some(fresh.clone()));
                    for (v, va) in &anchors {
                        if va == &a {
                            set_var_name(m, *v, &fresh);
                        }
                    }
                }
                Anchor::Node(_) => {
                    for (v, va) in &anchors {
                        if va == &a && m.node(*v).and_then(|n| n.variable_name()) == Some(name.as_str()) {
                            set_var_name(m, *v, &fresh);
                        }
                    }
                }
            }
        }
    }
    *m != before
}

/// Replaces every occurrence of `old` among variable and slot names.
pub(crate) fn rename_all(m: &mut AxiomModel, old: &str, new: &str) {
    for n in m.nodes.values_mut() {
        if let NodeKind::Variable { name, slots, .. } = &mut n.kind {
            if name == old {
                *name = new.to_string();
            }
            for s in slots {
                if s.bound_var_name.as_deref() == Some(old) {
                    s.bound_var_name = Some(new.to_string());
                }
            }
        }
    }
}
