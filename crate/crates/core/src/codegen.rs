//! Renders an axiom model as WSML text.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::engine::literal::literal_term;
use crate::graph::{AxiomModel, ConnId, Endpoint, NodeId, NodeKind, OperatorKind, ROOT};
use crate::iri::Iri;
use crate::ontology::{OntologyRegistry, BUILTIN_ONTOLOGY};
use crate::wsml::printer::{indent, serialize_document};
use crate::wsml::{
    pretty_expression, AttrValue, CapabilityDecl, CapabilitySection, Document, Expr, Ident, Item, Molecule,
    MoleculeLayout, NegFlavor, Nfp, NfpStyle, SectionKind, Term,
};

pub const DESCRIPTION: &str = "Auto-generated axiom by Axiom Editor";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RenderOptions {
    pub negation: NegFlavor,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodegenError {
    #[error("a capability needs at least one section")]
    EmptySections,
}

impl CodegenError {
    pub fn code(&self) -> &'static str {
        match self {
            CodegenError::EmptySections => "EmptySections",
        }
    }
}

/// Turns a printed qualified name back into an identifier.
fn ident_of(name: &str) -> Ident {
    if let Some(iri) = name.strip_prefix("_\"").and_then(|s| s.strip_suffix('"')) {
        return Ident::Iri(iri.to_string());
    }
    match name.split_once(':') {
        Some((p, l)) => Ident::qname(p, l),
        None => Ident::bare(name),
    }
}

struct Builder<'a> {
    m: &'a AxiomModel,
    reg: &'a OntologyRegistry,
    opts: RenderOptions,
    reach: BTreeSet<NodeId>,
    used: BTreeSet<Iri>,
    visiting: BTreeSet<NodeId>,
}

impl Builder<'_> {
    fn name(&mut self, iri: &Iri) -> Ident {
        self.used.insert(iri.clone());
        ident_of(&self.reg.qualified_name(iri, self.m.home_ontology.as_ref()))
    }

    /// Attribute names carry the prefix of the variable's concept when that
    /// concept lives outside the home ontology.
    fn attr_name(&self, concept: &Iri, attr: &str) -> Ident {
        match self.reg.ontology_of(concept) {
            Some(o) if Some(o) != self.m.home_ontology.as_ref() && o.as_str() != BUILTIN_ONTOLOGY => {
                Ident::qname(self.reg.short_name(o).unwrap_or_default(), attr)
            }
            _ => Ident::bare(attr),
        }
    }

    fn is_defining(&self, c: ConnId, target: NodeId) -> bool {
        self.m.defining_connection(target, &self.reach) == Some(c)
    }

    fn group_all(xs: Vec<Expr>) -> Vec<Expr> {
        xs.into_iter().map(Expr::group).collect()
    }

    /// `?v memberOf T [bound slots] and (slot content) and ...`
    fn variable(&mut self, v: NodeId) -> Option<Expr> {
        let n = self.m.node(v)?;
        let NodeKind::Variable { name, concept, slots } = &n.kind else { return None };
        if !self.visiting.insert(v) {
            return None;
        }
        let member = Term::Ident(self.name(concept));
        let mut attrs = Vec::new();
        let mut conjuncts = Vec::new();
        for s in slots {
            let ep = Endpoint::Attribute { node: v, attr: s.attr.name.clone() };
            let Some(c) = self.m.connection_from(&ep) else { continue };
            let (cid, target) = (c.id, c.target);
            let content = self.slot_content(cid, target, s.bound_var_name.as_deref());
            let shown = content.is_some() || matches!(self.m.node(target).map(|t| &t.kind), Some(NodeKind::Variable { .. }));
            if let (true, Some(bound)) = (shown, &s.bound_var_name) {
                attrs.push(AttrValue { name: self.attr_name(concept, &s.attr.name), values: vec![Term::var(bound.clone())] });
            }
            conjuncts.extend(content);
        }
        self.visiting.remove(&v);
        let molecule =
            Expr::Molecule(Molecule { subject: Term::var(name.clone()), member_of: vec![member], attrs, layout: MoleculeLayout::MemberOfFirst });
        if conjuncts.is_empty() {
            return Some(molecule);
        }
        let mut all = vec![molecule];
        all.extend(Self::group_all(conjuncts));
        Some(Expr::Conjunction(all))
    }

    /// The expression a slot binding contributes after the molecule.
    fn slot_content(&mut self, c: ConnId, target: NodeId, bound: Option<&str>) -> Option<Expr> {
        let node = self.m.node(target)?;
        match &node.kind {
            NodeKind::Variable { .. } => {
                if self.is_defining(c, target) {
                    self.variable(target)
                } else {
                    None
                }
            }
            NodeKind::InstanceRef { instance, .. } => {
                let inst = instance.clone();
                let bound = bound?;
                Some(Expr::Equality { left: Term::var(bound), right: Term::Ident(self.name(&inst)) })
            }
            NodeKind::PrimitiveValue { datatype, value } => {
                let term = literal_term(datatype, value);
                self.used.insert(datatype.clone());
                Some(Expr::Equality { left: Term::var(bound?), right: term })
            }
            NodeKind::Operator { operator } => {
                let kind = *operator;
                let parts: Vec<Expr> = self
                    .m
                    .operands(target)
                    .into_iter()
                    .map(|o| (o.id, o.target))
                    .collect::<Vec<_>>()
                    .into_iter()
                    .filter_map(|(oc, ot)| self.operand_in_slot(oc, ot, bound))
                    .collect();
                self.combine(kind, parts)
            }
            NodeKind::RelationUse { .. } | NodeKind::Root => None,
        }
    }

    fn operand_in_slot(&mut self, c: ConnId, target: NodeId, bound: Option<&str>) -> Option<Expr> {
        match &self.m.node(target)?.kind {
            NodeKind::Variable { name, concept, .. } if !self.is_defining(c, target) => {
                let (name, concept) = (name.clone(), concept.clone());
                let member = Term::Ident(self.name(&concept));
                Some(Expr::Molecule(Molecule {
                    subject: Term::var(name),
                    member_of: vec![member],
                    attrs: vec![],
                    layout: MoleculeLayout::MemberOfFirst,
                }))
            }
            _ => self.slot_content(c, target, bound),
        }
    }

    /// Operators with too few operands render as their single operand, or
    /// as nothing.
    fn combine(&self, kind: OperatorKind, mut parts: Vec<Expr>) -> Option<Expr> {
        match (kind, parts.len()) {
            (_, 0) => None,
            (OperatorKind::Not, _) => Some(Expr::negation(self.opts.negation, Expr::group(parts.remove(0)))),
            (_, 1) => parts.pop(),
            (OperatorKind::And, _) => Some(Expr::Conjunction(Self::group_all(parts))),
            (OperatorKind::Or, _) => Some(Expr::Disjunction(Self::group_all(parts))),
        }
    }

    /// A node reached along the root chain.
    fn root_chain(&mut self, c: ConnId, target: NodeId) -> Option<Expr> {
        let node = self.m.node(target)?;
        match &node.kind {
            NodeKind::Variable { .. } if self.is_defining(c, target) => self.variable(target),
            NodeKind::Variable { .. } => self.operand_in_slot(c, target, None),
            NodeKind::RelationUse { .. } => self.relation(target),
            NodeKind::Operator { operator } => {
                let kind = *operator;
                if !self.visiting.insert(target) {
                    return None;
                }
                let ops: Vec<(ConnId, NodeId)> = self.m.operands(target).into_iter().map(|o| (o.id, o.target)).collect();
                let parts = ops.into_iter().filter_map(|(oc, ot)| self.root_chain(oc, ot)).collect();
                self.visiting.remove(&target);
                self.combine(kind, parts)
            }
            _ => None,
        }
    }

    fn relation(&mut self, r: NodeId) -> Option<Expr> {
        let NodeKind::RelationUse { relation, params } = &self.m.node(r)?.kind else { return None };
        let name = self.name(&relation.clone());
        let mut args = Vec::new();
        let mut defs = Vec::new();
        for i in 0..params.len() {
            let ep = Endpoint::Parameter { node: r, index: i };
            match self.m.connection_from(&ep).map(|c| (c.id, c.target)) {
                Some((cid, t)) => {
                    let v = self.m.node(t).and_then(|n| n.variable_name()).map(str::to_string);
                    args.push(v.map(Term::Var).unwrap_or(Term::Anon));
                    if self.is_defining(cid, t) {
                        defs.extend(self.variable(t));
                    }
                }
                None => args.push(Term::Anon),
            }
        }
        let app = Expr::RelationApplication { name, args };
        if defs.is_empty() {
            return Some(app);
        }
        let mut all = vec![app];
        all.extend(Self::group_all(defs));
        Some(Expr::Conjunction(all))
    }
}

fn build(m: &AxiomModel, reg: &OntologyRegistry, opts: RenderOptions) -> (Option<Expr>, BTreeSet<Iri>) {
    let mut b = Builder { m, reg, opts, reach: m.reachable_from_root(), used: BTreeSet::new(), visiting: BTreeSet::new() };
    let start = m.outgoing(ROOT).next().map(|c| (c.id, c.target));
    let expr = start.and_then(|(c, t)| b.root_chain(c, t));
    (expr, b.used)
}

/// The logical expression of the model, or `None` for an empty body.
pub fn build_expression(m: &AxiomModel, reg: &OntologyRegistry, opts: RenderOptions) -> Option<Expr> {
    build(m, reg, opts).0
}

/// The full `axiom ... definedBy ... .` block.
pub fn generate_axiom_text(m: &AxiomModel, reg: &OntologyRegistry, opts: RenderOptions) -> String {
    let mut out = format!(
        "axiom {}\n  nonFunctionalProperties\n    dc:description hasValue \"{DESCRIPTION}\"\n  endNonFunctionalProperties\n  definedBy\n",
        m.axiom_name
    );
    match build_expression(m, reg, opts) {
        Some(e) => {
            out.push_str(&indent(&pretty_expression(&e), 4));
            out.push_str(".\n");
        }
        None => out.push_str("  .\n"),
    }
    out
}

/// Ontologies whose elements appear in the generated text, sorted by
/// short name.
pub fn referenced_ontologies(m: &AxiomModel, reg: &OntologyRegistry) -> Vec<Iri> {
    let (_, used) = build(m, reg, RenderOptions::default());
    let mut onts: Vec<Iri> = used.iter().filter_map(|e| reg.ontology_of(e).cloned()).collect();
    onts.sort_by(|a, b| reg.short_name(a).cmp(&reg.short_name(b)));
    onts.dedup();
    onts
}

/// `namespace { short _"ns", ... }` for every referenced ontology.
pub fn namespace_preamble(m: &AxiomModel, reg: &OntologyRegistry) -> String {
    let lines: Vec<String> = referenced_ontologies(m, reg)
        .iter()
        .filter_map(|o| {
            let ont = reg.ontology(o)?;
            Some(format!("  {} _\"{}\"", ont.short_name, ont.element_ns))
        })
        .collect();
    if lines.is_empty() {
        return String::new();
    }
    format!("namespace {{\n{}\n}}\n", lines.join(",\n"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapabilitySkeleton {
    pub kind: SectionKind,
    pub description: Option<String>,
    pub body: Option<Expr>,
}

/// A `capability` block with sections in canonical order.
pub fn emit_capability(shared_variables: &[String], sections: &[CapabilitySkeleton]) -> Result<String, CodegenError> {
    if sections.is_empty() {
        return Err(CodegenError::EmptySections);
    }
    let mut sorted: Vec<&CapabilitySkeleton> = sections.iter().collect();
    sorted.sort_by_key(|s| s.kind);
    let sections = sorted
        .into_iter()
        .map(|s| CapabilitySection {
            kind: s.kind,
            name: None,
            nfp: s.description.as_ref().map(|d| Nfp {
                style: NfpStyle::Long,
                props: vec![AttrValue { name: Ident::qname("dc", "description"), values: vec![Term::Str(d.clone())] }],
            }),
            body: s.body.clone(),
        })
        .collect();
    let decl = CapabilityDecl {
        name: None,
        nfp: None,
        imports: vec![],
        shared_variables: shared_variables.to_vec(),
        sections,
    };
    Ok(serialize_document(&Document { namespace: None, items: vec![Item::Capability(decl)] }))
}

/// Hands out `autoGeneratedAxiom_N` names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomNamer {
    counter: u64,
}

impl AxiomNamer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Continues after the highest number handed out so far.
    pub fn resume(counter: u64) -> Self {
        AxiomNamer { counter }
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn next_name(&mut self) -> String {
        self.counter += 1;
        format!("autoGeneratedAxiom_{}", self.counter)
    }

    /// Makes sure later names do not collide with `name`.
    pub fn observe(&mut self, name: &str) {
        if let Some(n) = name.strip_prefix("autoGeneratedAxiom_").and_then(|s| s.parse::<u64>().ok()) {
            self.counter = self.counter.max(n);
        }
    }
}
