//! Registry browsing tree: concepts (C) with attributes (@), instances (I),
//! relations (R) with parameters (p).

use serde::{Deserialize, Serialize};

use super::OntologyRegistry;
use crate::iri::Iri;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TreeKind {
    Ontology,
    Concept,
    Attribute,
    Instance,
    Relation,
    Parameter,
}

impl TreeKind {
    pub fn letter(self) -> &'static str {
        match self {
            TreeKind::Ontology => "O",
            TreeKind::Concept => "C",
            TreeKind::Attribute => "@",
            TreeKind::Instance => "I",
            TreeKind::Relation => "R",
            TreeKind::Parameter => "p",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub kind: TreeKind,
    pub label: String,
    pub iri: Option<Iri>,
    /// Name-only reference into an ontology that is not loaded.
    pub stub: bool,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    fn leaf(kind: TreeKind, label: String) -> Self {
        TreeNode { kind, label, iri: None, stub: false, children: Vec::new() }
    }
}

fn type_list(reg: &OntologyRegistry, types: &[Iri]) -> String {
    let names: Vec<_> = types.iter().map(|t| reg.qualified_name(t, None)).collect();
    names.join(", ")
}

fn label(reg: &OntologyRegistry, iri: &Iri) -> String {
    reg.display_name(iri).unwrap_or_else(|_| {
        // stub: qualify with the short name of the ontology it is expected in
        let hint = reg
            .ontologies()
            .find(|o| iri.as_str().starts_with(&o.element_ns))
            .map(|o| format!("{}:{}", o.short_name, iri.local_name()));
        hint.unwrap_or_else(|| iri.as_str().to_string())
    })
}

fn concept_node(reg: &OntologyRegistry, iri: &Iri, depth: usize) -> TreeNode {
    let Some(def) = reg.concept(iri) else {
        return TreeNode { kind: TreeKind::Concept, label: label(reg, iri), iri: Some(iri.clone()), stub: true, children: vec![] };
    };
    let mut children: Vec<TreeNode> = def
        .effective_attributes
        .iter()
        .map(|e| {
            TreeNode::leaf(
                TreeKind::Attribute,
                format!("{} {} {}", e.attr.name, e.attr.constraint_kind.keyword(), type_list(reg, &e.attr.type_constraints)),
            )
        })
        .collect();
    // guard against pathological depth; the registry rejects cycles
    if depth < 64 {
        for sub in reg.concepts().filter(|c| c.superconcepts.contains(iri)) {
            children.push(concept_node(reg, &sub.id, depth + 1));
        }
    }
    TreeNode { kind: TreeKind::Concept, label: label(reg, iri), iri: Some(iri.clone()), stub: false, children }
}

/// One tree per loaded ontology. A concept is listed under each of its
/// superconcepts, and at top level when none of them is in its own ontology.
/// Stub superconcepts appear at top level with their dependents beneath.
pub fn registry_tree(reg: &OntologyRegistry) -> Vec<TreeNode> {
    let mut out = Vec::new();
    for onto in reg.ontologies() {
        let mut children = Vec::new();
        let mut stubs_done: Vec<Iri> = Vec::new();
        for c in onto.concepts.values() {
            let local_supers = c.superconcepts.iter().any(|s| reg.ontology_of(s) == Some(&onto.iri));
            if !local_supers {
                children.push(concept_node(reg, &c.id, 0));
            }
            for s in c.superconcepts.iter().filter(|s| reg.is_stub(s)) {
                if stubs_done.contains(s) {
                    continue;
                }
                stubs_done.push(s.clone());
                let mut stub = concept_node(reg, s, 0);
                for dep in onto.concepts.values().filter(|d| d.superconcepts.contains(s)) {
                    stub.children.push(concept_node(reg, &dep.id, 1));
                }
                children.push(stub);
            }
        }
        for i in onto.instances.values() {
            let types: Vec<_> = i.member_of.iter().map(|m| label(reg, m)).collect();
            children.push(TreeNode {
                kind: TreeKind::Instance,
                label: format!("{} memberOf {}", label(reg, &i.id), types.join(", ")),
                iri: Some(i.id.clone()),
                stub: false,
                children: vec![],
            });
        }
        for r in onto.relations.values() {
            let params = r
                .parameters
                .iter()
                .enumerate()
                .map(|(n, p)| {
                    let name = p.name.clone().unwrap_or_else(|| format!("#{}", n + 1));
                    TreeNode::leaf(
                        TreeKind::Parameter,
                        format!("{name} {} {}", p.constraint_kind.keyword(), type_list(reg, &p.type_constraints)),
                    )
                })
                .collect();
            children.push(TreeNode {
                kind: TreeKind::Relation,
                label: format!("{}/{}", label(reg, &r.id), r.parameters.len()),
                iri: Some(r.id.clone()),
                stub: false,
                children: params,
            });
        }
        out.push(TreeNode {
            kind: TreeKind::Ontology,
            label: format!("{} {}", onto.short_name, onto.iri),
            iri: Some(onto.iri.clone()),
            stub: false,
            children,
        });
    }
    out
}

/// Indented text rendering, one node per line.
pub fn render_tree(nodes: &[TreeNode]) -> String {
    fn go(n: &TreeNode, depth: usize, out: &mut String) {
        out.push_str(&"  ".repeat(depth));
        out.push_str(n.kind.letter());
        out.push(' ');
        out.push_str(&n.label);
        if n.stub {
            out.push_str(" [unloaded]");
        }
        out.push('\n');
        for c in &n.children {
            go(c, depth + 1, out);
        }
    }
    let mut out = String::new();
    for n in nodes {
        go(n, 0, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stubs_are_flagged_and_concepts_repeat_per_superconcept() {
        let mut r = OntologyRegistry::new();
        r.load_text(
            "namespace { _\"http://e.org/s#\", b _\"http://e.org/b#\" }\nontology _\"http://e.org/s\"\n\
             concept A\nconcept B\nconcept C subConceptOf {A, B}\nconcept P subConceptOf b#Human\n",
            None,
        )
        .unwrap();
        let text = render_tree(&registry_tree(&r));
        assert_eq!(text.matches("C s:C").count(), 2, "{text}");
        assert!(text.contains("C b:Human [unloaded]") || text.contains("http://e.org/b#Human [unloaded]"), "{text}");
        assert!(text.contains("C xsd:dayOfMonth"));
    }
}
