use std::path::PathBuf;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::iri::{Iri, XSD_NS};
use crate::wsml::ConstraintKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeKind {
    Concept,
    Builtin,
    Universal,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeRef {
    pub iri: Iri,
}

impl TypeRef {
    pub fn new(iri: Iri) -> Self {
        TypeRef { iri }
    }

    pub fn kind(&self) -> TypeKind {
        type_kind(&self.iri)
    }
}

pub fn type_kind(iri: &Iri) -> TypeKind {
    if iri.is_universal() {
        TypeKind::Universal
    } else if iri.as_str().starts_with(XSD_NS) {
        TypeKind::Builtin
    } else {
        TypeKind::Concept
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InheritanceKind {
    Own,
    Inherited,
    Overridden,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeDef {
    pub name: String,
    pub constraint_kind: ConstraintKind,
    /// Non-empty, duplicate-free, in first-seen order.
    pub type_constraints: Vec<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectiveAttribute {
    pub attr: AttributeDef,
    pub inheritance: InheritanceKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptDef {
    pub id: Iri,
    pub ontology: Iri,
    /// Declared superconcepts; any of them may be a stub.
    pub superconcepts: Vec<Iri>,
    pub own_attributes: Vec<AttributeDef>,
    pub effective_attributes: Vec<EffectiveAttribute>,
}

impl ConceptDef {
    pub fn effective(&self, name: &str) -> Option<&EffectiveAttribute> {
        self.effective_attributes.iter().find(|e| e.attr.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceValue {
    /// Literal as written (strings unquoted, data constructors in source form).
    Literal(String),
    Ref(Iri),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDef {
    pub id: Iri,
    pub ontology: Iri,
    pub member_of: Vec<Iri>,
    pub attribute_values: Vec<(String, InstanceValue)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterDef {
    pub name: Option<String>,
    pub constraint_kind: ConstraintKind,
    pub type_constraints: Vec<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationDef {
    pub id: Iri,
    pub ontology: Iri,
    pub parameters: Vec<ParameterDef>,
    pub super_relation: Option<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadedOntology {
    pub iri: Iri,
    pub short_name: String,
    /// Namespace that element names of this ontology live in.
    pub element_ns: String,
    pub path: Option<PathBuf>,
    pub imports: Vec<Iri>,
    pub concepts: IndexMap<String, ConceptDef>,
    pub instances: IndexMap<String, InstanceDef>,
    pub relations: IndexMap<String, RelationDef>,
}
