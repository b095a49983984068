//! Syntax trees for WSML documents and logical expressions.

use serde::{Deserialize, Serialize};

/// A name as written in source.
///
/// `dc#title` and `dc:title` both become [`Ident::QName`]; the separator is not
/// kept, so the two spellings compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ident {
    Bare(String),
    QName { prefix: String, local: String },
    /// `_"http://..."`
    Iri(String),
}

impl Ident {
    pub fn bare(s: impl Into<String>) -> Self {
        Ident::Bare(s.into())
    }

    pub fn qname(prefix: impl Into<String>, local: impl Into<String>) -> Self {
        Ident::QName { prefix: prefix.into(), local: local.into() }
    }

    /// Local part of the name; for a full IRI, the text after the last `#` or `/`.
    pub fn local(&self) -> &str {
        match self {
            Ident::Bare(s) => s,
            Ident::QName { local, .. } => local,
            Ident::Iri(iri) => crate::iri::local_part(iri),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Term {
    /// Named variable, stored with its leading `?`.
    Var(String),
    /// `?#`
    Anon,
    Ident(Ident),
    Str(String),
    /// Numeric literal kept as written.
    Num(String),
    /// `_date(1949,9,12)` and friends; `ctor` includes the underscore.
    Data { ctor: String, args: Vec<Term> },
    /// Function-symbol term such as `wsml#currentDate()`.
    Func { name: Ident, args: Vec<Term> },
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NegFlavor {
    #[default]
    Not,
    Naf,
    Neg,
}

impl NegFlavor {
    pub fn keyword(self) -> &'static str {
        match self {
            NegFlavor::Not => "not",
            NegFlavor::Naf => "naf",
            NegFlavor::Neg => "neg",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "not" => Some(NegFlavor::Not),
            "naf" => Some(NegFlavor::Naf),
            "neg" => Some(NegFlavor::Neg),
            _ => None,
        }
    }
}

/// Whether the attribute list was written before or after `memberOf`.
/// Only meaningful when a molecule has both parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MoleculeLayout {
    #[default]
    MemberOfFirst,
    AttributesFirst,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttrValue {
    pub name: Ident,
    /// One value prints bare, several print as `{a, b}`.
    pub values: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Molecule {
    pub subject: Term,
    /// Empty when the molecule has no `memberOf` part.
    pub member_of: Vec<Term>,
    pub attrs: Vec<AttrValue>,
    pub layout: MoleculeLayout,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expr {
    Molecule(Molecule),
    /// Two or more conjuncts, flattened.
    Conjunction(Vec<Expr>),
    /// Two or more disjuncts, flattened.
    Disjunction(Vec<Expr>),
    Negation { flavor: NegFlavor, operand: Box<Expr> },
    Equality { left: Term, right: Term },
    Inequality { left: Term, right: Term },
    RelationApplication { name: Ident, args: Vec<Term> },
    /// Explicit parentheses.
    Grouping(Box<Expr>),
}

impl Expr {
    pub fn group(e: Expr) -> Expr {
        Expr::Grouping(Box::new(e))
    }

    pub fn negation(flavor: NegFlavor, e: Expr) -> Expr {
        Expr::Negation { flavor, operand: Box::new(e) }
    }

    /// Collects every named variable in the expression, in order of appearance.
    pub fn variables(&self) -> Vec<String> {
        fn term(t: &Term, out: &mut Vec<String>) {
            match t {
                Term::Var(v) => out.push(v.clone()),
                Term::Data { args, .. } | Term::Func { args, .. } => {
                    args.iter().for_each(|a| term(a, out))
                }
                _ => {}
            }
        }
        fn walk(e: &Expr, out: &mut Vec<String>) {
            match e {
                Expr::Molecule(m) => {
                    term(&m.subject, out);
                    m.member_of.iter().for_each(|t| term(t, out));
                    for a in &m.attrs {
                        a.values.iter().for_each(|t| term(t, out));
                    }
                }
                Expr::Conjunction(xs) | Expr::Disjunction(xs) => xs.iter().for_each(|x| walk(x, out)),
                Expr::Negation { operand, .. } | Expr::Grouping(operand) => walk(operand, out),
                Expr::Equality { left, right } | Expr::Inequality { left, right } => {
                    term(left, out);
                    term(right, out);
                }
                Expr::RelationApplication { args, .. } => args.iter().for_each(|t| term(t, out)),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ConstraintKind {
    OfType,
    ImpliesType,
}

impl ConstraintKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ConstraintKind::OfType => "ofType",
            ConstraintKind::ImpliesType => "impliesType",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NfpStyle {
    #[default]
    Long,
    Short,
}

/// A `nonFunctionalProperties ... endNonFunctionalProperties` block.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Nfp {
    pub style: NfpStyle,
    pub props: Vec<AttrValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeDecl {
    pub name: Ident,
    pub kind: ConstraintKind,
    pub types: Vec<Ident>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptDecl {
    pub name: Ident,
    pub supers: Vec<Ident>,
    pub nfp: Option<Nfp>,
    pub attributes: Vec<AttributeDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDecl {
    pub name: Ident,
    pub member_of: Vec<Ident>,
    pub nfp: Option<Nfp>,
    pub values: Vec<AttrValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamDecl {
    pub name: Option<String>,
    pub kind: ConstraintKind,
    pub types: Vec<Ident>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationDecl {
    pub name: Ident,
    pub params: Vec<ParamDecl>,
    pub super_relation: Option<Ident>,
    pub nfp: Option<Nfp>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomDecl {
    pub name: Ident,
    pub nfp: Option<Nfp>,
    pub body: Option<Expr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionKind {
    Precondition,
    Postcondition,
    Assumption,
    Effect,
}

impl SectionKind {
    pub const ALL: [SectionKind; 4] = [
        SectionKind::Precondition,
        SectionKind::Postcondition,
        SectionKind::Assumption,
        SectionKind::Effect,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            SectionKind::Precondition => "precondition",
            SectionKind::Postcondition => "postcondition",
            SectionKind::Assumption => "assumption",
            SectionKind::Effect => "effect",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapabilitySection {
    pub kind: SectionKind,
    pub name: Option<Ident>,
    pub nfp: Option<Nfp>,
    pub body: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapabilityDecl {
    pub name: Option<Ident>,
    pub nfp: Option<Nfp>,
    pub imports: Vec<Ident>,
    pub shared_variables: Vec<String>,
    pub sections: Vec<CapabilitySection>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Item {
    Ontology { name: Option<Ident>, nfp: Option<Nfp> },
    Imports(Vec<Ident>),
    Concept(ConceptDecl),
    Instance(InstanceDecl),
    Relation(RelationDecl),
    Axiom(AxiomDecl),
    Capability(CapabilityDecl),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NamespaceDecl {
    pub default: Option<String>,
    pub prefixes: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Document {
    pub namespace: Option<NamespaceDecl>,
    pub items: Vec<Item>,
}

impl Document {
    /// Name given after the `ontology` keyword, if any.
    pub fn ontology_name(&self) -> Option<&Ident> {
        self.items.iter().find_map(|i| match i {
            Item::Ontology { name, .. } => name.as_ref(),
            _ => None,
        })
    }

    pub fn imports(&self) -> impl Iterator<Item = &Ident> {
        self.items.iter().flat_map(|i| match i {
            Item::Imports(xs) => xs.as_slice(),
            _ => &[],
        })
    }
}
