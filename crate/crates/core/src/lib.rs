pub mod codegen;
pub mod engine;
pub mod graph;
pub mod iri;
pub mod ontology;
pub mod persist;
pub mod script;
pub mod wsml;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/ontologies.md")]
pub mod book_ontologies {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/editing.md")]
pub mod book_editing {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/text.md")]
pub mod book_text {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/scripts.md")]
pub mod book_scripts {}
