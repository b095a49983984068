//! Name resolution inside one ontology document.

use std::collections::HashMap;

use crate::iri::{Iri, WSML_NS, XSD_NS};
use crate::wsml::{Ident, NamespaceDecl};

const PREDECLARED: &[(&str, &str)] = &[("xsd", XSD_NS), ("wsml", WSML_NS)];

fn prefix_iri<'a>(ns: Option<&'a NamespaceDecl>, prefix: &str) -> Option<&'a str> {
    ns.and_then(|n| n.prefixes.iter().find(|(p, _)| p == prefix).map(|(_, i)| i.as_str()))
        .or_else(|| PREDECLARED.iter().find(|(p, _)| *p == prefix).map(|(_, i)| *i))
}

/// IRI named by an `ontology` declaration.
pub(crate) fn ontology_iri(ns: Option<&NamespaceDecl>, name: &Ident) -> Iri {
    match name {
        Ident::Iri(s) => Iri::new(s.clone()),
        Ident::QName { prefix, local } => match prefix_iri(ns, prefix) {
            Some(base) => Iri::new(format!("{base}{local}")),
            None => Iri::new(format!("{prefix}:{local}")),
        },
        Ident::Bare(s) => match ns.and_then(|n| n.default.as_deref()) {
            Some(d) => Iri::new(format!("{d}{s}")),
            None => Iri::new(s.clone()),
        },
    }
}

pub(crate) struct Resolver {
    prefixes: HashMap<String, String>,
    pub element_ns: String,
}

impl Resolver {
    pub fn new(ns: Option<&NamespaceDecl>, ontology: &Iri) -> Self {
        let mut prefixes: HashMap<String, String> =
            PREDECLARED.iter().map(|(p, i)| (p.to_string(), i.to_string())).collect();
        if let Some(n) = ns {
            for (p, i) in &n.prefixes {
                prefixes.insert(p.clone(), i.clone());
            }
        }
        let element_ns = match ns.and_then(|n| n.default.clone()) {
            Some(d) => d,
            None => Iri::join(ontology.as_str(), "").as_str().to_string(),
        };
        Resolver { prefixes, element_ns }
    }

    pub fn resolve(&self, id: &Ident) -> Result<Iri, String> {
        match id {
            Ident::Iri(s) => Ok(Iri::new(s.clone())),
            Ident::QName { prefix, local } => match self.prefixes.get(prefix) {
                Some(base) => Ok(Iri::new(format!("{base}{local}"))),
                None => Err(format!("unknown prefix '{prefix}'")),
            },
            Ident::Bare(s) => {
                // `_float`, `_date`, ... name the built-in datatypes
                if let Some(rest) = s.strip_prefix('_').filter(|r| !r.is_empty()) {
                    Ok(Iri::xsd(rest))
                } else {
                    Ok(Iri::new(format!("{}{s}", self.element_ns)))
                }
            }
        }
    }

    /// Resolves a defining occurrence, which must fall in this ontology's namespace.
    pub fn define(&self, id: &Ident) -> Result<(Iri, String), String> {
        let iri = self.resolve(id)?;
        match iri.as_str().strip_prefix(self.element_ns.as_str()) {
            Some(local) if !local.is_empty() && !local.contains(['#', '/']) => {
                let local = local.to_string();
                Ok((iri, local))
            }
            _ => Err(format!("'{iri}' is outside the ontology namespace {}", self.element_ns)),
        }
    }
}
