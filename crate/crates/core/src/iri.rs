//! IRI values and the handful of well-known namespaces.

use std::fmt;

use serde::{Deserialize, Serialize};

pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";
pub const WSML_NS: &str = "http://www.wsmo.org/wsml/wsml-syntax#";
/// The universal type `wsml#true`.
pub const UNIVERSAL: &str = "http://www.wsmo.org/wsml/wsml-syntax#true";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Iri(String);

impl Iri {
    pub fn new(s: impl Into<String>) -> Self {
        Iri(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Text after the last `#` or `/`.
    pub fn local_name(&self) -> &str {
        local_part(&self.0)
    }

    /// Everything up to and including the last `#` or `/`.
    pub fn namespace(&self) -> &str {
        &self.0[..self.0.len() - self.local_name().len()]
    }

    pub fn is_universal(&self) -> bool {
        self.0 == UNIVERSAL
    }

    pub fn universal() -> Self {
        Iri::new(UNIVERSAL)
    }

    pub fn xsd(local: &str) -> Self {
        Iri(format!("{XSD_NS}{local}"))
    }

    /// Joins an ontology IRI or namespace with a local name, inserting `#`
    /// unless the base already ends in a separator.
    pub fn join(base: &str, local: &str) -> Self {
        if base.ends_with('#') || base.ends_with('/') {
            Iri(format!("{base}{local}"))
        } else {
            Iri(format!("{base}#{local}"))
        }
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Iri {
    fn from(s: &str) -> Self {
        Iri::new(s)
    }
}

impl From<String> for Iri {
    fn from(s: String) -> Self {
        Iri(s)
    }
}

pub fn local_part(s: &str) -> &str {
    match s.rfind(['#', '/']) {
        Some(i) => &s[i + 1..],
        None => s,
    }
}

/// Base short name for an ontology IRI: drop one trailing `#` or `/`, then
/// keep the last path segment.
pub fn short_name_base(iri: &str) -> String {
    let trimmed = iri.strip_suffix(['#', '/']).unwrap_or(iri);
    let seg = local_part(trimmed);
    if seg.is_empty() {
        "ontology".to_string()
    } else {
        seg.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_and_namespace() {
        let i = Iri::new("http://www.wsmo.org/ontologies/trainConnection#itinerary");
        assert_eq!(i.local_name(), "itinerary");
        assert_eq!(i.namespace(), "http://www.wsmo.org/ontologies/trainConnection#");
        assert_eq!(Iri::join("http://x/o", "c").as_str(), "http://x/o#c");
        assert_eq!(Iri::join("http://x/o#", "c").as_str(), "http://x/o#c");
        assert_eq!(Iri::join("http://x/o/", "c").as_str(), "http://x/o/c");
    }

    #[test]
    fn short_name_segments() {
        assert_eq!(short_name_base("http://www.wsmo.org/ontologies/dateTime"), "dateTime");
        assert_eq!(short_name_base("http://infrawebs.org/repository/dateTime"), "dateTime");
        assert_eq!(short_name_base("http://www.w3.org/2001/XMLSchema#"), "XMLSchema");
        assert_eq!(short_name_base("http://example.org/biology/"), "biology");
        assert_eq!(short_name_base("family"), "family");
    }
}
