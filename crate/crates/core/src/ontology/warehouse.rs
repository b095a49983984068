use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::OntologyError;
use crate::iri::Iri;
use crate::wsml::parse_header;

/// Directory of `.wsml` files, indexed by the ontology IRI each file declares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntologyWarehouse {
    pub root_dir: PathBuf,
    pub index: BTreeMap<Iri, PathBuf>,
    /// Files skipped because their header could not be read.
    pub warnings: Vec<String>,
}

impl OntologyWarehouse {
    pub fn open(root_dir: impl AsRef<Path>) -> Result<Self, OntologyError> {
        let root_dir = root_dir.as_ref().to_path_buf();
        if !root_dir.is_dir() {
            return Err(OntologyError::DirectoryNotFound(root_dir));
        }
        let mut files = Vec::new();
        collect_wsml(&root_dir, &mut files)?;
        files.sort();

        let mut index: BTreeMap<Iri, PathBuf> = BTreeMap::new();
        let mut warnings = Vec::new();
        for path in files {
            let text = fs::read_to_string(&path).map_err(|e| OntologyError::io(&path, e))?;
            let iri = match parse_header(&text) {
                Ok((ns, Some(name))) => super::resolve::ontology_iri(ns.as_ref(), &name),
                Ok((_, None)) => {
                    warnings.push(format!("{}: no ontology declaration", path.display()));
                    continue;
                }
                Err(e) => {
                    warnings.push(format!("{}:{e}", path.display()));
                    continue;
                }
            };
            if let Some(first) = index.get(&iri) {
                return Err(OntologyError::DuplicateIri { iri, first: first.clone(), second: path });
            }
            index.insert(iri, path);
        }
        Ok(OntologyWarehouse { root_dir, index, warnings })
    }

    pub fn path_of(&self, iri: &Iri) -> Option<&Path> {
        self.index.get(iri).map(PathBuf::as_path)
    }

    pub fn contains(&self, iri: &Iri) -> bool {
        self.index.contains_key(iri)
    }
}

fn collect_wsml(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), OntologyError> {
    let entries = fs::read_dir(dir).map_err(|e| OntologyError::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| OntologyError::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() {
            collect_wsml(&path, out)?;
        } else if path.extension().is_some_and(|e| e == "wsml") {
            out.push(path);
        }
    }
    Ok(())
}
