use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use indexmap::IndexMap;

use super::model::*;
use super::resolve::{ontology_iri, Resolver};
use super::{OntologyError, OntologyWarehouse};
use crate::iri::{short_name_base, Iri, XSD_NS};
use crate::wsml::{self, printer, Ident, Item, ParseError, Position, Term};

pub const BUILTIN_ONTOLOGY: &str = XSD_NS;
const BUILTIN_SOURCE: &str = include_str!("../../data/xsd.wsml");

/// Loaded ontologies plus the indexes needed for subsumption queries.
#[derive(Debug, Clone)]
pub struct OntologyRegistry {
    ontologies: IndexMap<Iri, LoadedOntology>,
    short_names: BTreeMap<String, Iri>,
    concept_index: HashMap<Iri, Iri>,
    instance_index: HashMap<Iri, Iri>,
    relation_index: HashMap<Iri, Iri>,
    /// Strict ancestors of every loaded concept; stubs appear as members.
    ancestors: HashMap<Iri, BTreeSet<Iri>>,
}

/// Concepts satisfying a constraint set, plus the stubs that blocked a verdict.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompatibleConcepts {
    pub concepts: Vec<Iri>,
    pub unresolved: Vec<Iri>,
}

impl Default for OntologyRegistry {
    fn default() -> Self {
        Self::new()
    }
}

fn semantic_error(path: Option<&Path>, pos: Position, message: String) -> OntologyError {
    OntologyError::Parse {
        path: path.map(Path::to_path_buf),
        error: ParseError { pos, expected: Vec::new(), found: String::new(), message },
    }
}

impl OntologyRegistry {
    pub fn new() -> Self {
        let mut reg = OntologyRegistry {
            ontologies: IndexMap::new(),
            short_names: BTreeMap::new(),
            concept_index: HashMap::new(),
            instance_index: HashMap::new(),
            relation_index: HashMap::new(),
            ancestors: HashMap::new(),
        };
        reg.load_text(BUILTIN_SOURCE, None).expect("built-in ontology loads");
        reg
    }

    pub fn builtin_iri() -> Iri {
        Iri::new(BUILTIN_ONTOLOGY)
    }

    // ---- loading -----------------------------------------------------------

    pub fn load_file(&mut self, path: impl AsRef<Path>) -> Result<Iri, OntologyError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| OntologyError::io(path, e))?;
        self.load_text(&text, Some(path))
    }

    pub fn load_by_iri(&mut self, warehouse: &OntologyWarehouse, iri: &Iri) -> Result<Iri, OntologyError> {
        if self.ontologies.contains_key(iri) {
            return Ok(iri.clone());
        }
        let path = warehouse.path_of(iri).ok_or_else(|| OntologyError::NotInWarehouse(iri.clone()))?;
        self.load_file(path)
    }

    /// Loads the ontology a stub concept belongs to.
    pub fn load_imported(&mut self, warehouse: &OntologyWarehouse, stub: &Iri) -> Result<Iri, OntologyError> {
        if let Some(o) = self.ontology_of(stub) {
            return Ok(o.clone());
        }
        let candidates = self.stub_hints(stub);
        for c in &candidates {
            if warehouse.contains(c) {
                return self.load_by_iri(warehouse, c);
            }
        }
        Err(OntologyError::NotInWarehouse(candidates.into_iter().next().unwrap_or_else(|| stub.clone())))
    }

    /// Ontology IRIs that may define `stub`, most likely first.
    pub fn stub_hints(&self, stub: &Iri) -> Vec<Iri> {
        let mut out: Vec<Iri> = Vec::new();
        for o in self.ontologies.values() {
            for imp in &o.imports {
                if stub.as_str().starts_with(imp.as_str()) && !out.contains(imp) {
                    out.push(imp.clone());
                }
            }
        }
        let ns = stub.namespace();
        for c in [ns.trim_end_matches(['#', '/']), ns] {
            let c = Iri::new(c);
            if !c.as_str().is_empty() && !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    pub fn load_text(&mut self, text: &str, path: Option<&Path>) -> Result<Iri, OntologyError> {
        let (doc, positions) = wsml::parse_document_with_positions(text)
            .map_err(|error| OntologyError::Parse { path: path.map(Path::to_path_buf), error })?;
        let Some(name) = doc.ontology_name() else {
            return Err(semantic_error(path, Position::START, "missing ontology declaration".into()));
        };
        let iri = ontology_iri(doc.namespace.as_ref(), name);
        if self.ontologies.contains_key(&iri) {
            return Ok(iri);
        }
        let res = Resolver::new(doc.namespace.as_ref(), &iri);
        let mut onto = LoadedOntology {
            iri: iri.clone(),
            short_name: String::new(),
            element_ns: res.element_ns.clone(),
            path: path.map(Path::to_path_buf),
            imports: Vec::new(),
            concepts: IndexMap::new(),
            instances: IndexMap::new(),
            relations: IndexMap::new(),
        };
        let mut defined: BTreeSet<Iri> = BTreeSet::new();
        for (item, &pos) in doc.items.iter().zip(&positions) {
            let err = |m: String| semantic_error(path, pos, m);
            let resolve_all = |ids: &[Ident]| -> Result<Vec<Iri>, OntologyError> {
                let mut out: Vec<Iri> = Vec::new();
                for id in ids {
                    let i = res.resolve(id).map_err(err)?;
                    if !out.contains(&i) {
                        out.push(i);
                    }
                }
                Ok(out)
            };
            let mut define = |id: &Ident| -> Result<(Iri, String), OntologyError> {
                let (i, local) = res.define(id).map_err(err)?;
                if !defined.insert(i.clone()) || self.element_exists(&i) {
                    return Err(err(format!("'{i}' is already defined")));
                }
                Ok((i, local))
            };
            match item {
                Item::Imports(xs) => {
                    for i in resolve_all(xs)? {
                        if !onto.imports.contains(&i) {
                            onto.imports.push(i);
                        }
                    }
                }
                Item::Concept(c) => {
                    let (id, local) = define(&c.name)?;
                    let superconcepts = resolve_all(&c.supers)?;
                    let mut own: Vec<AttributeDef> = Vec::new();
                    for a in &c.attributes {
                        let types = resolve_all(&a.types)?;
                        let name = a.name.local().to_string();
                        match own.iter_mut().find(|o| o.name == name) {
                            Some(o) => union_into(&mut o.type_constraints, &types),
                            None => own.push(AttributeDef { name, constraint_kind: a.kind, type_constraints: types }),
                        }
                    }
                    onto.concepts.insert(
                        local,
                        ConceptDef {
                            id,
                            ontology: iri.clone(),
                            superconcepts,
                            own_attributes: own,
                            effective_attributes: Vec::new(),
                        },
                    );
                }
                Item::Instance(i) => {
                    let (id, local) = define(&i.name)?;
                    let member_of = resolve_all(&i.member_of)?;
                    let mut attribute_values = Vec::new();
                    for v in &i.values {
                        for t in &v.values {
                            let value = match t {
                                Term::Ident(x) => InstanceValue::Ref(res.resolve(x).map_err(err)?),
                                Term::Str(s) => InstanceValue::Literal(s.clone()),
                                other => InstanceValue::Literal(printer::term(other)),
                            };
                            attribute_values.push((v.name.local().to_string(), value));
                        }
                    }
                    onto.instances.insert(local, InstanceDef { id, ontology: iri.clone(), member_of, attribute_values });
                }
                Item::Relation(r) => {
                    let (id, local) = define(&r.name)?;
                    if r.params.is_empty() {
                        return Err(err(format!("relation '{local}' has no parameters")));
                    }
                    let mut parameters = Vec::new();
                    for p in &r.params {
                        parameters.push(ParameterDef {
                            name: p.name.clone(),
                            constraint_kind: p.kind,
                            type_constraints: resolve_all(&p.types)?,
                        });
                    }
                    let super_relation = match &r.super_relation {
                        Some(s) => Some(res.resolve(s).map_err(err)?),
                        None => None,
                    };
                    onto.relations.insert(local, RelationDef { id, ontology: iri.clone(), parameters, super_relation });
                }
                Item::Ontology { .. } | Item::Axiom(_) | Item::Capability(_) => {}
            }
        }

        self.insert(onto);
        if let Err(cycle) = self.recompute() {
            self.remove(&iri);
            self.recompute().expect("registry was acyclic before this load");
            return Err(OntologyError::CyclicInheritance(cycle));
        }
        let short = if iri.as_str() == BUILTIN_ONTOLOGY { "xsd".to_string() } else { self.free_short_name(&iri) };
        self.short_names.insert(short.clone(), iri.clone());
        self.ontologies.get_mut(&iri).expect("just inserted").short_name = short;
        Ok(iri)
    }

    fn free_short_name(&self, iri: &Iri) -> String {
        let base = short_name_base(iri.as_str());
        if !self.short_names.contains_key(&base) {
            return base;
        }
        (1..).map(|n| format!("{base}{n}")).find(|c| !self.short_names.contains_key(c)).expect("unbounded")
    }

    fn insert(&mut self, onto: LoadedOntology) {
        for c in onto.concepts.values() {
            self.concept_index.insert(c.id.clone(), onto.iri.clone());
        }
        for i in onto.instances.values() {
            self.instance_index.insert(i.id.clone(), onto.iri.clone());
        }
        for r in onto.relations.values() {
            self.relation_index.insert(r.id.clone(), onto.iri.clone());
        }
        self.ontologies.insert(onto.iri.clone(), onto);
    }

    fn remove(&mut self, iri: &Iri) {
        if let Some(onto) = self.ontologies.shift_remove(iri) {
            for c in onto.concepts.values() {
                self.concept_index.remove(&c.id);
            }
            for i in onto.instances.values() {
                self.instance_index.remove(&i.id);
            }
            for r in onto.relations.values() {
                self.relation_index.remove(&r.id);
            }
            self.short_names.retain(|_, v| v != iri);
        }
    }

    /// Recomputes ancestor sets and effective attributes for every concept.
    /// On a superconcept cycle, returns the concepts along it.
    fn recompute(&mut self) -> Result<(), Vec<Iri>> {
        #[derive(Clone, Copy, PartialEq)]
        enum State {
            Visiting,
            Done,
        }
        struct Walk<'a> {
            reg: &'a OntologyRegistry,
            state: HashMap<Iri, State>,
            stack: Vec<Iri>,
            ancestors: HashMap<Iri, BTreeSet<Iri>>,
            effective: HashMap<Iri, Vec<EffectiveAttribute>>,
        }
        impl Walk<'_> {
            fn visit(&mut self, c: &Iri) -> Result<(), Vec<Iri>> {
                match self.state.get(c) {
                    Some(State::Done) => return Ok(()),
                    Some(State::Visiting) => {
                        let start = self.stack.iter().position(|x| x == c).unwrap_or(0);
                        let mut cyc = self.stack[start..].to_vec();
                        cyc.push(c.clone());
                        return Err(cyc);
                    }
                    None => {}
                }
                let def = self.reg.concept(c).expect("visit only loaded concepts");
                self.state.insert(c.clone(), State::Visiting);
                self.stack.push(c.clone());
                let mut anc = BTreeSet::new();
                for s in &def.superconcepts {
                    anc.insert(s.clone());
                    if self.reg.concept(s).is_some() {
                        self.visit(s)?;
                        anc.extend(self.ancestors[s].iter().cloned());
                    }
                }
                // own attributes first, then inherited ones in superconcept order
                let mut eff: Vec<EffectiveAttribute> = def
                    .own_attributes
                    .iter()
                    .map(|a| EffectiveAttribute { attr: a.clone(), inheritance: InheritanceKind::Own })
                    .collect();
                for s in &def.superconcepts {
                    let Some(inherited) = self.effective.get(s) else { continue };
                    for ia in inherited {
                        match eff.iter_mut().find(|e| e.attr.name == ia.attr.name) {
                            Some(e) => {
                                if e.inheritance == InheritanceKind::Own {
                                    e.inheritance = InheritanceKind::Overridden;
                                }
                                union_into(&mut e.attr.type_constraints, &ia.attr.type_constraints);
                            }
                            None => eff.push(EffectiveAttribute {
                                attr: ia.attr.clone(),
                                inheritance: InheritanceKind::Inherited,
                            }),
                        }
                    }
                }
                self.stack.pop();
                self.state.insert(c.clone(), State::Done);
                self.ancestors.insert(c.clone(), anc);
                self.effective.insert(c.clone(), eff);
                Ok(())
            }
        }

        let all: Vec<Iri> = self.ontologies.values().flat_map(|o| o.concepts.values().map(|c| c.id.clone())).collect();
        let mut walk = Walk {
            reg: self,
            state: HashMap::new(),
            stack: Vec::new(),
            ancestors: HashMap::new(),
            effective: HashMap::new(),
        };
        for c in &all {
            walk.visit(c)?;
        }
        let Walk { ancestors, mut effective, .. } = walk;
        for onto in self.ontologies.values_mut() {
            for c in onto.concepts.values_mut() {
                c.effective_attributes = effective.remove(&c.id).unwrap_or_default();
            }
        }
        self.ancestors = ancestors;
        Ok(())
    }

    // ---- lookup ------------------------------------------------------------

    pub fn ontologies(&self) -> impl Iterator<Item = &LoadedOntology> {
        self.ontologies.values()
    }

    pub fn ontology(&self, iri: &Iri) -> Option<&LoadedOntology> {
        self.ontologies.get(iri)
    }

    pub fn is_loaded(&self, iri: &Iri) -> bool {
        self.ontologies.contains_key(iri)
    }

    pub fn short_name(&self, iri: &Iri) -> Option<&str> {
        self.ontologies.get(iri).map(|o| o.short_name.as_str())
    }

    pub fn ontology_by_short_name(&self, short: &str) -> Option<&LoadedOntology> {
        self.short_names.get(short).and_then(|i| self.ontologies.get(i))
    }

    /// Ontology that defines the element, if loaded.
    pub fn ontology_of(&self, element: &Iri) -> Option<&Iri> {
        self.concept_index
            .get(element)
            .or_else(|| self.instance_index.get(element))
            .or_else(|| self.relation_index.get(element))
    }

    fn element_exists(&self, iri: &Iri) -> bool {
        self.ontology_of(iri).is_some()
    }

    pub fn concept(&self, iri: &Iri) -> Option<&ConceptDef> {
        let o = self.concept_index.get(iri)?;
        self.ontologies[o].concepts.get(iri.as_str().strip_prefix(self.ontologies[o].element_ns.as_str())?)
    }

    pub fn instance(&self, iri: &Iri) -> Option<&InstanceDef> {
        let o = self.instance_index.get(iri)?;
        self.ontologies[o].instances.get(iri.as_str().strip_prefix(self.ontologies[o].element_ns.as_str())?)
    }

    pub fn relation(&self, iri: &Iri) -> Option<&RelationDef> {
        let o = self.relation_index.get(iri)?;
        self.ontologies[o].relations.get(iri.as_str().strip_prefix(self.ontologies[o].element_ns.as_str())?)
    }

    pub fn concepts(&self) -> impl Iterator<Item = &ConceptDef> {
        self.ontologies.values().flat_map(|o| o.concepts.values())
    }

    pub fn instances(&self) -> impl Iterator<Item = &InstanceDef> {
        self.ontologies.values().flat_map(|o| o.instances.values())
    }

    /// A concept reference with no loaded definition.
    pub fn is_stub(&self, iri: &Iri) -> bool {
        !iri.is_universal() && !self.concept_index.contains_key(iri)
    }

    /// Every stub referenced as a superconcept or type anywhere in the registry.
    pub fn stubs(&self) -> BTreeSet<Iri> {
        let mut out = BTreeSet::new();
        for c in self.concepts() {
            for s in &c.superconcepts {
                if self.is_stub(s) {
                    out.insert(s.clone());
                }
            }
            for a in &c.own_attributes {
                out.extend(a.type_constraints.iter().filter(|t| self.is_stub(t)).cloned());
            }
        }
        out
    }

    pub fn complete_attributes(&self, concept: &Iri) -> Result<ConceptDef, OntologyError> {
        self.concept(concept).cloned().ok_or_else(|| OntologyError::UnknownElement(concept.clone()))
    }

    pub fn ancestors(&self, concept: &Iri) -> BTreeSet<Iri> {
        self.ancestors.get(concept).cloned().unwrap_or_default()
    }

    /// True when `sub` equals `sup` or lies below it.
    pub fn subsumed_by(&self, sub: &Iri, sup: &Iri) -> bool {
        sup.is_universal() || sub == sup || self.ancestors.get(sub).is_some_and(|a| a.contains(sup))
    }

    // ---- names -------------------------------------------------------------

    /// `short:local` for a loaded element.
    pub fn display_name(&self, element: &Iri) -> Result<String, OntologyError> {
        if element.is_universal() {
            return Ok("wsml:true".into());
        }
        let o = self.ontology_of(element).ok_or_else(|| OntologyError::UnknownElement(element.clone()))?;
        Ok(format!("{}:{}", self.ontologies[o].short_name, element.local_name()))
    }

    /// Name as written in generated text: bare inside `home`, qualified elsewhere.
    pub fn qualified_name(&self, element: &Iri, home: Option<&Iri>) -> String {
        if element.is_universal() {
            return "wsml:true".into();
        }
        match self.ontology_of(element) {
            Some(o) if Some(o) == home && o.as_str() != BUILTIN_ONTOLOGY => element.local_name().to_string(),
            Some(o) => format!("{}:{}", self.ontologies[o].short_name, element.local_name()),
            None => format!("_\"{element}\""),
        }
    }

    /// Looks up an element by display name (`short:local`), full IRI, or
    /// unique local name.
    pub fn resolve_name(&self, name: &str) -> Option<Iri> {
        if name.contains("://") {
            return Some(Iri::new(name));
        }
        if let Some((short, local)) = name.split_once(':') {
            let o = self.ontology_by_short_name(short)?;
            let iri = Iri::new(format!("{}{local}", o.element_ns));
            return self.element_exists(&iri).then_some(iri);
        }
        let mut hits = self
            .concept_index
            .keys()
            .chain(self.instance_index.keys())
            .chain(self.relation_index.keys())
            .filter(|i| i.local_name() == name);
        let first = hits.next()?.clone();
        hits.next().is_none().then_some(first)
    }

    // ---- compatibility -----------------------------------------------------

    /// Whether a value of type `candidate` satisfies every constraint in `required`.
    pub fn is_compatible(&self, candidate: &Iri, required: &[Iri]) -> Result<bool, OntologyError> {
        if self.is_stub(candidate) {
            return Err(OntologyError::UnresolvedStub(candidate.clone()));
        }
        for r in required {
            if self.subsumed_by(candidate, r) {
                continue;
            }
            if self.is_stub(r) {
                return Err(OntologyError::UnresolvedStub(r.clone()));
            }
            return Ok(false);
        }
        Ok(true)
    }

    /// Instance compatibility: every constraint is met by some `memberOf` type.
    pub fn is_instance_compatible(&self, instance: &Iri, required: &[Iri]) -> Result<bool, OntologyError> {
        let inst = self.instance(instance).ok_or_else(|| OntologyError::UnknownElement(instance.clone()))?;
        for r in required {
            if inst.member_of.iter().any(|m| self.subsumed_by(m, r)) {
                continue;
            }
            if self.is_stub(r) {
                return Err(OntologyError::UnresolvedStub(r.clone()));
            }
            return Ok(false);
        }
        Ok(true)
    }

    pub fn list_compatible_concepts(&self, required: &[Iri]) -> CompatibleConcepts {
        let mut out = CompatibleConcepts::default();
        for c in self.concepts() {
            match self.is_compatible(&c.id, required) {
                Ok(true) => out.concepts.push(c.id.clone()),
                Ok(false) => {}
                Err(OntologyError::UnresolvedStub(s)) => {
                    if !out.unresolved.contains(&s) {
                        out.unresolved.push(s);
                    }
                }
                Err(_) => {}
            }
        }
        out
    }

    pub fn list_compatible_instances(&self, required: &[Iri]) -> Vec<Iri> {
        self.instances()
            .filter(|i| matches!(self.is_instance_compatible(&i.id, required), Ok(true)))
            .map(|i| i.id.clone())
            .collect()
    }

    pub fn list_relations(&self) -> Vec<&RelationDef> {
        self.ontologies.values().flat_map(|o| o.relations.values()).collect()
    }
}

fn union_into(dst: &mut Vec<Iri>, src: &[Iri]) {
    for s in src {
        if !dst.contains(s) {
            dst.push(s.clone());
        }
    }
}
