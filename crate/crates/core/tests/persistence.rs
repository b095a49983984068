mod support;

use support::*;
use wsml_axiom::codegen::AxiomNamer;
use wsml_axiom::engine::EditMode;
use wsml_axiom::iri::Iri;
use wsml_axiom::ontology::{OntologyRegistry, OntologyWarehouse};
use wsml_axiom::persist::{PersistError, PersistedAxiom};

#[test]
fn walkthrough_survives_save_and_restore() {
    let r = replay("walkthrough", None);
    let doc = PersistedAxiom::capture(&r.editor, &r.registry, 61);
    assert_eq!(
        doc.ontologies,
        vec![Iri::new("http://www.wsmo.org/ontologies/loc"), Iri::new("http://www.wsmo.org/ontologies/trainConnection")]
    );
    assert_eq!(doc.mode, EditMode::Advanced);
    let json = doc.to_json();

    let mut reg = OntologyRegistry::new();
    let restored = PersistedAxiom::from_json(&json).unwrap().restore(&mut reg, Some(&warehouse())).unwrap();
    assert_eq!(restored.model().serialization(), r.editor.model().serialization());
    assert_eq!(restored.mode, EditMode::Advanced);
    assert!(!restored.can_undo());
    let text = wsml_axiom::codegen::generate_axiom_text(restored.model(), &reg, Default::default());
    assert_eq!(text, text_of(&r));
    assert_eq!(AxiomNamer::resume(doc.counter).next_name(), "autoGeneratedAxiom_62");
}

#[test]
fn fuzz_models_round_trip() {
    let reg = fuzz_registry();
    for seed in 0..60 {
        let run = fuzz_run(seed, &reg, 30);
        let doc = PersistedAxiom::capture(&run.editor, &reg, seed);
        let back = PersistedAxiom::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        let mut fresh = reg.clone();
        let e = back.restore(&mut fresh, None).unwrap();
        assert_eq!(e.model().serialization(), run.editor.model().serialization(), "seed {seed}");
    }
}

#[test]
fn missing_ontology_is_reported() {
    let r = replay("walkthrough", Some(7));
    let json = PersistedAxiom::capture(&r.editor, &r.registry, 0).to_json();
    let doc = PersistedAxiom::from_json(&json).unwrap();

    let err = doc.restore(&mut OntologyRegistry::new(), None).unwrap_err();
    assert!(matches!(err, PersistError::MissingOntology(_)));
    assert_eq!(err.code(), "MissingOntology");

    let empty = tempfile::tempdir().unwrap();
    let wh = OntologyWarehouse::open(empty.path()).unwrap();
    let err = doc.restore(&mut OntologyRegistry::new(), Some(&wh)).unwrap_err();
    assert_eq!(err.code(), "MissingOntology");
}

#[test]
fn malformed_documents_are_refused() {
    let r = replay("walkthrough", Some(12));
    let doc = PersistedAxiom::capture(&r.editor, &r.registry, 0);

    let mut v: serde_json::Value = serde_json::from_str(&doc.to_json()).unwrap();
    v["format"] = 7.into();
    assert_eq!(PersistedAxiom::from_json(&v.to_string()).unwrap_err().code(), "UnsupportedVersion");
    assert_eq!(PersistedAxiom::from_json("{").unwrap_err().code(), "MalformedDocument");

    let mut dangling = doc.clone();
    dangling.nodes.pop();
    assert_eq!(dangling.model().unwrap_err().code(), "Integrity");

    let mut behind = doc.clone();
    behind.next_node = 1;
    assert_eq!(behind.model().unwrap_err().code(), "Integrity");

    let mut dup = doc;
    dup.nodes.push(dup.nodes[1].clone());
    assert_eq!(dup.model().unwrap_err().code(), "Integrity");
}
