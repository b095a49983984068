use std::path::PathBuf;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use wsml_axiom::engine::{EditOp, Editor, Menu, MenuTarget};
use wsml_axiom::graph::{Endpoint, NodeKind};
use wsml_axiom::ontology::{OntologyRegistry, OntologyWarehouse};
use wsml_axiom::script::{parse_script, record_steps, Replay, ScriptRecord};
use wsml_axiom_service::{router, AppState, GraphStateDto};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn warehouse() -> OntologyWarehouse {
    OntologyWarehouse::open(fixtures().join("warehouse")).unwrap()
}

fn app() -> Router {
    router(AppState::new(OntologyRegistry::new(), Some(warehouse())))
}

fn script(name: &str) -> Vec<ScriptRecord> {
    parse_script(&std::fs::read_to_string(fixtures().join(format!("scripts/{name}.ops.json"))).unwrap()).unwrap()
}

struct Reply {
    status: StatusCode,
    content_type: String,
    text: String,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_str(&self.text).unwrap_or_else(|e| panic!("{e}: {}", self.text))
    }
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header(header::CONTENT_TYPE, "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let res = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = res.status();
    let content_type =
        res.headers().get(header::CONTENT_TYPE).map(|v| v.to_str().unwrap().to_string()).unwrap_or_default();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    Reply { status, content_type, text: String::from_utf8(bytes.to_vec()).unwrap() }
}

async fn new_axiom(app: &Router) -> (String, Value) {
    let r = call(app, Method::POST, "/axioms", None).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.text);
    let v = r.json();
    (v["id"].as_str().unwrap().to_string(), v["state"].clone())
}

fn op_body(op: &EditOp) -> Value {
    serde_json::to_value(op).unwrap()
}

fn target_query(t: &MenuTarget) -> String {
    match t {
        MenuTarget::Surface => "surface".into(),
        MenuTarget::Node { node } => format!("node:{}", node.0),
        MenuTarget::Slot { node, attr } => format!("slot:{}:{attr}", node.0),
        MenuTarget::Param { node, index } => format!("param:{}:{index}", node.0),
        MenuTarget::Connection { connection } => format!("connection:{}", connection.0),
    }
}

fn targets(e: &Editor) -> Vec<MenuTarget> {
    let m = e.model();
    let mut out = vec![MenuTarget::Surface];
    for n in m.nodes.values() {
        out.push(MenuTarget::Node { node: n.id });
        match &n.kind {
            NodeKind::Variable { slots, .. } => {
                out.extend(slots.iter().map(|s| MenuTarget::Slot { node: n.id, attr: s.attr.name.clone() }))
            }
            NodeKind::RelationUse { params, .. } => {
                out.extend((0..params.len()).map(|index| MenuTarget::Param { node: n.id, index }))
            }
            _ => {}
        }
    }
    out.extend(m.connections.keys().map(|&connection| MenuTarget::Connection { connection }));
    out
}

/// Drives a session through a script while replaying it directly, checking
/// after every record that the service DTO equals the engine-built one.
async fn drive(app: &Router, name: &str, upto: Option<u32>) -> (String, Replay) {
    let (id, _) = new_axiom(app).await;
    let records = script(name);
    let mut direct = Replay::new("autoGeneratedAxiom_1", OntologyRegistry::new(), Some(warehouse()));
    for (r, step) in records.iter().zip(record_steps(&records)) {
        if upto.is_some_and(|k| step > k) {
            break;
        }
        let reply = match r.op.as_str() {
            "load_ontology" => call(app, Method::POST, "/ontologies", Some(r.args.clone())).await,
            "set_mode" => {
                call(app, Method::POST, &format!("/axioms/{id}/ops"), Some(json!({"op": "set_mode", "args": r.args})))
                    .await
            }
            _ => {
                let op = direct.edit_op(r).unwrap();
                call(app, Method::POST, &format!("/axioms/{id}/ops"), Some(op_body(&op))).await
            }
        };
        assert_eq!(reply.status, StatusCode::OK, "step {step} {}: {}", r.op, reply.text);
        direct.run_record(r).unwrap();
        let state = call(app, Method::GET, &format!("/axioms/{id}"), None).await.json();
        let expected = serde_json::to_value(GraphStateDto::build(&direct.editor, &direct.registry)).unwrap();
        assert_eq!(state, expected, "step {step} {}", r.op);
    }
    (id, direct)
}

#[tokio::test]
async fn health() {
    let r = call(&app(), Method::GET, "/health", None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["status"], "ok");
}

#[tokio::test]
async fn ontology_loading_and_browsing() {
    let app = app();
    let empty = call(&app, Method::GET, "/ontologies", None).await.json();
    assert_eq!(empty["loaded"].as_array().unwrap().len(), 1, "built-ins only");

    let r = call(&app, Method::POST, "/ontologies", Some(json!({"iri": "http://nowhere.example/x"}))).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    assert_eq!(r.json()["code"], "NotInWarehouse");

    for _ in 0..2 {
        let r = call(&app, Method::POST, "/ontologies", Some(json!({"iri": "http://www.wsmo.org/ontologies/loc"}))).await;
        assert_eq!(r.status, StatusCode::OK);
        assert_eq!(r.json()["short_name"], "loc");
    }
    let r = call(&app, Method::POST, "/ontologies", Some(json!({"iri": "http://www.wsmo.org/ontologies/trainConnection"})))
        .await;
    assert_eq!(r.status, StatusCode::OK);
    let listing = call(&app, Method::GET, "/ontologies", None).await.json();
    assert_eq!(listing["loaded"].as_array().unwrap().len(), 3);
    assert!(listing["tree"].as_array().unwrap().len() >= 2);

    let r = call(&app, Method::POST, "/ontologies", Some(json!({}))).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn broken_ontology_file_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.wsml");
    std::fs::write(&path, "ontology _\"http://e.org/b\"\nconcept c\n  a ofType\n").unwrap();
    let r = call(&app(), Method::POST, "/ontologies", Some(json!({"path": path}))).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY, "{}", r.text);
    let v = r.json();
    assert_eq!(v["code"], "ParseError");
    assert!(v["position"]["line"].as_u64().unwrap() >= 3);
}

#[tokio::test]
async fn fresh_axioms_are_independent() {
    let app = app();
    let (a, state) = new_axiom(&app).await;
    let (b, _) = new_axiom(&app).await;
    assert_ne!(a, b);
    assert_eq!(state["nodes"].as_array().unwrap().len(), 1);
    assert_eq!(state["nodes"][0]["label"], "Start");
    let text = state["text"].as_str().unwrap();
    assert!(text.starts_with("axiom autoGeneratedAxiom_1\n"), "{text}");
    assert!(text.ends_with("definedBy\n  .\n"));

    call(&app, Method::POST, "/ontologies", Some(json!({"iri": "http://www.wsmo.org/ontologies/loc"}))).await;
    let before_b = call(&app, Method::GET, &format!("/axioms/{b}"), None).await.json();
    let op = json!({"op": "create_variable", "args": {"concept": "http://www.wsmo.org/ontologies/loc#location"}});
    let r = call(&app, Method::POST, &format!("/axioms/{a}/ops"), Some(op)).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text);
    assert_eq!(r.json()["outcome"]["node"], 1);
    assert_eq!(call(&app, Method::GET, &format!("/axioms/{b}"), None).await.json(), before_b);

    let r = call(&app, Method::DELETE, &format!("/axioms/{b}"), None).await;
    assert_eq!(r.status, StatusCode::NO_CONTENT);
    let r = call(&app, Method::GET, &format!("/axioms/{b}"), None).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    assert_eq!(r.json()["code"], "NoSuchSession");
}

#[tokio::test]
async fn walkthrough_over_http_matches_the_engine() {
    let app = app();
    let (id, direct) = drive(&app, "walkthrough", None).await;
    let r = call(&app, Method::GET, &format!("/axioms/{id}/wsml"), None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert!(r.content_type.starts_with("text/plain"), "{}", r.content_type);
    let expected = wsml_axiom::codegen::generate_axiom_text(direct.editor.model(), &direct.registry, Default::default());
    // the service named this axiom itself
    assert_eq!(r.text.replacen("autoGeneratedAxiom_1", "X", 1), expected.replacen("autoGeneratedAxiom_1", "X", 1));
    assert!(r.text.contains("equalDistance(?smallDist, ?bigDist)"), "{}", r.text);
}

#[tokio::test]
async fn gating_errors_are_conflicts() {
    let app = app();
    let (id, direct) = drive(&app, "walkthrough", Some(7)).await;
    let trip = direct.node_label("trainTrip").unwrap();
    let occupied = EditOp::RefineAttribute {
        node: trip,
        attr: "start".into(),
        spec: wsml_axiom::engine::BindingSpec::NewVarDefaultType,
    };
    let r = call(&app, Method::POST, &format!("/axioms/{id}/ops"), Some(op_body(&occupied))).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.json()["code"], "SlotOccupied");

    let conn = direct.connection_label("trip").unwrap();
    let mv = EditOp::MoveEndpoint { connection: conn, end: wsml_axiom::engine::MoveEnd::Source { endpoint: Endpoint::Root } };
    let r = call(&app, Method::POST, &format!("/axioms/{id}/ops"), Some(op_body(&mv))).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.json()["code"], "ModeError");

    let r = call(&app, Method::POST, &format!("/axioms/{id}/ops"), Some(json!({"op": "fly"}))).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = call(&app, Method::POST, &format!("/axioms/{id}/ops"), Some(json!("["))).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = call(&app, Method::GET, &format!("/axioms/{id}/candidates?target=edge:1"), None).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn stale_revisions_are_refused() {
    let app = app();
    let (id, direct) = drive(&app, "walkthrough", Some(5)).await;
    let seen = call(&app, Method::GET, &format!("/axioms/{id}"), None).await.json()["revision"].as_u64().unwrap();
    let trip = direct.node_label("trainTrip").unwrap().0;
    let mut op = json!({"op": "refine_attribute", "args": {"node": trip, "attr": "start", "spec": {"type": "new_var_default_type"}}});
    op["revision"] = json!(seen + 1);
    let r = call(&app, Method::POST, &format!("/axioms/{id}/ops"), Some(op.clone())).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.json()["code"], "StaleRevision");
    op["revision"] = json!(seen);
    let r = call(&app, Method::POST, &format!("/axioms/{id}/ops"), Some(op)).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text);
    assert_eq!(r.json()["state"]["revision"], seen + 1);
}

#[tokio::test]
async fn undo_and_redo() {
    let app = app();
    let (id, initial) = new_axiom(&app).await;
    let r = call(&app, Method::POST, &format!("/axioms/{id}/undo"), None).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.json()["code"], "EmptyStack");

    call(&app, Method::POST, "/ontologies", Some(json!({"iri": "http://www.wsmo.org/ontologies/loc"}))).await;
    let op = json!({"op": "create_variable", "args": {"concept": "http://www.wsmo.org/ontologies/loc#location"}});
    let after = call(&app, Method::POST, &format!("/axioms/{id}/ops"), Some(op)).await.json()["state"].clone();
    let undone = call(&app, Method::POST, &format!("/axioms/{id}/undo"), None).await.json();
    for key in ["nodes", "connections", "text", "outline"] {
        assert_eq!(undone[key], initial[key], "{key}");
    }
    assert_eq!(undone["can_redo"], true);
    let redone = call(&app, Method::POST, &format!("/axioms/{id}/redo"), None).await.json();
    for key in ["nodes", "connections", "text", "outline"] {
        assert_eq!(redone[key], after[key], "{key}");
    }
}

#[tokio::test]
async fn persist_and_restore() {
    let server = app();
    let (id, direct) = drive(&server, "walkthrough", None).await;
    let r = call(&server, Method::PUT, &format!("/axioms/{id}/persist"), None).await;
    assert_eq!(r.status, StatusCode::OK);
    let doc = r.json();
    assert_eq!(doc["counter"], 1);

    let r = call(&server, Method::POST, "/axioms/restore", Some(doc.clone())).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.text);
    let restored = r.json();
    let original = call(&server, Method::GET, &format!("/axioms/{id}"), None).await.json();
    for key in ["nodes", "connections", "text", "outline", "mode"] {
        assert_eq!(restored["state"][key], original[key], "{key}");
    }
    assert_eq!(direct.editor.model().nodes.len(), restored["state"]["nodes"].as_array().unwrap().len());

    // a fresh server sees the counter and the ontologies
    let other = app();
    let mut bumped = doc.clone();
    bumped["counter"] = json!(60);
    let r = call(&other, Method::POST, "/axioms/restore", Some(bumped)).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.text);
    let (_, fresh) = new_axiom(&other).await;
    assert!(fresh["text"].as_str().unwrap().starts_with("axiom autoGeneratedAxiom_61\n"));

    let bare = router(AppState::new(OntologyRegistry::new(), None));
    let r = call(&bare, Method::POST, "/axioms/restore", Some(doc)).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.json()["code"], "MissingOntology");
}

/// Menus from the service equal the engine's, and for a pool of operations
/// the service answers 2xx exactly when the engine accepts.
#[tokio::test]
async fn candidates_and_ops_agree() {
    let records = script("walkthrough");
    let mut pool: Vec<EditOp> = Vec::new();
    for step in [7, 15, 21, 25, 29] {
        let mut direct = Replay::new("autoGeneratedAxiom_1", OntologyRegistry::new(), Some(warehouse()));
        direct.run(&records, Some(step)).unwrap();
        for t in targets(&direct.editor) {
            let menu = direct.editor.candidates(&direct.registry, &t);
            pool.extend(menu.entries.iter().flat_map(|e| e.choices.iter().map(|c| c.op.clone())));
        }
    }
    pool.sort_by_key(|op| serde_json::to_string(op).unwrap());
    pool.dedup();
    let sample: Vec<EditOp> = pool.iter().step_by((pool.len() / 150).max(1)).cloned().collect();

    for step in [7, 21, 29] {
        let app = app();
        let (id, direct) = drive(&app, "walkthrough", Some(step)).await;
        for t in targets(&direct.editor) {
            let r = call(&app, Method::GET, &format!("/axioms/{id}/candidates?target={}", target_query(&t)), None).await;
            assert_eq!(r.status, StatusCode::OK);
            let got: Menu = serde_json::from_str(&r.text).unwrap();
            assert_eq!(got, direct.editor.candidates(&direct.registry, &t), "step {step} {t:?}");
        }
        let doc = call(&app, Method::PUT, &format!("/axioms/{id}/persist"), None).await.json();
        for op in &sample {
            let copy = call(&app, Method::POST, "/axioms/restore", Some(doc.clone())).await.json();
            let copy_id = copy["id"].as_str().unwrap();
            let r = call(&app, Method::POST, &format!("/axioms/{copy_id}/ops"), Some(op_body(op))).await;
            let mut scratch = direct.editor.clone();
            match scratch.apply(&direct.registry, op) {
                Ok(_) => assert_eq!(r.status, StatusCode::OK, "step {step} {op:?}: {}", r.text),
                Err(e) => {
                    assert_eq!(r.status, StatusCode::CONFLICT, "step {step} {op:?}");
                    assert_eq!(r.json()["code"], e.code.as_str());
                }
            }
            call(&app, Method::DELETE, &format!("/axioms/{copy_id}"), None).await;
        }
    }
}
