//! Helpers shared by the integration tests: fixture access, the listing
//! token oracle and a random operation generator.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wsml_axiom::codegen::{generate_axiom_text, RenderOptions};
use wsml_axiom::engine::literal::sample_literal;
use wsml_axiom::engine::{
    BindingSpec, EditMode, EditOp, Editor, MoveEnd, NameTarget, OperandSpec,
};
use wsml_axiom::graph::{AxiomModel, ConnId, Endpoint, NodeId, NodeKind, OperatorKind};
use wsml_axiom::iri::Iri;
use wsml_axiom::ontology::{OntologyRegistry, OntologyWarehouse};
use wsml_axiom::script::{parse_script, Replay, ScriptRecord};
use wsml_axiom::wsml::{tokenize, TokenKind};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn warehouse() -> OntologyWarehouse {
    OntologyWarehouse::open(fixtures().join("warehouse")).expect("fixture warehouse")
}

pub fn read_fixture(rel: &str) -> String {
    std::fs::read_to_string(fixtures().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn script(name: &str) -> Vec<ScriptRecord> {
    parse_script(&read_fixture(&format!("scripts/{name}.ops.json"))).expect("fixture script parses")
}

/// The walkthrough axiom name.
pub const APP_AXIOM: &str = "autoGeneratedAxiom_61";

pub fn replay(name: &str, at_step: Option<u32>) -> Replay {
    let mut r = Replay::new(APP_AXIOM, OntologyRegistry::new(), Some(warehouse()));
    r.run(&script(name), at_step).unwrap_or_else(|e| panic!("{name}: {e}"));
    r
}

pub fn text_of(r: &Replay) -> String {
    generate_axiom_text(r.editor.model(), &r.registry, RenderOptions::default())
}

/// Token stream used to compare listings: QName separators unified,
/// the axiom counter masked.
pub fn tokens(text: &str) -> Vec<String> {
    tokenize(text)
        .unwrap_or_else(|e| panic!("listing does not lex: {e}\n{text}"))
        .into_iter()
        .map(|t| match t.kind {
            TokenKind::QName => t.lexeme.replacen('#', ":", 1),
            TokenKind::Identifier if t.lexeme.starts_with("autoGeneratedAxiom_") => "autoGeneratedAxiom_N".into(),
            _ => t.to_string(),
        })
        .collect()
}

/// Tokens of a printed listing, without the one unmatched `)` that the
/// walkthrough listings carry before their final period.
pub fn listing_tokens(text: &str) -> Vec<String> {
    let mut t = tokens(text);
    let opens = t.iter().filter(|x| *x == "(").count();
    let closes = t.iter().filter(|x| *x == ")").count();
    let n = t.len();
    if closes == opens + 1 && n >= 2 && t[n - 2] == ")" && t[n - 1] == "." {
        t.remove(n - 2);
    }
    t
}

/// First differing position, for failure messages.
pub fn token_diff(a: &[String], b: &[String]) -> Option<String> {
    let i = a.iter().zip(b).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len()));
    if a.len() == b.len() && i == a.len() {
        return None;
    }
    let show = |v: &[String]| v[i.saturating_sub(3)..(i + 4).min(v.len())].join(" ");
    Some(format!("at token {i}: got `{}` expected `{}`", show(a), show(b)))
}

// ---- random edits ---------------------------------------------------------

/// Registry with the walkthrough ontologies plus ones that leave stubs.
pub fn fuzz_registry() -> OntologyRegistry {
    let wh = warehouse();
    let mut reg = OntologyRegistry::new();
    for iri in [
        "http://www.wsmo.org/ontologies/loc",
        "http://www.wsmo.org/ontologies/trainConnection",
        "http://www.example.org/travel/tr",
        "http://www.example.org/ontologies/sociology",
        "http://www.example.org/ontologies/persons",
    ] {
        reg.load_by_iri(&wh, &Iri::new(iri)).unwrap();
    }
    reg
}

struct Pools {
    concepts: Vec<Iri>,
    instances: Vec<Iri>,
    relations: Vec<Iri>,
    stubs: Vec<Iri>,
}

fn pools(reg: &OntologyRegistry) -> Pools {
    Pools {
        concepts: reg.concepts().map(|c| c.id.clone()).collect(),
        instances: reg.instances().map(|i| i.id.clone()).collect(),
        relations: reg.list_relations().iter().map(|r| r.id.clone()).collect(),
        stubs: reg.stubs().into_iter().collect(),
    }
}

fn pick<T: Clone>(rng: &mut ChaCha8Rng, xs: &[T]) -> Option<T> {
    xs.choose(rng).cloned()
}

fn any_node(rng: &mut ChaCha8Rng, m: &AxiomModel) -> NodeId {
    if rng.gen_bool(0.05) {
        return NodeId(9999);
    }
    let ids: Vec<NodeId> = m.nodes.keys().copied().collect();
    pick(rng, &ids).unwrap()
}

fn node_of(rng: &mut ChaCha8Rng, m: &AxiomModel, f: impl Fn(&NodeKind) -> bool) -> NodeId {
    let ids: Vec<NodeId> = m.nodes.values().filter(|n| f(&n.kind)).map(|n| n.id).collect();
    pick(rng, &ids).unwrap_or_else(|| any_node(rng, m))
}

fn any_conn(rng: &mut ChaCha8Rng, m: &AxiomModel) -> ConnId {
    let ids: Vec<ConnId> = m.connections.keys().copied().collect();
    pick(rng, &ids).unwrap_or(ConnId(9999))
}

fn slot_of(rng: &mut ChaCha8Rng, m: &AxiomModel) -> (NodeId, String) {
    let slots: Vec<(NodeId, String)> = m
        .nodes
        .values()
        .flat_map(|n| match &n.kind {
            NodeKind::Variable { slots, .. } => slots.iter().map(|s| (n.id, s.attr.name.clone())).collect(),
            _ => vec![],
        })
        .collect();
    pick(rng, &slots).unwrap_or((NodeId(1), "nothing".into()))
}

fn param_of(rng: &mut ChaCha8Rng, m: &AxiomModel) -> (NodeId, usize) {
    let ps: Vec<(NodeId, usize)> = m
        .nodes
        .values()
        .flat_map(|n| match &n.kind {
            NodeKind::RelationUse { params, .. } => (0..params.len()).map(|i| (n.id, i)).collect(),
            _ => vec![],
        })
        .collect();
    pick(rng, &ps).unwrap_or((NodeId(1), 0))
}

fn endpoint(rng: &mut ChaCha8Rng, m: &AxiomModel) -> Endpoint {
    match rng.gen_range(0..4) {
        0 => Endpoint::Root,
        1 => {
            let (node, attr) = slot_of(rng, m);
            Endpoint::Attribute { node, attr }
        }
        2 => {
            let (node, index) = param_of(rng, m);
            Endpoint::Parameter { node, index }
        }
        _ => Endpoint::Operator { node: node_of(rng, m, |k| matches!(k, NodeKind::Operator { .. })) },
    }
}

fn concept(rng: &mut ChaCha8Rng, p: &Pools) -> Iri {
    if rng.gen_bool(0.1) {
        if let Some(s) = pick(rng, &p.stubs) {
            return s;
        }
    }
    pick(rng, &p.concepts).unwrap()
}

fn literal(rng: &mut ChaCha8Rng, dt: &Iri) -> String {
    match rng.gen_range(0..6) {
        0 => "not a value".into(),
        1 => "42".into(),
        _ => sample_literal(dt).into(),
    }
}

fn binding(rng: &mut ChaCha8Rng, m: &AxiomModel, p: &Pools) -> BindingSpec {
    match rng.gen_range(0..7) {
        0 => BindingSpec::NewVarDefaultType,
        1 => BindingSpec::NewVarOfConcept { concept: concept(rng, p) },
        2 => BindingSpec::ExistingVariable { node: node_of(rng, m, |k| matches!(k, NodeKind::Variable { .. })) },
        3 => match pick(rng, &p.instances) {
            Some(instance) => BindingSpec::InstanceFromOntology { instance },
            None => BindingSpec::NewVarDefaultType,
        },
        4 => BindingSpec::ExistingInstance { node: node_of(rng, m, |k| matches!(k, NodeKind::InstanceRef { .. })) },
        5 => BindingSpec::LiteralDefaultType { value: literal(rng, &Iri::xsd("float")) },
        _ => {
            let datatype = Iri::xsd(["integer", "float", "string", "date", "boolean"].choose(rng).unwrap());
            let value = literal(rng, &datatype);
            BindingSpec::LiteralOfType { datatype, value }
        }
    }
}

fn operand(rng: &mut ChaCha8Rng, m: &AxiomModel, p: &Pools) -> OperandSpec {
    match rng.gen_range(0..10) {
        0 => match pick(rng, &p.relations) {
            Some(relation) => OperandSpec::NewRelation { relation },
            None => OperandSpec::NewVarDefaultType,
        },
        1 => OperandSpec::NewOperator { operator: *OperatorKind::ALL.choose(rng).unwrap() },
        _ => binding(rng, m, p).into(),
    }
}

fn name(rng: &mut ChaCha8Rng, m: &AxiomModel) -> String {
    match rng.gen_range(0..5) {
        0 => "bad name".into(),
        1 => m.variables().next().and_then(|v| v.variable_name()).unwrap_or("?x").to_string(),
        _ => format!("?n{}", rng.gen_range(0..50)),
    }
}

/// One random operation. Most are plausible, some are nonsense; the engine
/// has to refuse the nonsense.
pub fn random_op(rng: &mut ChaCha8Rng, m: &AxiomModel, reg: &OntologyRegistry) -> EditOp {
    let p = pools(reg);
    let kind = *OperatorKind::ALL.choose(rng).unwrap();
    match rng.gen_range(0..22) {
        0..=2 => EditOp::CreateVariable { concept: concept(rng, &p) },
        3 => EditOp::CreateOperator { kind },
        4 => EditOp::CreateInstanceNode { instance: pick(rng, &p.instances).unwrap_or_else(|| Iri::new("http://nowhere#x")) },
        5 => EditOp::CreateRelationNode { relation: pick(rng, &p.relations).unwrap_or_else(|| Iri::new("http://nowhere#r")) },
        6 | 7 => EditOp::CreateConnection { source: endpoint(rng, m), target: any_node(rng, m) },
        8..=10 => {
            let (node, attr) = slot_of(rng, m);
            EditOp::RefineAttribute { node, attr, spec: binding(rng, m, &p) }
        }
        11 => {
            let (node, index) = param_of(rng, m);
            let spec = if rng.gen_bool(0.5) { BindingSpec::NewVarDefaultType } else { binding(rng, m, &p) };
            EditOp::BindParameter { node, index, spec }
        }
        12 => {
            let target = match rng.gen_range(0..3) {
                0 => NameTarget::Node { node: node_of(rng, m, |k| matches!(k, NodeKind::Variable { .. })) },
                1 => {
                    let (node, attr) = slot_of(rng, m);
                    NameTarget::Slot { node, attr }
                }
                _ => {
                    let (node, index) = param_of(rng, m);
                    NameTarget::Param { node, index }
                }
            };
            EditOp::RenameVariable { target, name: name(rng, m) }
        }
        13 => EditOp::CopyVariable { node: node_of(rng, m, |k| matches!(k, NodeKind::Variable { .. })) },
        14 => EditOp::DeleteNode { node: any_node(rng, m) },
        15 | 16 => {
            let second = if rng.gen_bool(0.6) { Some(operand(rng, m, &p)) } else { None };
            EditOp::InsertOperator { connection: any_conn(rng, m), kind, second }
        }
        17 => EditOp::AddOperand { node: node_of(rng, m, |k| matches!(k, NodeKind::Operator { .. })), operand: operand(rng, m, &p) },
        18 => EditOp::ChangeOperatorType { node: node_of(rng, m, |k| matches!(k, NodeKind::Operator { .. })), kind },
        19 => {
            let end = if rng.gen_bool(0.5) {
                MoveEnd::Source { endpoint: endpoint(rng, m) }
            } else {
                MoveEnd::Target { node: any_node(rng, m) }
            };
            EditOp::MoveEndpoint { connection: any_conn(rng, m), end }
        }
        20 => EditOp::DeleteConnection { connection: any_conn(rng, m) },
        _ => {
            let node = node_of(rng, m, |k| matches!(k, NodeKind::PrimitiveValue { .. }));
            let dt = m.node(node).and_then(|n| n.value_type().cloned()).unwrap_or_else(|| Iri::xsd("string"));
            EditOp::SetPrimitiveValue { node, value: literal(rng, &dt) }
        }
    }
}

pub struct FuzzRun {
    pub editor: Editor,
    /// Serialization before any operation.
    pub initial: String,
    /// Serialization after each accepted operation.
    pub states: Vec<String>,
    pub attempted: usize,
}

/// Up to `max_ops` random operations, seeded.
pub fn fuzz_run(seed: u64, reg: &OntologyRegistry, max_ops: usize) -> FuzzRun {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut editor = Editor::new(format!("fuzz{seed}"));
    if rng.gen_bool(0.5) {
        editor.set_mode(EditMode::Advanced);
    }
    let initial = editor.model().serialization();
    let mut states = Vec::new();
    let n = rng.gen_range(1..=max_ops);
    // a model with content makes later operations meaningful
    let first = EditOp::CreateVariable { concept: pools(reg).concepts.choose(&mut rng).unwrap().clone() };
    for i in 0..n {
        let op = if i == 0 { first.clone() } else { random_op(&mut rng, editor.model(), reg) };
        let before = editor.revision();
        if editor.apply(reg, &op).is_ok() && editor.revision() != before {
            states.push(editor.model().serialization());
        }
    }
    FuzzRun { editor, initial, states, attempted: n }
}
