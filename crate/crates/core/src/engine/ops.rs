use crate::graph::{
    AttributeSlot, AxiomModel, ConnId, Connection, Endpoint, Node, NodeId, NodeKind, OperatorKind, ParameterSlot, ROOT,
};
use crate::iri::Iri;
use crate::ontology::{OntologyRegistry, BUILTIN_ONTOLOGY};

use super::error::{err, EngineError, ErrorCode};
use super::literal::is_valid_literal;
use super::naming::{gen_variable_name, is_valid_name, normalize, rename_all};
use super::{BindingSpec, EditMode, EditOp, MoveEnd, NameTarget, OpOutcome, OperandSpec};

type Result<T> = std::result::Result<T, EngineError>;

/// What a connection source demands of its target.
#[derive(Debug, Clone)]
enum Gate {
    Root,
    Attr(Vec<Iri>),
    Param(Vec<Iri>),
}

fn node(m: &AxiomModel, id: NodeId) -> Result<&Node> {
    m.node(id).ok_or_else(|| EngineError::new(ErrorCode::UnknownNode, format!("no node {id}")))
}

fn variable(m: &AxiomModel, id: NodeId) -> Result<&Node> {
    let n = node(m, id)?;
    match n.kind {
        NodeKind::Variable { .. } => Ok(n),
        _ => err(ErrorCode::WrongKind, format!("{id} is a {}, not a variable", n.kind_name())),
    }
}

fn operator(m: &AxiomModel, id: NodeId) -> Result<OperatorKind> {
    let n = node(m, id)?;
    n.operator().ok_or_else(|| EngineError::new(ErrorCode::WrongKind, format!("{id} is not an operator")))
}

fn connection(m: &AxiomModel, id: ConnId) -> Result<&Connection> {
    m.connection(id).ok_or_else(|| EngineError::new(ErrorCode::UnknownConnection, format!("no connection {id}")))
}

fn is_builtin(reg: &OntologyRegistry, t: &Iri) -> bool {
    reg.ontology_of(t).is_some_and(|o| o.as_str() == BUILTIN_ONTOLOGY)
}

/// Built-in types that carry literal values.
pub(crate) fn is_datatype(reg: &OntologyRegistry, t: &Iri) -> bool {
    is_builtin(reg, t) && t.local_name() != "builtin"
}

fn concept_ok(reg: &OntologyRegistry, c: &Iri) -> Result<()> {
    if reg.concept(c).is_some() {
        Ok(())
    } else if reg.stubs().contains(c) {
        err(ErrorCode::StubConcept, format!("{c} is not loaded; load its ontology first"))
    } else {
        err(ErrorCode::UnknownConcept, format!("unknown concept {c}"))
    }
}

fn compat(reg: &OntologyRegistry, candidate: &Iri, required: &[Iri]) -> Result<()> {
    if reg.is_compatible(candidate, required)? {
        Ok(())
    } else {
        err(ErrorCode::Incompatible, format!("{candidate} does not satisfy the required type"))
    }
}

fn instance_compat(reg: &OntologyRegistry, inst: &Iri, required: &[Iri]) -> Result<()> {
    if reg.instance(inst).is_none() {
        return err(ErrorCode::UnknownInstance, format!("unknown instance {inst}"));
    }
    if reg.is_instance_compatible(inst, required)? {
        Ok(())
    } else {
        err(ErrorCode::Incompatible, format!("{inst} does not satisfy the required type"))
    }
}

/// The single most specific type among `constraints`.
pub fn default_type(reg: &OntologyRegistry, constraints: &[Iri]) -> Result<Iri> {
    let mut cs: Vec<&Iri> = constraints.iter().filter(|c| !c.is_universal()).collect();
    cs.dedup();
    if cs.is_empty() {
        return err(ErrorCode::NoDefaultType, "the attribute accepts any type; choose one");
    }
    let minimal: Vec<&Iri> =
        cs.iter().copied().filter(|x| !cs.iter().any(|y| y != x && reg.subsumed_by(y, x))).collect();
    if minimal.iter().any(|t| reg.is_stub(t)) {
        return err(ErrorCode::StubType, "the attribute type is not loaded; load its ontology first");
    }
    match minimal.as_slice() {
        [one] => Ok((*one).clone()),
        _ => err(ErrorCode::AmbiguousDefault, "the attribute has several unrelated types; choose one"),
    }
}

fn slot_constraints(m: &AxiomModel, ep: &Endpoint) -> Result<Vec<Iri>> {
    match ep {
        Endpoint::Attribute { node: n, attr } => {
            let v = variable(m, *n)?;
            let s = v.slot(attr).ok_or_else(|| EngineError::new(ErrorCode::NoSuchSlot, format!("{n} has no attribute {attr}")))?;
            Ok(s.attr.type_constraints.clone())
        }
        Endpoint::Parameter { node: n, index } => {
            let r = node(m, *n)?;
            if !matches!(r.kind, NodeKind::RelationUse { .. }) {
                return err(ErrorCode::WrongKind, format!("{n} is not a relation"));
            }
            let p = r.param(*index).ok_or_else(|| EngineError::new(ErrorCode::NoSuchSlot, format!("{n} has no parameter {index}")))?;
            Ok(p.param.type_constraints.clone())
        }
        _ => Ok(vec![]),
    }
}

/// The source endpoint exists and can take another connection.
fn check_source(m: &AxiomModel, ep: &Endpoint, ignore: Option<ConnId>) -> Result<()> {
    let used = |m: &AxiomModel| m.connections_iter().any(|c| &c.source == ep && Some(c.id) != ignore);
    match ep {
        Endpoint::Root => {}
        Endpoint::Attribute { .. } | Endpoint::Parameter { .. } => {
            slot_constraints(m, ep)?;
        }
        Endpoint::Operator { node: n } => {
            let k = operator(m, *n)?;
            if k == OperatorKind::Not && used(m) {
                return err(ErrorCode::NotArity, "NOT takes exactly one operand");
            }
            return Ok(());
        }
    }
    if used(m) {
        return err(ErrorCode::SlotOccupied, format!("{ep} is already connected"));
    }
    Ok(())
}

fn gate(m: &AxiomModel, ep: &Endpoint) -> Result<Gate> {
    match ep {
        Endpoint::Root => Ok(Gate::Root),
        Endpoint::Attribute { .. } => Ok(Gate::Attr(slot_constraints(m, ep)?)),
        Endpoint::Parameter { .. } => Ok(Gate::Param(slot_constraints(m, ep)?)),
        Endpoint::Operator { node: n } => match m.operator_chain(*n) {
            Some((_, Endpoint::Root)) => Ok(Gate::Root),
            Some((_, origin)) => Ok(Gate::Attr(slot_constraints(m, &origin)?)),
            None => err(ErrorCode::UnknownChain, "operator has no incoming connection"),
        },
    }
}

/// Whether `target` (with whatever hangs below it) fits under `gate`.
fn check_target(m: &AxiomModel, reg: &OntologyRegistry, gate: &Gate, target: NodeId, depth: usize) -> Result<()> {
    let n = node(m, target)?;
    if depth > m.nodes.len() {
        return err(ErrorCode::WouldCycle, "connection would close a cycle");
    }
    match (gate, &n.kind) {
        (_, NodeKind::Root) => err(ErrorCode::NotAllowed, "the start node cannot be a target"),
        (Gate::Param(c), NodeKind::Variable { concept, .. }) => compat(reg, concept, c),
        (Gate::Param(_), _) => err(ErrorCode::WrongKind, "parameters bind variables only"),
        (Gate::Attr(c), NodeKind::Variable { concept, .. }) => compat(reg, concept, c),
        (Gate::Attr(c), NodeKind::InstanceRef { instance, .. }) => instance_compat(reg, instance, c),
        (Gate::Attr(c), NodeKind::PrimitiveValue { datatype, .. }) => compat(reg, datatype, c),
        (Gate::Attr(_), NodeKind::RelationUse { .. }) => err(ErrorCode::WrongKind, "attributes cannot bind relations"),
        (Gate::Attr(_), NodeKind::Operator { operator: OperatorKind::And }) => {
            err(ErrorCode::NotAllowed, "AND cannot appear below an attribute")
        }
        (Gate::Root, NodeKind::Variable { .. } | NodeKind::RelationUse { .. }) => Ok(()),
        (Gate::Root, NodeKind::InstanceRef { .. } | NodeKind::PrimitiveValue { .. }) => {
            err(ErrorCode::WrongKind, "instances and values need an attribute to bind to")
        }
        (_, NodeKind::Operator { .. }) => {
            for c in m.operands(target) {
                check_target(m, reg, gate, c.target, depth + 1)?;
            }
            Ok(())
        }
    }
}

/// Full admission check for a connection `source → target`, ignoring the
/// connection `ignore` (used when moving an endpoint).
fn admit(m: &AxiomModel, reg: &OntologyRegistry, source: &Endpoint, target: NodeId, ignore: Option<ConnId>) -> Result<()> {
    check_source(m, source, ignore)?;
    let g = gate(m, source)?;
    let t = node(m, target)?;
    if target == ROOT {
        return err(ErrorCode::NotAllowed, "the start node cannot be a target");
    }
    let other_incoming = m.incoming(target).filter(|c| Some(c.id) != ignore).count();
    if other_incoming > 0 {
        let shared_ok = match t.kind {
            NodeKind::Operator { .. } | NodeKind::RelationUse { .. } | NodeKind::PrimitiveValue { .. } => false,
            NodeKind::InstanceRef { .. } => true,
            // a variable may be referenced from slots and parameters
            _ => matches!(source, Endpoint::Attribute { .. } | Endpoint::Parameter { .. }),
        };
        if !shared_ok {
            return err(ErrorCode::NotAllowed, format!("{target} is already connected"));
        }
    }
    check_target(m, reg, &g, target, 0)?;
    if source != &Endpoint::Root {
        let s = source.node();
        if s == target || m.reaches(target, s) {
            return err(ErrorCode::WouldCycle, "connection would close a cycle");
        }
    }
    Ok(())
}

fn new_variable(m: &mut AxiomModel, reg: &OntologyRegistry, concept: &Iri, name: String) -> NodeId {
    let slots = reg
        .concept(concept)
        .map(|c| {
            c.effective_attributes.iter().map(|e| AttributeSlot { attr: e.attr.clone(), bound_var_name: None }).collect()
        })
        .unwrap_or_default();
    if m.home_ontology.is_none() && !is_builtin(reg, concept) {
        m.home_ontology = reg.ontology_of(concept).cloned();
    }
    m.add_node(NodeKind::Variable { name, concept: concept.clone(), slots })
}

fn connect(m: &mut AxiomModel, source: Endpoint, target: NodeId) -> OpOutcome {
    let c = m.add_connection(source, target);
    OpOutcome { node: Some(target), connection: Some(c), operator: None }
}

fn check_literal(reg: &OntologyRegistry, datatype: &Iri, required: &[Iri], value: &str) -> Result<()> {
    if !is_datatype(reg, datatype) {
        return err(ErrorCode::Incompatible, format!("{datatype} is not a built-in datatype"));
    }
    compat(reg, datatype, required)?;
    if !is_valid_literal(datatype, value) {
        return err(ErrorCode::BadLiteral, format!("'{value}' is not a valid {}", datatype.local_name()));
    }
    Ok(())
}

/// Realizes a binding below an attribute, parameter or attribute-chain operator.
fn bind(m: &mut AxiomModel, reg: &OntologyRegistry, source: Endpoint, spec: &BindingSpec, base: &str) -> Result<OpOutcome> {
    let g = gate(m, &source)?;
    let (required, param) = match &g {
        Gate::Attr(c) => (c.clone(), false),
        Gate::Param(c) => (c.clone(), true),
        Gate::Root => return err(ErrorCode::NotAllowed, "typed bindings need an attribute chain"),
    };
    if param && !matches!(spec, BindingSpec::NewVarDefaultType | BindingSpec::ExistingVariable { .. }) {
        return err(ErrorCode::NotAllowed, "parameters bind variables only");
    }
    match spec {
        BindingSpec::NewVarDefaultType => {
            let t = default_type(reg, &required)?;
            let name = gen_variable_name(m, base);
            let v = new_variable(m, reg, &t, name);
            Ok(connect(m, source, v))
        }
        BindingSpec::NewVarOfConcept { concept } => {
            concept_ok(reg, concept)?;
            compat(reg, concept, &required)?;
            let name = gen_variable_name(m, base);
            let v = new_variable(m, reg, concept, name);
            Ok(connect(m, source, v))
        }
        BindingSpec::ExistingVariable { node: n } => {
            variable(m, *n)?;
            admit(m, reg, &source, *n, None)?;
            Ok(connect(m, source, *n))
        }
        BindingSpec::InstanceFromOntology { instance } => {
            instance_compat(reg, instance, &required)?;
            let concept = reg.instance(instance).and_then(|i| i.member_of.first().cloned()).unwrap_or_else(Iri::universal);
            let n = m.add_node(NodeKind::InstanceRef { instance: instance.clone(), concept });
            Ok(connect(m, source, n))
        }
        BindingSpec::ExistingInstance { node: n } => {
            if !matches!(node(m, *n)?.kind, NodeKind::InstanceRef { .. }) {
                return err(ErrorCode::WrongKind, format!("{n} is not an instance"));
            }
            admit(m, reg, &source, *n, None)?;
            Ok(connect(m, source, *n))
        }
        BindingSpec::LiteralDefaultType { value } => {
            let t = default_type(reg, &required)?;
            check_literal(reg, &t, &required, value)?;
            let n = m.add_node(NodeKind::PrimitiveValue { datatype: t, value: value.clone() });
            Ok(connect(m, source, n))
        }
        BindingSpec::LiteralOfType { datatype, value } => {
            if reg.concept(datatype).is_none() {
                return err(ErrorCode::UnknownConcept, format!("unknown datatype {datatype}"));
            }
            check_literal(reg, datatype, &required, value)?;
            let n = m.add_node(NodeKind::PrimitiveValue { datatype: datatype.clone(), value: value.clone() });
            Ok(connect(m, source, n))
        }
    }
}

fn add_operand(m: &mut AxiomModel, reg: &OntologyRegistry, op: NodeId, spec: &OperandSpec) -> Result<OpOutcome> {
    let kind = operator(m, op)?;
    let source = Endpoint::Operator { node: op };
    if kind == OperatorKind::Not && !m.operands(op).is_empty() {
        return err(ErrorCode::NotArity, "NOT takes exactly one operand");
    }
    let (_, origin) =
        m.operator_chain(op).ok_or_else(|| EngineError::new(ErrorCode::UnknownChain, "operator has no incoming connection"))?;
    if origin != Endpoint::Root {
        let Some(b) = spec.as_binding() else {
            return err(ErrorCode::NotAllowed, "attribute chains take values of the attribute type");
        };
        let base = match &origin {
            Endpoint::Attribute { node: n, attr } => {
                m.node(*n).and_then(|v| v.slot(attr)).and_then(|s| s.bound_var_name.clone()).unwrap_or_else(|| attr.clone())
            }
            _ => "x".into(),
        };
        return bind(m, reg, source, &b, &base);
    }
    match spec {
        OperandSpec::NewVarOfConcept { concept } => {
            concept_ok(reg, concept)?;
            let name = gen_variable_name(m, concept.local_name());
            let v = new_variable(m, reg, concept, name);
            Ok(connect(m, source, v))
        }
        OperandSpec::ExistingVariable { node: n } => {
            variable(m, *n)?;
            admit(m, reg, &source, *n, None)?;
            Ok(connect(m, source, *n))
        }
        OperandSpec::NewRelation { relation } => {
            let r = create_relation(m, reg, relation)?;
            Ok(connect(m, source, r))
        }
        OperandSpec::NewOperator { operator: k } => {
            let o = m.add_node(NodeKind::Operator { operator: *k });
            Ok(connect(m, source, o))
        }
        _ => err(ErrorCode::NotAllowed, "typed bindings need an attribute chain"),
    }
}

fn create_relation(m: &mut AxiomModel, reg: &OntologyRegistry, relation: &Iri) -> Result<NodeId> {
    let def = reg
        .relation(relation)
        .ok_or_else(|| EngineError::new(ErrorCode::UnknownRelation, format!("unknown relation {relation}")))?;
    let params = def.parameters.iter().map(|p| ParameterSlot { param: p.clone() }).collect();
    Ok(m.add_node(NodeKind::RelationUse { relation: relation.clone(), params }))
}

fn require_advanced(mode: EditMode) -> Result<()> {
    match mode {
        EditMode::Advanced => Ok(()),
        EditMode::Standard => err(ErrorCode::ModeError, "this operation needs advanced mode"),
    }
}

fn name_of_target(m: &AxiomModel, target: &NameTarget) -> Result<String> {
    let unbound = || EngineError::new(ErrorCode::Unbound, "nothing is bound here yet");
    match target {
        NameTarget::Node { node: n } => Ok(variable(m, *n)?.variable_name().unwrap_or_default().to_string()),
        NameTarget::Slot { node: n, attr } => {
            let ep = Endpoint::Attribute { node: *n, attr: attr.clone() };
            slot_constraints(m, &ep)?;
            m.node(*n).and_then(|v| v.slot(attr)).and_then(|s| s.bound_var_name.clone()).ok_or_else(unbound)
        }
        NameTarget::Param { node: n, index } => {
            let ep = Endpoint::Parameter { node: *n, index: *index };
            slot_constraints(m, &ep)?;
            let c = m.connection_from(&ep).ok_or_else(unbound)?;
            Ok(m.node(c.target).and_then(|v| v.variable_name()).unwrap_or_default().to_string())
        }
    }
}

fn insert_operator(
    m: &mut AxiomModel,
    reg: &OntologyRegistry,
    conn: ConnId,
    kind: OperatorKind,
    second: Option<&OperandSpec>,
) -> Result<OpOutcome> {
    let c = connection(m, conn)?.clone();
    if matches!(c.source, Endpoint::Parameter { .. }) {
        return err(ErrorCode::NotAllowed, "operators cannot be placed on a parameter binding");
    }
    let chain = m.chain_origin(conn);
    match kind {
        OperatorKind::Not => {
            if second.is_some() {
                return err(ErrorCode::NotArity, "NOT takes exactly one operand");
            }
        }
        OperatorKind::Or => match &chain {
            None => return err(ErrorCode::UnknownChain, "the connection hangs below an unconnected operator"),
            Some(Endpoint::Root) => {}
            Some(_) => {
                let t = node(m, c.target)?;
                let direct = matches!(c.source, Endpoint::Attribute { .. });
                let reach = m.reachable_from_root();
                let defining = m.defining_connection(c.target, &reach) == Some(conn);
                let target_ok = match t.kind {
                    NodeKind::Variable { .. } => defining,
                    NodeKind::InstanceRef { .. } => true,
                    _ => false,
                };
                if !direct || !target_ok {
                    return err(ErrorCode::NotAllowed, "OR below an attribute goes directly on its variable or instance binding");
                }
                if second.is_none() {
                    return err(ErrorCode::MissingOperand, "an alternative needs a second operand");
                }
            }
        },
        OperatorKind::And => match &chain {
            None => return err(ErrorCode::UnknownChain, "the connection hangs below an unconnected operator"),
            Some(Endpoint::Root) => {}
            Some(_) => return err(ErrorCode::NotAllowed, "AND cannot start from an attribute"),
        },
    }
    let op = m.add_node(NodeKind::Operator { operator: kind });
    m.add_connection(c.source.clone(), op);
    m.connections.get_mut(&conn).expect("checked").source = Endpoint::Operator { node: op };
    let mut out = match second {
        Some(s) => add_operand(m, reg, op, s)?,
        None => OpOutcome::default(),
    };
    out.operator = Some(op);
    Ok(out)
}

fn copy_variable(m: &mut AxiomModel, v: NodeId) -> Result<OpOutcome> {
    let orig = variable(m, v)?.clone();
    let reach = m.reachable_from_root();
    let def = m.defining_connection(v, &reach);
    if let Some(d) = def {
        if matches!(m.connections[&d].source, Endpoint::Parameter { .. }) {
            return err(ErrorCode::NotAllowed, "a parameter binding cannot take alternatives");
        }
    }
    let NodeKind::Variable { name, concept, slots } = orig.kind else { unreachable!() };
    let slots = slots.into_iter().map(|s| AttributeSlot { attr: s.attr, bound_var_name: None }).collect();
    let copy = m.add_node(NodeKind::Variable { name, concept, slots });
    let or = m.add_node(NodeKind::Operator { operator: OperatorKind::Or });
    match def {
        Some(d) => {
            let src = m.connections[&d].source.clone();
            m.add_connection(src, or);
            m.connections.get_mut(&d).expect("exists").source = Endpoint::Operator { node: or };
        }
        None => {
            m.add_connection(Endpoint::Operator { node: or }, v);
        }
    }
    let c = m.add_connection(Endpoint::Operator { node: or }, copy);
    Ok(OpOutcome { node: Some(copy), connection: Some(c), operator: Some(or) })
}

fn move_endpoint(m: &mut AxiomModel, reg: &OntologyRegistry, conn: ConnId, end: &MoveEnd) -> Result<OpOutcome> {
    let c = connection(m, conn)?.clone();
    let (source, target) = match end {
        MoveEnd::Source { endpoint } => (endpoint.clone(), c.target),
        MoveEnd::Target { node: n } => (c.source.clone(), *n),
    };
    if source == c.source && target == c.target {
        return err(ErrorCode::NotAllowed, "the connection already ends there");
    }
    m.remove_connection(conn);
    let checked = admit(m, reg, &source, target, None);
    m.connections.insert(conn, Connection { id: conn, source: c.source, target: c.target });
    checked?;
    let e = m.connections.get_mut(&conn).expect("reinserted");
    e.source = source;
    e.target = target;
    Ok(OpOutcome { node: Some(target), connection: Some(conn), operator: None })
}

fn refresh_slots(m: &mut AxiomModel, reg: &OntologyRegistry) {
    for n in m.nodes.values_mut() {
        let NodeKind::Variable { concept, slots, .. } = &mut n.kind else { continue };
        let Some(def) = reg.concept(concept) else { continue };
        let mut fresh: Vec<AttributeSlot> = def
            .effective_attributes
            .iter()
            .map(|e| AttributeSlot {
                attr: e.attr.clone(),
                bound_var_name: slots.iter().find(|s| s.attr.name == e.attr.name).and_then(|s| s.bound_var_name.clone()),
            })
            .collect();
        for old in slots.iter() {
            if !fresh.iter().any(|s| s.attr.name == old.attr.name) {
                fresh.push(old.clone());
            }
        }
        *slots = fresh;
    }
}

/// Applies one operation to `m`. On error `m` may be partially modified;
/// callers work on a copy ([`super::Editor::apply`] does).
pub fn apply_op(m: &mut AxiomModel, reg: &OntologyRegistry, mode: EditMode, op: &EditOp) -> Result<OpOutcome> {
    let out = match op {
        EditOp::CreateVariable { concept } => {
            concept_ok(reg, concept)?;
            let first = m.element_count() == 0;
            let name = gen_variable_name(m, concept.local_name());
            let v = new_variable(m, reg, concept, name);
            if first {
                connect(m, Endpoint::Root, v)
            } else {
                OpOutcome { node: Some(v), ..Default::default() }
            }
        }
        EditOp::CreateOperator { kind } => {
            OpOutcome { node: Some(m.add_node(NodeKind::Operator { operator: *kind })), ..Default::default() }
        }
        EditOp::CreateInstanceNode { instance } => {
            let def = reg
                .instance(instance)
                .ok_or_else(|| EngineError::new(ErrorCode::UnknownInstance, format!("unknown instance {instance}")))?;
            let concept = def.member_of.first().cloned().unwrap_or_else(Iri::universal);
            let n = m.add_node(NodeKind::InstanceRef { instance: instance.clone(), concept });
            OpOutcome { node: Some(n), ..Default::default() }
        }
        EditOp::CreateRelationNode { relation } => {
            OpOutcome { node: Some(create_relation(m, reg, relation)?), ..Default::default() }
        }
        EditOp::CreateConnection { source, target } => {
            require_advanced(mode)?;
            admit(m, reg, source, *target, None)?;
            connect(m, source.clone(), *target)
        }
        EditOp::RefineAttribute { node: n, attr, spec } => {
            let ep = Endpoint::Attribute { node: *n, attr: attr.clone() };
            check_source(m, &ep, None)?;
            bind(m, reg, ep, spec, attr)?
        }
        EditOp::BindParameter { node: n, index, spec } => {
            let ep = Endpoint::Parameter { node: *n, index: *index };
            check_source(m, &ep, None)?;
            if !matches!(spec, BindingSpec::NewVarDefaultType | BindingSpec::ExistingVariable { .. }) {
                return err(ErrorCode::NotAllowed, "parameters bind variables only");
            }
            let base = match m.node(*n).and_then(|r| r.param(*index)) {
                Some(p) => match &p.param.name {
                    Some(name) => name.clone(),
                    None => default_type(reg, &p.param.type_constraints)
                        .map(|t| t.local_name().to_string())
                        .unwrap_or_else(|_| "x".into()),
                },
                None => "x".into(),
            };
            bind(m, reg, ep, spec, &base)?
        }
        EditOp::RenameVariable { target, name } => {
            let old = name_of_target(m, target)?;
            if !is_valid_name(name) {
                return err(ErrorCode::BadName, format!("'{name}' is not a valid variable name"));
            }
            if *name != old {
                if m.name_index().contains_key(name) {
                    return err(ErrorCode::DuplicateName, format!("{name} is already used"));
                }
                rename_all(m, &old, name);
            }
            OpOutcome::default()
        }
        EditOp::CopyVariable { node: n } => copy_variable(m, *n)?,
        EditOp::DeleteNode { node: n } => {
            if *n == ROOT {
                return err(ErrorCode::CannotDeleteRoot, "the start node cannot be deleted");
            }
            node(m, *n)?;
            m.remove_node(*n);
            OpOutcome::default()
        }
        EditOp::InsertOperator { connection: c, kind, second } => insert_operator(m, reg, *c, *kind, second.as_ref())?,
        EditOp::AddOperand { node: n, operand } => add_operand(m, reg, *n, operand)?,
        EditOp::ChangeOperatorType { node: n, kind } => {
            operator(m, *n)?;
            if m.incoming(*n).next().is_some() || m.outgoing(*n).next().is_some() {
                return err(ErrorCode::HasConnections, "disconnect the operator before changing its type");
            }
            if let Some(NodeKind::Operator { operator }) = m.node_mut(*n).map(|x| &mut x.kind) {
                *operator = *kind;
            }
            OpOutcome::default()
        }
        EditOp::MoveEndpoint { connection: c, end } => {
            require_advanced(mode)?;
            move_endpoint(m, reg, *c, end)?
        }
        EditOp::DeleteConnection { connection: c } => {
            connection(m, *c)?;
            m.remove_connection(*c);
            OpOutcome::default()
        }
        EditOp::SetPrimitiveValue { node: n, value } => {
            let NodeKind::PrimitiveValue { datatype, .. } = &node(m, *n)?.kind else {
                return err(ErrorCode::WrongKind, format!("{n} is not a literal value"));
            };
            if !is_valid_literal(datatype, value) {
                return err(ErrorCode::BadLiteral, format!("'{value}' is not a valid {}", datatype.local_name()));
            }
            if let Some(NodeKind::PrimitiveValue { value: v, .. }) = m.node_mut(*n).map(|x| &mut x.kind) {
                *v = value.clone();
            }
            OpOutcome::default()
        }
        EditOp::SetLayout { node: n, x, y } => {
            node(m, *n)?;
            m.node_mut(*n).expect("checked").layout = Some(crate::graph::Layout { x: *x, y: *y });
            OpOutcome::default()
        }
        EditOp::RefreshSlots => {
            refresh_slots(m, reg);
            OpOutcome::default()
        }
    };
    normalize(m);
    Ok(out)
}
