//! Semantically gated edit operations, undo/redo and menu candidates.

mod candidates;
mod command;
mod error;
pub mod literal;
mod naming;
mod ops;

use serde::{Deserialize, Serialize};

use crate::graph::{AxiomModel, ConnId, Endpoint, NodeId, OperatorKind};
use crate::iri::Iri;
use crate::ontology::OntologyRegistry;

pub use candidates::{candidates_for, Choice, Menu, MenuEntry, MenuOp, MenuTarget};
pub use command::Command;
pub use error::{EngineError, ErrorCode};
pub use naming::{gen_variable_name, is_valid_name};
pub use ops::{apply_op, default_type};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditMode {
    #[default]
    Standard,
    Advanced,
}

/// How an attribute or parameter gets its value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BindingSpec {
    NewVarDefaultType,
    NewVarOfConcept { concept: Iri },
    ExistingVariable { node: NodeId },
    InstanceFromOntology { instance: Iri },
    ExistingInstance { node: NodeId },
    LiteralDefaultType { value: String },
    LiteralOfType { datatype: Iri, value: String },
}

/// A new operand for an operator. Attribute chains take the binding
/// variants; root chains take concepts, free variables, relations and
/// operators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OperandSpec {
    NewVarDefaultType,
    NewVarOfConcept { concept: Iri },
    ExistingVariable { node: NodeId },
    InstanceFromOntology { instance: Iri },
    ExistingInstance { node: NodeId },
    LiteralDefaultType { value: String },
    LiteralOfType { datatype: Iri, value: String },
    NewRelation { relation: Iri },
    NewOperator { operator: OperatorKind },
}

impl From<BindingSpec> for OperandSpec {
    fn from(b: BindingSpec) -> Self {
        match b {
            BindingSpec::NewVarDefaultType => OperandSpec::NewVarDefaultType,
            BindingSpec::NewVarOfConcept { concept } => OperandSpec::NewVarOfConcept { concept },
            BindingSpec::ExistingVariable { node } => OperandSpec::ExistingVariable { node },
            BindingSpec::InstanceFromOntology { instance } => OperandSpec::InstanceFromOntology { instance },
            BindingSpec::ExistingInstance { node } => OperandSpec::ExistingInstance { node },
            BindingSpec::LiteralDefaultType { value } => OperandSpec::LiteralDefaultType { value },
            BindingSpec::LiteralOfType { datatype, value } => OperandSpec::LiteralOfType { datatype, value },
        }
    }
}

impl OperandSpec {
    pub fn as_binding(&self) -> Option<BindingSpec> {
        Some(match self.clone() {
            OperandSpec::NewVarDefaultType => BindingSpec::NewVarDefaultType,
            OperandSpec::NewVarOfConcept { concept } => BindingSpec::NewVarOfConcept { concept },
            OperandSpec::ExistingVariable { node } => BindingSpec::ExistingVariable { node },
            OperandSpec::InstanceFromOntology { instance } => BindingSpec::InstanceFromOntology { instance },
            OperandSpec::ExistingInstance { node } => BindingSpec::ExistingInstance { node },
            OperandSpec::LiteralDefaultType { value } => BindingSpec::LiteralDefaultType { value },
            OperandSpec::LiteralOfType { datatype, value } => BindingSpec::LiteralOfType { datatype, value },
            OperandSpec::NewRelation { .. } | OperandSpec::NewOperator { .. } => return None,
        })
    }
}

/// What a rename addresses: a variable, or the name shown on a bound
/// attribute or parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NameTarget {
    Node { node: NodeId },
    Slot { node: NodeId, attr: String },
    Param { node: NodeId, index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MoveEnd {
    Source { endpoint: Endpoint },
    Target { node: NodeId },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "args", rename_all = "snake_case")]
pub enum EditOp {
    CreateVariable { concept: Iri },
    CreateOperator { kind: OperatorKind },
    CreateInstanceNode { instance: Iri },
    CreateRelationNode { relation: Iri },
    CreateConnection { source: Endpoint, target: NodeId },
    RefineAttribute { node: NodeId, attr: String, spec: BindingSpec },
    BindParameter { node: NodeId, index: usize, spec: BindingSpec },
    RenameVariable { target: NameTarget, name: String },
    CopyVariable { node: NodeId },
    DeleteNode { node: NodeId },
    InsertOperator {
        connection: ConnId,
        kind: OperatorKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        second: Option<OperandSpec>,
    },
    AddOperand { node: NodeId, operand: OperandSpec },
    ChangeOperatorType { node: NodeId, kind: OperatorKind },
    MoveEndpoint { connection: ConnId, end: MoveEnd },
    DeleteConnection { connection: ConnId },
    SetPrimitiveValue { node: NodeId, value: String },
    SetLayout { node: NodeId, x: f64, y: f64 },
    /// Re-reads attribute lists after more ontologies were loaded.
    RefreshSlots,
}

impl EditOp {
    pub fn name(&self) -> &'static str {
        match self {
            EditOp::CreateVariable { .. } => "create_variable",
            EditOp::CreateOperator { .. } => "create_operator",
            EditOp::CreateInstanceNode { .. } => "create_instance_node",
            EditOp::CreateRelationNode { .. } => "create_relation_node",
            EditOp::CreateConnection { .. } => "create_connection",
            EditOp::RefineAttribute { .. } => "refine_attribute",
            EditOp::BindParameter { .. } => "bind_parameter",
            EditOp::RenameVariable { .. } => "rename_variable",
            EditOp::CopyVariable { .. } => "copy_variable",
            EditOp::DeleteNode { .. } => "delete_node",
            EditOp::InsertOperator { .. } => "insert_operator",
            EditOp::AddOperand { .. } => "add_operand",
            EditOp::ChangeOperatorType { .. } => "change_operator_type",
            EditOp::MoveEndpoint { .. } => "move_endpoint",
            EditOp::DeleteConnection { .. } => "delete_connection",
            EditOp::SetPrimitiveValue { .. } => "set_primitive_value",
            EditOp::SetLayout { .. } => "set_layout",
            EditOp::RefreshSlots => "refresh_slots",
        }
    }
}

/// Ids produced by an operation, if any. `operator` is set when an
/// operation also inserted an operator (insert and copy).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OpOutcome {
    pub node: Option<NodeId>,
    pub connection: Option<ConnId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<NodeId>,
}

/// A model plus its undo/redo history and editing mode.
#[derive(Debug, Clone)]
pub struct Editor {
    model: AxiomModel,
    undo: Vec<Command>,
    redo: Vec<Command>,
    pub mode: EditMode,
    revision: u64,
}

impl Editor {
    pub fn new(axiom_name: impl Into<String>) -> Self {
        Editor::from_model(AxiomModel::new(axiom_name))
    }

    pub fn from_model(model: AxiomModel) -> Self {
        Editor { model, undo: Vec::new(), redo: Vec::new(), mode: EditMode::Standard, revision: 0 }
    }

    pub fn model(&self) -> &AxiomModel {
        &self.model
    }

    /// Bumped by every change, including undo and redo.
    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn can_undo(&self) -> bool {
        !self.undo.is_empty()
    }

    pub fn can_redo(&self) -> bool {
        !self.redo.is_empty()
    }

    /// Applies `op` atomically: on error the model is unchanged.
    pub fn apply(&mut self, reg: &OntologyRegistry, op: &EditOp) -> Result<OpOutcome, EngineError> {
        let mut next = self.model.clone();
        let out = apply_op(&mut next, reg, self.mode, op)?;
        let cmd = Command::diff(op.name(), &self.model, &next);
        if !cmd.is_empty() {
            self.model = next;
            self.undo.push(cmd);
            self.redo.clear();
            self.revision += 1;
        }
        Ok(out)
    }

    pub fn undo(&mut self) -> Result<(), EngineError> {
        let cmd = self.undo.pop().ok_or_else(|| EngineError::new(ErrorCode::EmptyStack, "nothing to undo"))?;
        cmd.revert(&mut self.model);
        self.redo.push(cmd);
        self.revision += 1;
        Ok(())
    }

    pub fn redo(&mut self) -> Result<(), EngineError> {
        let cmd = self.redo.pop().ok_or_else(|| EngineError::new(ErrorCode::EmptyStack, "nothing to redo"))?;
        cmd.reapply(&mut self.model);
        self.undo.push(cmd);
        self.revision += 1;
        Ok(())
    }

    pub fn set_mode(&mut self, mode: EditMode) {
        if self.mode != mode {
            self.mode = mode;
            self.revision += 1;
        }
    }

    pub fn candidates(&self, reg: &OntologyRegistry, target: &MenuTarget) -> Menu {
        candidates_for(&self.model, reg, self.mode, target)
    }
}
