//! JSON operation scripts: the replay format for fixtures and the CLI.
//!
//! A script is an array of records `{op, args, as, op_as, conn_as, step}`.
//! `op` is an edit operation name or one of `load_ontology`, `set_mode`,
//! `undo`, `redo`. Inside `args`, the keys `node`, `target` and
//! `connection` may hold a label given earlier through `as`/`op_as`/`conn_as`
//! (or a `?name` for a uniquely named variable) instead of a number, and
//! `concept`, `instance`, `relation`, `datatype` may hold a display name
//! such as `loc:location` instead of a full IRI.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::engine::{EditMode, EditOp, Editor, EngineError};
use crate::graph::{ConnId, NodeId};
use crate::iri::Iri;
use crate::ontology::{OntologyError, OntologyRegistry, OntologyWarehouse};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptRecord {
    pub op: String,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub args: Value,
    #[serde(default, rename = "as", skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op_as: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conn_as: Option<String>,
    /// Scenario step; records without one belong to the previous step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<u32>,
}

#[derive(Debug, Error)]
pub enum ScriptErrorKind {
    #[error("{0}")]
    Engine(#[from] EngineError),
    #[error("{0}")]
    Ontology(#[from] OntologyError),
    #[error("{0}")]
    BadRecord(String),
}

impl ScriptErrorKind {
    pub fn code(&self) -> String {
        match self {
            ScriptErrorKind::Engine(e) => e.code.to_string(),
            ScriptErrorKind::Ontology(e) => e.code().to_string(),
            ScriptErrorKind::BadRecord(_) => "BadRecord".to_string(),
        }
    }
}

#[derive(Debug, Error)]
#[error("record {index} (step {step}, {op}): {kind}")]
pub struct ScriptError {
    pub index: usize,
    pub step: u32,
    pub op: String,
    pub kind: ScriptErrorKind,
}

pub fn parse_script(text: &str) -> Result<Vec<ScriptRecord>, serde_json::Error> {
    serde_json::from_str(text)
}

/// The step each record belongs to.
pub fn record_steps(records: &[ScriptRecord]) -> Vec<u32> {
    let mut cur = 0;
    records
        .iter()
        .map(|r| {
            cur = r.step.unwrap_or(cur);
            cur
        })
        .collect()
}

/// Replays scripts against an editor and registry.
#[derive(Debug)]
pub struct Replay {
    pub editor: Editor,
    pub registry: OntologyRegistry,
    pub warehouse: Option<OntologyWarehouse>,
    base_dir: Option<PathBuf>,
    nodes: BTreeMap<String, NodeId>,
    connections: BTreeMap<String, ConnId>,
}

fn bad(msg: impl Into<String>) -> ScriptErrorKind {
    ScriptErrorKind::BadRecord(msg.into())
}

impl Replay {
    pub fn new(axiom_name: impl Into<String>, registry: OntologyRegistry, warehouse: Option<OntologyWarehouse>) -> Self {
        Replay {
            editor: Editor::new(axiom_name),
            registry,
            warehouse,
            base_dir: None,
            nodes: BTreeMap::new(),
            connections: BTreeMap::new(),
        }
    }

    /// Directory against which relative `load_ontology` paths resolve.
    pub fn with_base_dir(mut self, dir: impl AsRef<Path>) -> Self {
        self.base_dir = Some(dir.as_ref().to_path_buf());
        self
    }

    pub fn node_label(&self, label: &str) -> Option<NodeId> {
        self.nodes.get(label).copied()
    }

    pub fn connection_label(&self, label: &str) -> Option<ConnId> {
        self.connections.get(label).copied()
    }

    /// Runs every record whose step is at most `at_step` (all if `None`).
    pub fn run(&mut self, records: &[ScriptRecord], at_step: Option<u32>) -> Result<(), ScriptError> {
        for (index, (r, step)) in records.iter().zip(record_steps(records)).enumerate() {
            if at_step.is_some_and(|k| step > k) {
                break;
            }
            self.run_record(r).map_err(|kind| ScriptError { index, step, op: r.op.clone(), kind })?;
        }
        Ok(())
    }

    pub fn run_record(&mut self, r: &ScriptRecord) -> Result<(), ScriptErrorKind> {
        match r.op.as_str() {
            "load_ontology" => self.load(&r.args),
            "set_mode" => {
                let mode: EditMode = serde_json::from_value(r.args.get("mode").cloned().unwrap_or(Value::Null))
                    .map_err(|e| bad(format!("bad mode: {e}")))?;
                self.editor.set_mode(mode);
                Ok(())
            }
            "undo" => Ok(self.editor.undo()?),
            "redo" => Ok(self.editor.redo()?),
            _ => {
                let op = self.edit_op(r)?;
                let out = self.editor.apply(&self.registry, &op)?;
                if let (Some(l), Some(n)) = (&r.label, out.node) {
                    self.nodes.insert(l.clone(), n);
                }
                if let (Some(l), Some(n)) = (&r.op_as, out.operator) {
                    self.nodes.insert(l.clone(), n);
                }
                if let (Some(l), Some(c)) = (&r.conn_as, out.connection) {
                    self.connections.insert(l.clone(), c);
                }
                Ok(())
            }
        }
    }

    fn load(&mut self, args: &Value) -> Result<(), ScriptErrorKind> {
        if let Some(iri) = args.get("iri").and_then(Value::as_str) {
            let wh = self.warehouse.as_ref().ok_or_else(|| bad("no ontology warehouse configured"))?;
            self.registry.load_by_iri(wh, &Iri::new(iri))?;
        } else if let Some(path) = args.get("path").and_then(Value::as_str) {
            let p = match &self.base_dir {
                Some(d) => d.join(path),
                None => PathBuf::from(path),
            };
            self.registry.load_file(p)?;
        } else {
            return Err(bad("load_ontology needs `iri` or `path`"));
        }
        // variables created earlier pick up attributes that just became known
        self.editor.apply(&self.registry, &EditOp::RefreshSlots)?;
        Ok(())
    }

    /// Builds the typed operation, replacing labels and display names.
    pub fn edit_op(&self, r: &ScriptRecord) -> Result<EditOp, ScriptErrorKind> {
        let mut args = r.args.clone();
        self.rewrite(&mut args)?;
        let value = if args.is_null() { json!({ "op": r.op }) } else { json!({ "op": r.op, "args": args }) };
        serde_json::from_value(value).map_err(|e| bad(format!("bad arguments for {}: {e}", r.op)))
    }

    fn lookup_node(&self, s: &str) -> Result<NodeId, ScriptErrorKind> {
        if let Some(n) = self.nodes.get(s) {
            return Ok(*n);
        }
        if s.starts_with('?') {
            let hits: Vec<NodeId> =
                self.editor.model().variables().filter(|v| v.variable_name() == Some(s)).map(|v| v.id).collect();
            return match hits.as_slice() {
                [one] => Ok(*one),
                [] => Err(bad(format!("no variable named {s}"))),
                _ => Err(bad(format!("{s} names several variables; use a label"))),
            };
        }
        Err(bad(format!("unknown node label '{s}'")))
    }

    fn rewrite(&self, v: &mut Value) -> Result<(), ScriptErrorKind> {
        match v {
            Value::Object(map) => {
                for (k, val) in map.iter_mut() {
                    match (k.as_str(), &*val) {
                        ("node" | "target", Value::String(s)) => *val = json!(self.lookup_node(s)?.0),
                        ("connection", Value::String(s)) => {
                            let c = self.connections.get(s).ok_or_else(|| bad(format!("unknown connection label '{s}'")))?;
                            *val = json!(c.0);
                        }
                        ("concept" | "instance" | "relation" | "datatype", Value::String(s)) => {
                            let iri = self.registry.resolve_name(s).ok_or_else(|| bad(format!("cannot resolve '{s}'")))?;
                            *val = json!(iri.as_str());
                        }
                        _ => self.rewrite(val)?,
                    }
                }
            }
            Value::Array(xs) => {
                for x in xs {
                    self.rewrite(x)?;
                }
            }
            _ => {}
        }
        Ok(())
    }
}
