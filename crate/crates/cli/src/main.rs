use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use thiserror::Error;

use wsml_axiom::codegen::{
    build_expression, emit_capability, generate_axiom_text, namespace_preamble, AxiomNamer, CapabilitySkeleton,
    RenderOptions, DESCRIPTION,
};
use wsml_axiom::iri::Iri;
use wsml_axiom::ontology::tree::{registry_tree, render_tree};
use wsml_axiom::ontology::{OntologyError, OntologyRegistry, OntologyWarehouse};
use wsml_axiom::persist::PersistedAxiom;
use wsml_axiom::script::{parse_script, Replay};
use wsml_axiom::wsml::{parse_document, Item, NegFlavor, SectionKind};

#[derive(Parser)]
#[command(name = "wsml-axiom", version, about = "Ontology-driven WSML axiom construction")]
struct Cli {
    /// Ontology warehouse directory.
    #[arg(long, global = true, env = "AXIOM_WAREHOUSE")]
    warehouse: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse WSML files and report diagnostics as `file:line:col: message`.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the registry tree after loading ontologies (IRIs or file paths).
    Tree { sources: Vec<String> },
    /// Replay an operation script and print the generated axiom.
    Replay {
        script: Option<PathBuf>,
        /// Stop after the records of this step.
        #[arg(long)]
        at_step: Option<u32>,
        #[arg(long, value_enum, default_value_t = Negation::Not)]
        negation: Negation,
        /// Prepend the namespace declarations of the referenced ontologies.
        #[arg(long)]
        preamble: bool,
        /// Start from a persisted axiom instead of an empty one.
        #[arg(long)]
        restore: Option<PathBuf>,
        /// Write the final model as a persisted axiom.
        #[arg(long)]
        save: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Assemble a capability from section specs whose bodies come from scripts.
    ExportCapability {
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Negation {
    Not,
    Naf,
    Neg,
}

impl From<Negation> for RenderOptions {
    fn from(n: Negation) -> Self {
        let negation = match n {
            Negation::Not => NegFlavor::Not,
            Negation::Naf => NegFlavor::Naf,
            Negation::Neg => NegFlavor::Neg,
        };
        RenderOptions { negation }
    }
}

#[derive(Debug, Error)]
enum Failure {
    /// Bad invocation or unreadable input.
    #[error("{0}")]
    Usage(String),
    /// The input was read but the engine refused it.
    #[error("{0}")]
    Domain(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain(_) => 1,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_out(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn open_warehouse(dir: Option<&Path>) -> Result<Option<OntologyWarehouse>, Failure> {
    dir.map(|d| OntologyWarehouse::open(d).map_err(|e| Failure::Usage(e.to_string()))).transpose()
}

fn ontology_failure(e: OntologyError) -> Failure {
    Failure::Domain(format!("{}: {e}", e.code()))
}

fn validate(files: &[PathBuf]) -> Result<(), Failure> {
    let mut failed = 0;
    for f in files {
        let text = read(f)?;
        let shown = f.display();
        let doc = match parse_document(&text) {
            Ok(doc) => doc,
            Err(e) => {
                eprintln!("{shown}:{}: {}", e.pos, e.message);
                failed += 1;
                continue;
            }
        };
        if doc.items.iter().any(|i| matches!(i, Item::Ontology { .. })) {
            // semantic checks: inheritance cycles, foreign redeclarations
            if let Err(e) = OntologyRegistry::new().load_text(&text, Some(f)) {
                match e {
                    OntologyError::Parse { error, .. } => eprintln!("{shown}:{}: {}", error.pos, error.message),
                    other => eprintln!("{shown}: {other}"),
                }
                failed += 1;
                continue;
            }
        }
        eprintln!("{shown}: ok");
    }
    match failed {
        0 => Ok(()),
        n => Err(Failure::Domain(format!("{n} of {} files invalid", files.len()))),
    }
}

fn tree(warehouse: Option<&Path>, sources: &[String]) -> Result<(), Failure> {
    let wh = open_warehouse(warehouse)?;
    let mut reg = OntologyRegistry::new();
    for s in sources {
        if s.contains("://") {
            let wh = wh.as_ref().ok_or_else(|| Failure::Usage(format!("loading {s} needs --warehouse")))?;
            reg.load_by_iri(wh, &Iri::new(s.as_str())).map_err(ontology_failure)?;
        } else {
            let path = Path::new(s);
            if !path.is_file() {
                return Err(Failure::Usage(format!("{s}: no such file")));
            }
            reg.load_file(path).map_err(ontology_failure)?;
        }
    }
    print!("{}", render_tree(&registry_tree(&reg)));
    Ok(())
}

struct ReplayArgs<'a> {
    script: Option<&'a Path>,
    at_step: Option<u32>,
    restore: Option<&'a Path>,
}

/// Replays a script, optionally on top of a persisted axiom.
fn run_replay(warehouse: Option<&Path>, args: ReplayArgs<'_>) -> Result<(Replay, u64), Failure> {
    let wh = open_warehouse(warehouse)?;
    let mut replay = Replay::new("autoGeneratedAxiom_1", OntologyRegistry::new(), wh);
    let mut namer = AxiomNamer::resume(1);
    if let Some(path) = args.restore {
        let doc = PersistedAxiom::from_json(&read(path)?).map_err(|e| Failure::Domain(format!("{}: {e}", e.code())))?;
        replay.editor = doc
            .restore(&mut replay.registry, replay.warehouse.as_ref())
            .map_err(|e| Failure::Domain(format!("{}: {e}", e.code())))?;
        namer = AxiomNamer::resume(doc.counter);
        namer.observe(&doc.axiom_name);
    }
    match args.script {
        Some(path) => {
            let records = parse_script(&read(path)?)
                .map_err(|e| Failure::Domain(format!("{}: malformed script: {e}", path.display())))?;
            if let Some(dir) = path.parent() {
                replay = replay.with_base_dir(dir);
            }
            replay.run(&records, args.at_step).map_err(|e| Failure::Domain(format!("{}: {e}", e.kind.code())))?;
        }
        None if args.restore.is_none() => return Err(Failure::Usage("give a script, --restore, or both".into())),
        None => {}
    }
    Ok((replay, namer.counter()))
}

#[derive(Deserialize)]
struct CapabilitySpec {
    #[serde(default)]
    shared_variables: Vec<String>,
    #[serde(default)]
    sections: Vec<SectionSpec>,
}

#[derive(Deserialize)]
struct SectionSpec {
    kind: SectionKind,
    description: Option<String>,
    /// Script whose final axiom becomes the section body; relative to the spec.
    script: PathBuf,
    at_step: Option<u32>,
}

fn export_capability(warehouse: Option<&Path>, spec_path: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let spec: CapabilitySpec = serde_json::from_str(&read(spec_path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", spec_path.display())))?;
    if spec.sections.is_empty() {
        return Err(Failure::Usage(format!("{}: no sections", spec_path.display())));
    }
    let base = spec_path.parent().unwrap_or(Path::new("."));
    let mut skeletons = Vec::new();
    for s in &spec.sections {
        let script = base.join(&s.script);
        let (replay, _) =
            run_replay(warehouse, ReplayArgs { script: Some(&script), at_step: s.at_step, restore: None })?;
        skeletons.push(CapabilitySkeleton {
            kind: s.kind,
            description: Some(s.description.clone().unwrap_or_else(|| DESCRIPTION.to_string())),
            body: build_expression(replay.editor.model(), &replay.registry, RenderOptions::default()),
        });
    }
    let text = emit_capability(&spec.shared_variables, &skeletons).map_err(|e| Failure::Usage(e.to_string()))?;
    write_out(output, &text)
}

fn serve(warehouse: Option<&Path>, listen: SocketAddr) -> Result<(), Failure> {
    let wh = open_warehouse(warehouse)?;
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Domain(e.to_string()))?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(listen)
            .await
            .map_err(|e| Failure::Domain(format!("cannot listen on {listen}: {e}")))?;
        let addr = listener.local_addr().map_err(|e| Failure::Domain(e.to_string()))?;
        eprintln!("listening on {addr}");
        let app = wsml_axiom_service::router(wsml_axiom_service::AppState::new(OntologyRegistry::new(), wh));
        axum::serve(listener, app)
            .with_graceful_shutdown(shutdown_signal())
            .await
            .map_err(|e| Failure::Domain(e.to_string()))?;
        eprintln!("shut down");
        Ok(())
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let warehouse = cli.warehouse.as_deref();
    match cli.command {
        Command::Validate { files } => validate(&files),
        Command::Tree { sources } => tree(warehouse, &sources),
        Command::Replay { script, at_step, negation, preamble, restore, save, output } => {
            let (replay, counter) = run_replay(
                warehouse,
                ReplayArgs { script: script.as_deref(), at_step, restore: restore.as_deref() },
            )?;
            let model = replay.editor.model();
            let mut text = generate_axiom_text(model, &replay.registry, negation.into());
            if preamble {
                text = namespace_preamble(model, &replay.registry) + &text;
            }
            if let Some(p) = save {
                let doc = PersistedAxiom::capture(&replay.editor, &replay.registry, counter);
                std::fs::write(&p, doc.to_json()).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            }
            write_out(output.as_deref(), &text)
        }
        Command::ExportCapability { spec, output } => export_capability(warehouse, &spec, output.as_deref()),
        Command::Serve { listen } => serve(warehouse, listen),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
