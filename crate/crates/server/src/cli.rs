use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use brickvrf::analytics::Method;
use brickvrf::inference::MaterializeOptions;
use brickvrf::ontology::validate_ontology;
use brickvrf::query::{results_to_json, run_query, GraphResolver};
use brickvrf::rdf::{default_namespaces, parse_turtle_document, serialize_turtle, Graph};
use brickvrf::vrf::{generate_application_model, generate_validation_model, ModelParams, VALIDATION_GRAPH};
use clap::{Args, Parser, Subcommand};

use crate::service::{load_ontology, ApiError, BaselineRequest, Config, Service, TimeArg, DEFAULT_INTERVAL};

#[derive(Debug, Parser)]
#[command(
    name = "brickvrf",
    version,
    about = "Building metadata engine with a VRF ontology module"
)]
pub struct Cli {
    /// Directory holding persisted graphs and series.
    #[arg(long, global = true, env = "DATA_DIR")]
    pub data_dir: Option<PathBuf>,
    /// Class definitions (.json) or compiled ontology (.ttl) replacing the bundled one.
    #[arg(long, global = true, env = "ONTOLOGY_PATH")]
    pub ontology: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile the ontology to Turtle and validate it.
    Compile {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Materialize a model against the ontology.
    Infer {
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the validation or application model.
    GenModel(GenModel),
    /// Ingest CSV or NDJSON sample files into the data directory.
    Ingest {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Run a query file (`-` for stdin) against stored graphs or a model file.
    Query {
        query: PathBuf,
        /// Graph answering patterns outside any FROM clause.
        #[arg(long, conflicts_with = "model")]
        graph: Option<String>,
        /// Query this Turtle file (materialized) instead of the data directory;
        /// it answers every graph the query names.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Per-zone energy baselines over a stored graph and series.
    Baseline {
        #[arg(long)]
        graph: String,
        /// Window start: epoch seconds or RFC 3339.
        #[arg(long)]
        from: String,
        /// Window end: epoch seconds or RFC 3339.
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = DEFAULT_INTERVAL)]
        interval: i64,
        #[arg(long, default_value = "linear")]
        method: Method,
        /// Breakpoint step in °C for change-point fits.
        #[arg(long)]
        grid: Option<f64>,
    },
    /// Run the HTTP server.
    Serve {
        #[arg(long, env = "PORT", default_value_t = 8080)]
        port: u16,
        /// Static console assets served under /ui.
        #[arg(long, env = "UI_DIR")]
        ui_dir: Option<PathBuf>,
        /// Reject uploads with more unresolved classes than this.
        #[arg(long)]
        max_unresolved: Option<usize>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "kind")]
pub struct GenModelKind {
    #[arg(long)]
    pub validation: bool,
    #[arg(long)]
    pub application: bool,
}

#[derive(Debug, Args)]
pub struct GenModel {
    #[command(flatten)]
    pub kind: GenModelKind,
    #[arg(long, default_value_t = 1)]
    pub floors: usize,
    #[arg(long, default_value_t = 5)]
    pub offices: usize,
    #[arg(long, default_value_t = 10)]
    pub units: usize,
    #[arg(long, default_value_t = 1)]
    pub outdoor: usize,
    #[arg(long, default_value = VALIDATION_GRAPH)]
    pub graph: String,
    #[arg(long, default_value = "b66")]
    pub prefix: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A model file answers for the default graph and any named graph.
struct ModelFile(Graph);

impl GraphResolver for ModelFile {
    fn resolve(&self, _: Option<&str>) -> Option<&Graph> {
        Some(&self.0)
    }
}

/// A failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn data_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        data_error(e.to_json())
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| data_error(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| data_error(format!("{}: {e}", path.display())))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| data_error(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| {
                    if text.ends_with('\n') {
                        Ok(())
                    } else {
                        stdout.write_all(b"\n")
                    }
                })
                .map_err(|e| data_error(e.to_string()))
        }
    }
}

impl Cli {
    fn config(&self) -> Config {
        Config {
            port: 0,
            data_dir: self.data_dir.clone(),
            ontology_path: self.ontology.clone(),
            ui_dir: None,
            max_unresolved: None,
        }
    }

    fn service(&self, config: Config) -> Result<Service, Failure> {
        Service::open(config).map_err(data_error)
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Compile { out } => {
            let (ontology, _) = load_ontology(cli.ontology.as_deref()).map_err(data_error)?;
            let violations = validate_ontology(&ontology);
            write_output(out.as_deref(), &serialize_turtle(ontology.graph()))?;
            if !violations.is_empty() {
                let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                return Err(data_error(lines.join("\n")));
            }
            Ok(())
        }
        Command::Infer { model, out } => {
            let svc = cli.service(Config {
                data_dir: None,
                ..cli.config()
            })?;
            let doc = parse_turtle_document(&read_input(model)?, &default_namespaces())
                .map_err(|e| data_error(format!("{}: {e}", model.display())))?;
            for w in &doc.warnings {
                eprintln!("warning: {w}");
            }
            let m = svc.reasoner().materialize(&doc.graph, MaterializeOptions::default());
            eprintln!("{} triples, {} added by inference", doc.graph.len(), m.report.added);
            for c in &m.report.unresolved_classes {
                eprintln!("warning: unresolved class <{c}>");
            }
            write_output(out.as_deref(), &serialize_turtle(&m.graph))
        }
        Command::GenModel(g) => {
            let graph = if g.kind.application {
                generate_application_model()
            } else {
                generate_validation_model(&ModelParams {
                    floors: g.floors,
                    offices_per_floor: g.offices,
                    indoor_units_per_office: g.units,
                    outdoor_units_per_office: g.outdoor,
                    graph_iri: g.graph.clone(),
                    prefix: g.prefix.clone(),
                })
            };
            write_output(g.out.as_deref(), &serialize_turtle(&graph))
        }
        Command::Ingest { files } => {
            if cli.data_dir.is_none() {
                return Err(Failure {
                    code: 1,
                    message: "ingest needs --data-dir or DATA_DIR".into(),
                });
            }
            let svc = cli.service(cli.config())?;
            let mut rejected = 0;
            for f in files {
                let report = svc.ingest(&read_input(f)?)?;
                rejected += report.rejected;
                println!("{}", serde_json::to_string(&report).expect("serializable"));
            }
            if rejected > 0 {
                return Err(data_error(format!("{rejected} rows rejected")));
            }
            Ok(())
        }
        Command::Query { query, graph, model } => {
            let text = read_input(query)?;
            let body = match model {
                Some(path) => {
                    let svc = cli.service(Config {
                        data_dir: None,
                        ..cli.config()
                    })?;
                    let doc = parse_turtle_document(&read_input(path)?, &default_namespaces())
                        .map_err(|e| data_error(format!("{}: {e}", path.display())))?;
                    let g = svc
                        .reasoner()
                        .materialize(&doc.graph, MaterializeOptions::default())
                        .graph;
                    let table = run_query(&text, &ModelFile(g)).map_err(ApiError::from)?;
                    results_to_json(&table)
                }
                None => cli.service(cli.config())?.query(&text, graph.as_deref())?,
            };
            write_output(None, &body)
        }
        Command::Baseline {
            graph,
            from,
            to,
            interval,
            method,
            grid,
        } => {
            let svc = cli.service(cli.config())?;
            let req = BaselineRequest {
                graph: graph.clone(),
                start: Some(TimeArg::Text(from.clone())),
                end: Some(TimeArg::Text(to.clone())),
                window: None,
                interval: Some(*interval),
                method: Some(*method),
                grid: *grid,
            };
            write_output(None, &svc.baseline(&req)?)
        }
        Command::Serve {
            port,
            ui_dir,
            max_unresolved,
        } => {
            let svc = Arc::new(cli.service(Config {
                port: *port,
                ui_dir: ui_dir.clone(),
                max_unresolved: *max_unresolved,
                ..cli.config()
            })?);
            let runtime = tokio::runtime::Runtime::new().map_err(|e| data_error(e.to_string()))?;
            runtime
                .block_on(crate::http::serve(svc))
                .map_err(|e| data_error(format!("server: {e}")))
        }
    }
}

/// Parses arguments and runs: 0 on success, 1 on usage errors, 2 on data errors.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
