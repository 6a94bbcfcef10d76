//! Request handling independent of the transport, shared by the HTTP routes
//! and the CLI so both produce identical bodies.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use brickvrf::analytics::{analyze_zones, AnalysisOptions, AnalyticsError, Method, DEFAULT_GRID};
use brickvrf::inference::{InversePairTable, MaterializeOptions, MaterializeReport, Reasoner};
use brickvrf::ontology::{compile_ontology, default_ontology, load_definitions, ClassGraph};
use brickvrf::query::{evaluate, parse_query, results_to_json, GraphResolver, QueryError};
use brickvrf::rdf::{
    default_namespaces, parse_turtle, parse_turtle_document, serialize_turtle, Graph, ParseWarning, RdfError,
};
use brickvrf::timeseries::{parse_rows, parse_timestamp, IngestReport, Sample, SampleError, SeriesStore};
use brickvrf::BaselineReport;
use percent_encoding::{percent_decode_str, utf8_percent_encode, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Debug, Clone, Default)]
pub struct Config {
    pub port: u16,
    /// Persistence root; nothing is written when absent.
    pub data_dir: Option<PathBuf>,
    /// Class definitions (`.json`) or a compiled ontology (Turtle). The
    /// bundled core and VRF classes are used when absent.
    pub ontology_path: Option<PathBuf>,
    pub ui_dir: Option<PathBuf>,
    /// Uploads whose count of unresolved rdf:type classes exceeds this are
    /// rejected with 422.
    pub max_unresolved: Option<usize>,
}

/// Error body `{"error": kind, "message": ..., "line"?, "column"?}` with an
/// HTTP status.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    #[serde(rename = "error")]
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl ApiError {
    pub fn new(status: u16, kind: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            kind: kind.to_string(),
            message: message.into(),
            line: None,
            column: None,
        }
    }

    fn at(mut self, line: usize, column: usize) -> Self {
        self.line = Some(line);
        self.column = Some(column);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error bodies serialize")
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<RdfError> for ApiError {
    fn from(e: RdfError) -> Self {
        let kind = match e {
            RdfError::UndeclaredPrefix { .. } | RdfError::UnknownPrefix(_) => "UnknownPrefix",
            _ => "Syntax",
        };
        let err = ApiError::new(400, kind, e.to_string());
        match e.position() {
            Some((l, c)) => err.at(l, c),
            None => err,
        }
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        let message = e.to_string();
        match e {
            QueryError::Syntax { line, column, .. } => ApiError::new(400, "Syntax", message).at(line, column),
            QueryError::UnknownPrefix { line, column, .. } => {
                ApiError::new(400, "UnknownPrefix", message).at(line, column)
            }
            QueryError::UnboundProjection(_) => ApiError::new(400, "UnboundProjection", message),
            QueryError::UnsupportedFeature(f) => ApiError::new(400, "UnsupportedFeature", f),
            QueryError::UnknownGraph(_) => ApiError::new(404, "UnknownGraph", message),
        }
    }
}

impl From<AnalyticsError> for ApiError {
    fn from(e: AnalyticsError) -> Self {
        let message = e.to_string();
        match e {
            AnalyticsError::NoOutsideTemperature => ApiError::new(422, "NoOutsideTemperature", message),
            AnalyticsError::InvalidInterval(_) => ApiError::new(400, "InvalidInterval", message),
            AnalyticsError::InvalidGrid => ApiError::new(400, "InvalidGrid", message),
            AnalyticsError::InvertedRange { .. } => ApiError::new(400, "InvertedRange", message),
            AnalyticsError::DegenerateInput(_) => ApiError::new(422, "DegenerateInput", message),
            AnalyticsError::NoEnergyMeter => ApiError::new(422, "NoEnergyMeter", message),
        }
    }
}

fn internal(e: impl std::fmt::Display) -> ApiError {
    ApiError::new(500, "Internal", e.to_string())
}

/// A stored model: the uploaded triples and their materialized fixpoint.
#[derive(Debug)]
pub struct ModelEntry {
    pub raw: Graph,
    pub materialized: Graph,
    pub report: MaterializeReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct UploadResponse {
    pub graph: String,
    pub triples: usize,
    pub entailed: usize,
    pub warnings: Vec<String>,
    pub unresolved_classes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphInfo {
    pub graph: String,
    pub triples: usize,
    pub entailed: usize,
}

/// Models visible to one query: a copy of the map of `Arc`s taken under the
/// lock, so a concurrent upload swaps in after the query or not at all.
struct Snapshot {
    models: BTreeMap<String, Arc<ModelEntry>>,
    default: Option<String>,
    empty: Graph,
}

impl GraphResolver for Snapshot {
    fn resolve(&self, iri: Option<&str>) -> Option<&Graph> {
        match iri.or(self.default.as_deref()) {
            None => Some(&self.empty),
            Some(i) => self.models.get(i).map(|m| &m.materialized),
        }
    }
}

/// A timestamp given as epoch seconds or an RFC 3339 string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TimeArg {
    Seconds(i64),
    Text(String),
}

impl TimeArg {
    pub fn resolve(&self) -> Result<i64, ApiError> {
        let raw = match self {
            TimeArg::Seconds(s) => s.to_string(),
            TimeArg::Text(t) => t.clone(),
        };
        parse_timestamp(&raw).map_err(|e| ApiError::new(400, "MalformedTimestamp", e.to_string()))
    }
}

pub const DEFAULT_INTERVAL: i64 = 3600;

#[derive(Debug, Clone, Deserialize)]
pub struct BaselineRequest {
    pub graph: String,
    #[serde(default)]
    pub start: Option<TimeArg>,
    #[serde(default)]
    pub end: Option<TimeArg>,
    /// `[start, end]`, an alternative to the separate fields.
    #[serde(default)]
    pub window: Option<(TimeArg, TimeArg)>,
    #[serde(default)]
    pub interval: Option<i64>,
    #[serde(default)]
    pub method: Option<Method>,
    #[serde(default)]
    pub grid: Option<f64>,
}

impl BaselineRequest {
    pub fn options(&self) -> Result<AnalysisOptions, ApiError> {
        let (start, end) = match (&self.window, &self.start, &self.end) {
            (Some((a, b)), _, _) => (a.resolve()?, b.resolve()?),
            (None, Some(a), Some(b)) => (a.resolve()?, b.resolve()?),
            _ => return Err(ApiError::new(400, "BadRequest", "a window (start and end) is required")),
        };
        Ok(AnalysisOptions {
            start,
            end,
            interval: self.interval.unwrap_or(DEFAULT_INTERVAL),
            method: self.method.unwrap_or(Method::Linear),
            grid: self.grid.unwrap_or(DEFAULT_GRID),
        })
    }
}

#[derive(Serialize)]
struct SeriesPoint {
    t: i64,
    v: f64,
}

#[derive(Serialize)]
struct SeriesBody {
    id: String,
    samples: Vec<SeriesPoint>,
}

pub fn graph_file_name(iri: &str) -> String {
    format!("{}.ttl", utf8_percent_encode(iri, NON_ALPHANUMERIC))
}

fn graph_from_file_name(name: &str) -> Option<String> {
    let stem = name.strip_suffix(".ttl")?;
    percent_decode_str(stem).decode_utf8().ok().map(|s| s.into_owned())
}

/// Loads the ontology and the inverse pairs to reason with.
pub fn load_ontology(path: Option<&Path>) -> Result<(ClassGraph, InversePairTable), String> {
    let Some(path) = path else {
        return Ok((default_ontology(), InversePairTable::default()));
    };
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        let set = load_definitions(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let ontology = compile_ontology(&set.classes).map_err(|e| format!("{}: {e}", path.display()))?;
        Ok((ontology, InversePairTable::with_local_pairs(&set.inverses)))
    } else {
        let g = parse_turtle(&text, &default_namespaces()).map_err(|e| format!("{}: {e}", path.display()))?;
        Ok((ClassGraph::from_graph(g), InversePairTable::default()))
    }
}

pub struct Service {
    config: Config,
    ontology: ClassGraph,
    reasoner: Reasoner,
    models: RwLock<BTreeMap<String, Arc<ModelEntry>>>,
    model_writer: Mutex<()>,
    series: RwLock<SeriesStore>,
}

impl Service {
    /// Loads the ontology and whatever the data directory already holds.
    pub fn open(config: Config) -> Result<Self, String> {
        let (ontology, pairs) = load_ontology(config.ontology_path.as_deref())?;
        let reasoner = Reasoner::new(&ontology).map_err(|e| e.to_string())?.with_pairs(pairs);
        let service = Service {
            config,
            ontology,
            reasoner,
            models: RwLock::new(BTreeMap::new()),
            model_writer: Mutex::new(()),
            series: RwLock::new(SeriesStore::new()),
        };
        service.restore()?;
        Ok(service)
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn ontology(&self) -> &ClassGraph {
        &self.ontology
    }

    pub fn reasoner(&self) -> &Reasoner {
        &self.reasoner
    }

    fn graphs_dir(&self) -> Option<PathBuf> {
        self.config.data_dir.as_ref().map(|d| d.join("graphs"))
    }

    fn series_path(&self) -> Option<PathBuf> {
        self.config.data_dir.as_ref().map(|d| d.join("series.ndjson"))
    }

    fn restore(&self) -> Result<(), String> {
        if let Some(dir) = self.graphs_dir() {
            if dir.is_dir() {
                let mut entries: Vec<_> = fs::read_dir(&dir)
                    .map_err(|e| format!("{}: {e}", dir.display()))?
                    .filter_map(Result::ok)
                    .collect();
                entries.sort_by_key(|e| e.file_name());
                let mut models = self.models.write().expect("model lock");
                for entry in entries {
                    let name = entry.file_name().to_string_lossy().into_owned();
                    let Some(iri) = graph_from_file_name(&name) else {
                        continue;
                    };
                    let text = fs::read_to_string(entry.path()).map_err(|e| format!("{name}: {e}"))?;
                    let doc =
                        parse_turtle_document(&text, &default_namespaces()).map_err(|e| format!("{name}: {e}"))?;
                    models.insert(iri.clone(), Arc::new(self.build_entry(&iri, doc.graph)));
                }
            }
        }
        if let Some(path) = self.series_path() {
            if path.exists() {
                let store = SeriesStore::load(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                *self.series.write().expect("series lock") = store;
            }
        }
        Ok(())
    }

    fn build_entry(&self, iri: &str, mut raw: Graph) -> ModelEntry {
        raw.name = Some(iri.to_string());
        let m = self.reasoner.materialize(&raw, MaterializeOptions::default());
        ModelEntry {
            raw,
            materialized: m.graph,
            report: m.report,
        }
    }

    /// Parses and materializes outside any lock, then persists and swaps the
    /// named graph in one step.
    pub fn upload_model(&self, graph: &str, turtle: &str) -> Result<UploadResponse, ApiError> {
        if graph.trim().is_empty() {
            return Err(ApiError::new(400, "BadRequest", "the graph parameter is required"));
        }
        let doc = parse_turtle_document(turtle, &default_namespaces())?;
        let entry = self.build_entry(graph, doc.graph);
        let unresolved: Vec<String> = entry.report.unresolved_classes.iter().cloned().collect();
        if let Some(limit) = self.config.max_unresolved {
            if unresolved.len() > limit {
                return Err(ApiError::new(
                    422,
                    "UnresolvedClasses",
                    format!(
                        "{} classes do not resolve in the ontology (limit {limit}): {}",
                        unresolved.len(),
                        unresolved.join(", ")
                    ),
                ));
            }
        }
        let response = UploadResponse {
            graph: graph.to_string(),
            triples: entry.raw.len(),
            entailed: entry.materialized.len(),
            warnings: doc.warnings.iter().map(ParseWarning::to_string).collect(),
            unresolved_classes: unresolved,
        };
        let _writer = self.model_writer.lock().expect("writer lock");
        if let Some(dir) = self.graphs_dir() {
            write_atomically(
                &dir.join(graph_file_name(graph)),
                serialize_turtle(&entry.raw).as_bytes(),
            )
            .map_err(internal)?;
        }
        self.models
            .write()
            .expect("model lock")
            .insert(graph.to_string(), Arc::new(entry));
        Ok(response)
    }

    pub fn model(&self, graph: &str) -> Option<Arc<ModelEntry>> {
        self.models.read().expect("model lock").get(graph).cloned()
    }

    pub fn graphs(&self) -> Vec<GraphInfo> {
        self.models
            .read()
            .expect("model lock")
            .iter()
            .map(|(g, m)| GraphInfo {
                graph: g.clone(),
                triples: m.raw.len(),
                entailed: m.materialized.len(),
            })
            .collect()
    }

    /// SPARQL-JSON for `text`. `default_graph` answers patterns outside any
    /// `FROM`; without it the default graph is empty.
    pub fn query(&self, text: &str, default_graph: Option<&str>) -> Result<String, ApiError> {
        let ast = parse_query(text)?;
        let snapshot = Snapshot {
            models: self.models.read().expect("model lock").clone(),
            default: default_graph.filter(|g| !g.is_empty()).map(str::to_string),
            empty: Graph::new(),
        };
        if let Some(g) = &snapshot.default {
            if !snapshot.models.contains_key(g) {
                return Err(QueryError::UnknownGraph(g.clone()).into());
            }
        }
        Ok(results_to_json(&evaluate(&ast, &snapshot)?))
    }

    /// Ingests CSV or NDJSON rows and persists the store.
    pub fn ingest(&self, body: &str) -> Result<IngestReport, ApiError> {
        self.ingest_rows(parse_rows(body))
    }

    pub fn ingest_samples(&self, samples: Vec<Sample>) -> Result<IngestReport, ApiError> {
        self.ingest_rows(samples.into_iter().map(Ok))
    }

    fn ingest_rows<I>(&self, rows: I) -> Result<IngestReport, ApiError>
    where
        I: IntoIterator<Item = Result<Sample, SampleError>>,
    {
        let mut store = self.series.write().expect("series lock");
        let report = store.ingest_parsed(rows);
        if report.accepted > 0 {
            if let Some(path) = self.series_path() {
                if let Some(parent) = path.parent() {
                    fs::create_dir_all(parent).map_err(internal)?;
                }
                store.persist(&path).map_err(internal)?;
            }
        }
        Ok(report)
    }

    pub fn series_range(&self, ids: &[String], start: i64, end: i64) -> Result<Vec<(String, Vec<Sample>)>, ApiError> {
        self.series
            .read()
            .expect("series lock")
            .range(ids, start, end)
            .map_err(|e| ApiError::new(400, "InvertedRange", e.to_string()))
    }

    /// `[{"id": ..., "samples": [{"t": .., "v": ..}, ...]}, ...]`.
    pub fn series_json(&self, ids: &[String], start: i64, end: i64) -> Result<String, ApiError> {
        let body: Vec<SeriesBody> = self
            .series_range(ids, start, end)?
            .into_iter()
            .map(|(id, samples)| SeriesBody {
                id,
                samples: samples
                    .into_iter()
                    .map(|s| SeriesPoint {
                        t: s.timestamp,
                        v: s.value,
                    })
                    .collect(),
            })
            .collect();
        Ok(serde_json::to_string(&body).expect("series bodies serialize"))
    }

    pub fn baseline_report(&self, req: &BaselineRequest) -> Result<BaselineReport, ApiError> {
        let opts = req.options()?;
        let model = self
            .model(&req.graph)
            .ok_or_else(|| ApiError::from(QueryError::UnknownGraph(req.graph.clone())))?;
        let store = self.series.read().expect("series lock");
        Ok(analyze_zones(&model.materialized, &store, &opts)?)
    }

    pub fn baseline(&self, req: &BaselineRequest) -> Result<String, ApiError> {
        self.baseline_report(req).map(|r| r.to_json())
    }

    pub fn health(&self) -> String {
        let models = self.models.read().expect("model lock");
        let series = self.series.read().expect("series lock");
        json!({
            "status": "ok",
            "service": "brickvrf",
            "version": env!("CARGO_PKG_VERSION"),
            "ontology_classes": self.ontology.classes().len(),
            "graphs": models.len(),
            "triples": models.values().map(|m| m.raw.len()).sum::<usize>(),
            "streams": series.stream_count(),
            "samples": series.sample_count(),
        })
        .to_string()
    }
}

fn write_atomically(path: &Path, bytes: &[u8]) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("ttl.tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}
