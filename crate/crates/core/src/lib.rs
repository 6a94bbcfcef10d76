//! Building metadata engine: a Brick-style ontology with a VRF module, an
//! indexed RDF store with a Turtle subset, a SPARQL basic-graph-pattern
//! engine, an embedded timeseries store and per-zone energy baselines.

pub mod analytics;
pub mod inference;
pub mod ontology;
pub mod query;
pub mod rdf;
pub mod timeseries;
pub mod vrf;

pub use analytics::Scalar;

pub type AlignedSeries = analytics::AlignedSeries<f64>;
pub type BaselineFit = analytics::BaselineFit<f64>;
pub type BaselineReport = analytics::BaselineReport<f64>;
pub type AlignedSeriesF32 = analytics::AlignedSeries<f32>;
pub type BaselineFitF32 = analytics::BaselineFit<f32>;
pub type BaselineReportF32 = analytics::BaselineReport<f32>;
