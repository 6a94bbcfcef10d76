//! HTTP service and command-line front end: model upload, semantic query,
//! timeseries ingestion and per-zone baseline analysis.

pub mod cli;
pub mod http;
pub mod service;

pub use http::router;
pub use service::{ApiError, BaselineRequest, Config, Service};
