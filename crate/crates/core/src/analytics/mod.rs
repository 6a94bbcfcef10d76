//! Energy baselines: outside temperature aligned with zone energy, fitted by
//! ordinary least squares or a three-parameter cooling change-point model.

mod fit;
mod zones;

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fit::{
    align, breakpoint_grid, fit_changepoint, fit_linear, AlignedSeries, BaselineFit, BaselineModel, MAX_GRID_POINTS,
};
pub use zones::{
    analyze_zones, fit_series, outside_temperature_point, residuals, zone_meters, zone_series, AnalysisOptions,
    BaselineReport, BucketResidual, ResidualSummary, ZoneAnalysis, DEFAULT_GRID, OUTSIDE_TEMPERATURE_QUERY,
    ZONE_METER_QUERY, ZONE_QUERY,
};

/// Floating-point scalar the fits run in: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Serialize + Send + Sync + 'static {}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", content = "detail")]
pub enum AnalyticsError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("zone has no energy meter point")]
    NoEnergyMeter,
    #[error("model has no outside-air temperature point")]
    NoOutsideTemperature,
    #[error("interval must be positive, got {0}")]
    InvalidInterval(i64),
    #[error("breakpoint grid step must be positive and yield at most {MAX_GRID_POINTS} candidates")]
    InvalidGrid,
    #[error("window start {start} is after end {end}")]
    InvertedRange { start: i64, end: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Linear,
    Changepoint,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Method::Linear),
            "changepoint" | "change-point" => Ok(Method::Changepoint),
            other => Err(format!("unknown method '{other}' (expected linear or changepoint)")),
        }
    }
}

impl Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Linear => "linear",
            Method::Changepoint => "changepoint",
        })
    }
}
