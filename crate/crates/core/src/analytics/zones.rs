use std::collections::BTreeMap;

use serde::Serialize;

use super::fit::{align, cast, fit_changepoint, fit_linear, AlignedSeries, BaselineFit};
use super::{AnalyticsError, Method, Scalar};
use crate::query::run_query;
use crate::rdf::{Graph, Term};
use crate::timeseries::{Sample, SeriesStore};

/// Every HVAC zone in the model.
pub const ZONE_QUERY: &str = "PREFIX brick: <https://brickschema.org/schema/Brick#>
SELECT ?zone WHERE { ?zone a brick:HVAC_Zone }";

/// Energy meter points attached to HVAC zones.
pub const ZONE_METER_QUERY: &str = "PREFIX brick: <https://brickschema.org/schema/Brick#>
SELECT ?zone ?meter WHERE {
  ?zone a brick:HVAC_Zone .
  ?zone brick:hasPoint ?meter .
  ?meter a brick:Energy_Sensor .
}";

/// Outside-air temperature points.
pub const OUTSIDE_TEMPERATURE_QUERY: &str = "PREFIX brick: <https://brickschema.org/schema/Brick#>
SELECT ?point WHERE { ?point a brick:Outside_Air_Temperature_Sensor }";

pub const DEFAULT_GRID: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub start: i64,
    pub end: i64,
    /// Bucket width in seconds.
    pub interval: i64,
    pub method: Method,
    /// Breakpoint step in °C for change-point fits.
    pub grid: f64,
}

impl AnalysisOptions {
    pub fn new(start: i64, end: i64, interval: i64, method: Method) -> Self {
        AnalysisOptions {
            start,
            end,
            interval,
            method,
            grid: DEFAULT_GRID,
        }
    }
}

/// Fits one aligned series with the chosen method.
pub fn fit_series<T: Scalar>(s: &AlignedSeries<T>, method: Method, grid: T) -> Result<BaselineFit<T>, AnalyticsError> {
    match method {
        Method::Linear => fit_linear(s),
        Method::Changepoint => fit_changepoint(s, grid),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketResidual<T> {
    pub start: i64,
    pub temperature: T,
    pub energy: T,
    pub fitted: T,
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualSummary<T> {
    pub mean: T,
    pub rms: T,
    pub max_abs: T,
    pub buckets: Vec<BucketResidual<T>>,
}

pub fn residuals<T: Scalar>(s: &AlignedSeries<T>, fit: &BaselineFit<T>) -> ResidualSummary<T> {
    let buckets: Vec<BucketResidual<T>> = s
        .pairs
        .iter()
        .zip(&s.buckets)
        .map(|(&(t, e), &start)| {
            let fitted = fit.predict(t);
            BucketResidual {
                start,
                temperature: t,
                energy: e,
                fitted,
                residual: e - fitted,
            }
        })
        .collect();
    let n: T = cast(buckets.len().max(1) as f64);
    let sum = buckets.iter().fold(T::zero(), |a, b| a + b.residual);
    let sq = buckets.iter().fold(T::zero(), |a, b| a + b.residual * b.residual);
    let max_abs = buckets.iter().fold(T::zero(), |a, b| a.max(b.residual.abs()));
    ResidualSummary {
        mean: sum / n,
        rms: (sq / n).sqrt(),
        max_abs,
        buckets,
    }
}

/// Result for one zone: the points it consumed and either a fit or the
/// reason there is none.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZoneAnalysis<T> {
    pub meters: Vec<String>,
    pub temperature_point: String,
    pub aligned_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<BaselineFit<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<ResidualSummary<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<AnalyticsError>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineReport<T> {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    pub start: i64,
    pub end: i64,
    pub interval: i64,
    pub method: Method,
    pub temperature_point: String,
    /// Keyed by zone IRI.
    pub zones: BTreeMap<String, ZoneAnalysis<T>>,
}

impl<T: Scalar> BaselineReport<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn fitted(&self) -> usize {
        self.zones.values().filter(|z| z.fit.is_some()).count()
    }
}

fn iri(t: &Term) -> String {
    t.as_iri().map(str::to_string).unwrap_or_else(|| t.to_string())
}

/// Zone IRIs mapped to their energy meter IRIs (possibly none).
pub fn zone_meters(model: &Graph) -> BTreeMap<String, Vec<String>> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for row in run_query(ZONE_QUERY, model).expect("fixed query").rows {
        out.entry(iri(&row[0])).or_default();
    }
    for row in run_query(ZONE_METER_QUERY, model).expect("fixed query").rows {
        out.entry(iri(&row[0])).or_default().push(iri(&row[1]));
    }
    out
}

/// First outside-air temperature point in IRI order.
pub fn outside_temperature_point(model: &Graph) -> Option<String> {
    run_query(OUTSIDE_TEMPERATURE_QUERY, model)
        .expect("fixed query")
        .rows
        .first()
        .map(|r| iri(&r[0]))
}

/// Aligns the zone's meters (summed) with the outside temperature over the window.
pub fn zone_series<T: Scalar>(
    store: &SeriesStore,
    temperature_point: &str,
    meters: &[String],
    opts: &AnalysisOptions,
) -> Result<AlignedSeries<T>, AnalyticsError> {
    let temp = store.stream_range(temperature_point, opts.start, opts.end);
    let energy: Vec<Sample> = meters
        .iter()
        .flat_map(|m| store.stream_range(m, opts.start, opts.end))
        .collect();
    align(&temp, &energy, opts.interval)
}

/// One fixed query selects the zones, their meters and the outside-air
/// temperature point; each zone is then aligned and fitted independently.
/// `model` should already be materialized.
pub fn analyze_zones<T: Scalar>(
    model: &Graph,
    store: &SeriesStore,
    opts: &AnalysisOptions,
) -> Result<BaselineReport<T>, AnalyticsError> {
    if opts.start > opts.end {
        return Err(AnalyticsError::InvertedRange {
            start: opts.start,
            end: opts.end,
        });
    }
    if opts.interval <= 0 {
        return Err(AnalyticsError::InvalidInterval(opts.interval));
    }
    let temperature_point = outside_temperature_point(model).ok_or(AnalyticsError::NoOutsideTemperature)?;
    let grid: T = cast(opts.grid);
    let zones = zone_meters(model)
        .into_iter()
        .map(|(zone, meters)| {
            let mut z = ZoneAnalysis {
                meters,
                temperature_point: temperature_point.clone(),
                aligned_points: 0,
                fit: None,
                residuals: None,
                error: None,
            };
            if z.meters.is_empty() {
                z.error = Some(AnalyticsError::NoEnergyMeter);
                return (zone, z);
            }
            let outcome = zone_series::<T>(store, &temperature_point, &z.meters, opts).and_then(|s| {
                z.aligned_points = s.count();
                fit_series(&s, opts.method, grid).map(|f| (residuals(&s, &f), f))
            });
            match outcome {
                Ok((r, f)) => {
                    z.fit = Some(f);
                    z.residuals = Some(r);
                }
                Err(e) => z.error = Some(e),
            }
            (zone, z)
        })
        .collect();
    Ok(BaselineReport {
        graph: model.name.clone(),
        start: opts.start,
        end: opts.end,
        interval: opts.interval,
        method: opts.method,
        temperature_point,
        zones,
    })
}
