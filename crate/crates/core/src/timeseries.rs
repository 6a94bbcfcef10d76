//! Telemetry store keyed by point IRI. Rows arrive as `[id, time, value]`;
//! each stream keeps strictly increasing timestamps with last-write-wins.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One telemetry reading. Timestamps are UTC seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub stream_id: String,
    pub timestamp: i64,
    pub value: f64,
}

impl Sample {
    pub fn new(stream_id: impl Into<String>, timestamp: i64, value: f64) -> Self {
        Sample {
            stream_id: stream_id.into(),
            timestamp,
            value,
        }
    }

    pub fn validate(&self) -> Result<(), SampleError> {
        if self.stream_id.trim().is_empty() {
            return Err(SampleError::EmptyId);
        }
        if self.timestamp < 0 {
            return Err(SampleError::MalformedTimestamp(self.timestamp.to_string()));
        }
        if !self.value.is_finite() {
            return Err(SampleError::NonFiniteValue);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", content = "detail")]
pub enum SampleError {
    #[error("value is not finite")]
    NonFiniteValue,
    #[error("malformed timestamp '{0}'")]
    MalformedTimestamp(String),
    #[error("empty stream id")]
    EmptyId,
    #[error("malformed row: {0}")]
    MalformedRow(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowError {
    /// 1-based data row number (header lines not counted).
    pub row: usize,
    #[serde(flatten)]
    pub error: SampleError,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub accepted: usize,
    pub rejected: usize,
    pub errors: Vec<RowError>,
}

#[derive(Debug, Error)]
pub enum TimeseriesError {
    #[error("inverted range: start {t0} is after end {t1}")]
    InvertedRange { t0: i64, t1: i64 },
    #[error("corrupt series file at line {line}: {message}")]
    CorruptFile { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StreamInfo {
    pub count: usize,
    pub first: i64,
    pub last: i64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeriesStore {
    streams: BTreeMap<String, BTreeMap<i64, f64>>,
}

pub const FORMAT_NAME: &str = "brickvrf-series";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
}

#[derive(Serialize, Deserialize)]
struct Line<'a> {
    id: std::borrow::Cow<'a, str>,
    t: i64,
    v: f64,
}

impl SeriesStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Validates and stores each row; rejected rows leave the store untouched.
    pub fn ingest<I: IntoIterator<Item = Sample>>(&mut self, rows: I) -> IngestReport {
        self.ingest_parsed(rows.into_iter().map(Ok))
    }

    /// Like [`ingest`](Self::ingest) for rows that may already have failed to parse.
    pub fn ingest_parsed<I>(&mut self, rows: I) -> IngestReport
    where
        I: IntoIterator<Item = Result<Sample, SampleError>>,
    {
        let mut report = IngestReport::default();
        for (i, row) in rows.into_iter().enumerate() {
            match row.and_then(|s| s.validate().map(|_| s)) {
                Ok(s) => {
                    self.streams
                        .entry(s.stream_id)
                        .or_default()
                        .insert(s.timestamp, s.value);
                    report.accepted += 1;
                }
                Err(error) => {
                    report.rejected += 1;
                    report.errors.push(RowError { row: i + 1, error });
                }
            }
        }
        report
    }

    /// Samples with `t0 <= timestamp <= t1` for each requested id, ascending.
    /// Unknown ids yield empty sequences.
    pub fn range<S: AsRef<str>>(
        &self,
        ids: &[S],
        t0: i64,
        t1: i64,
    ) -> Result<Vec<(String, Vec<Sample>)>, TimeseriesError> {
        if t0 > t1 {
            return Err(TimeseriesError::InvertedRange { t0, t1 });
        }
        Ok(ids
            .iter()
            .map(|id| {
                let id = id.as_ref();
                (id.to_string(), self.stream_range(id, t0, t1))
            })
            .collect())
    }

    pub fn stream_range(&self, id: &str, t0: i64, t1: i64) -> Vec<Sample> {
        if t0 > t1 {
            return Vec::new();
        }
        self.streams
            .get(id)
            .map(|s| s.range(t0..=t1).map(|(&t, &v)| Sample::new(id, t, v)).collect())
            .unwrap_or_default()
    }

    /// Latest sample at or before `t`.
    pub fn latest_at(&self, id: &str, t: i64) -> Option<Sample> {
        self.streams
            .get(id)?
            .range(..=t)
            .next_back()
            .map(|(&ts, &v)| Sample::new(id, ts, v))
    }

    pub fn info(&self, id: &str) -> Option<StreamInfo> {
        let s = self.streams.get(id)?;
        Some(StreamInfo {
            count: s.len(),
            first: *s.keys().next()?,
            last: *s.keys().next_back()?,
        })
    }

    pub fn stream_ids(&self) -> impl Iterator<Item = &str> {
        self.streams.keys().map(String::as_str)
    }

    pub fn stream_count(&self) -> usize {
        self.streams.len()
    }

    pub fn sample_count(&self) -> usize {
        self.streams.values().map(BTreeMap::len).sum()
    }

    /// Every sample in stream then time order.
    pub fn samples(&self) -> impl Iterator<Item = Sample> + '_ {
        self.streams
            .iter()
            .flat_map(|(id, s)| s.iter().map(move |(&t, &v)| Sample::new(id.as_str(), t, v)))
    }

    pub fn write_ndjson<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header = Header {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for (id, s) in &self.streams {
            for (&t, &v) in s {
                serde_json::to_writer(
                    &mut w,
                    &Line {
                        id: id.as_str().into(),
                        t,
                        v,
                    },
                )?;
                w.write_all(b"\n")?;
            }
        }
        w.flush()
    }

    pub fn read_ndjson<R: BufRead>(r: R) -> Result<Self, TimeseriesError> {
        let corrupt = |line: usize, message: String| TimeseriesError::CorruptFile { line, message };
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| corrupt(1, "missing header".into()))??;
        let header: Header = serde_json::from_str(&header).map_err(|e| corrupt(1, e.to_string()))?;
        if header.format != FORMAT_NAME || header.version != FORMAT_VERSION {
            return Err(corrupt(
                1,
                format!("unsupported format {} v{}", header.format, header.version),
            ));
        }
        let mut store = SeriesStore::new();
        for (i, line) in lines.enumerate() {
            let n = i + 2;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: Line = serde_json::from_str(&line).map_err(|e| corrupt(n, e.to_string()))?;
            let s = Sample::new(rec.id.into_owned(), rec.t, rec.v);
            s.validate().map_err(|e| corrupt(n, e.to_string()))?;
            store
                .streams
                .entry(s.stream_id)
                .or_default()
                .insert(s.timestamp, s.value);
        }
        Ok(store)
    }

    pub fn persist(&self, path: &Path) -> Result<(), TimeseriesError> {
        let tmp = path.with_extension("ndjson.tmp");
        self.write_ndjson(BufWriter::new(fs::File::create(&tmp)?))?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, TimeseriesError> {
        Self::read_ndjson(BufReader::new(fs::File::open(path)?))
    }
}

/// Integer UTC seconds or an RFC 3339 timestamp.
pub fn parse_timestamp(raw: &str) -> Result<i64, SampleError> {
    let raw = raw.trim();
    let t = match raw.parse::<i64>() {
        Ok(t) => t,
        Err(_) => chrono::DateTime::parse_from_rfc3339(raw)
            .map_err(|_| SampleError::MalformedTimestamp(raw.to_string()))?
            .timestamp(),
    };
    if t < 0 {
        return Err(SampleError::MalformedTimestamp(raw.to_string()));
    }
    Ok(t)
}

fn parse_value(raw: &str) -> Result<f64, SampleError> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| SampleError::MalformedRow(format!("value '{}' is not a number", raw.trim())))
}

/// Parses `id,time,value` CSV with a header row.
pub fn parse_csv(text: &str) -> Vec<Result<Sample, SampleError>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(|e| SampleError::MalformedRow(e.to_string()))?;
            if rec.len() != 3 {
                return Err(SampleError::MalformedRow(format!(
                    "expected 3 fields, found {}",
                    rec.len()
                )));
            }
            Ok(Sample {
                stream_id: rec[0].to_string(),
                timestamp: parse_timestamp(&rec[1])?,
                value: parse_value(&rec[2])?,
            })
        })
        .collect()
}

/// Parses NDJSON rows `{"id": ..., "t": ..., "v": ...}`. `t` may be an
/// integer or an RFC 3339 string, `v` a number or a numeric string (so that
/// `"NaN"` can be reported rather than failing to parse).
pub fn parse_ndjson(text: &str) -> Vec<Result<Sample, SampleError>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .filter(|l| {
            // Skip a persisted-file header if present.
            serde_json::from_str::<Header>(l).is_err()
        })
        .map(|line| {
            let v: serde_json::Value =
                serde_json::from_str(line).map_err(|e| SampleError::MalformedRow(e.to_string()))?;
            let id = match v.get("id") {
                Some(serde_json::Value::String(s)) => s.clone(),
                _ => return Err(SampleError::MalformedRow("missing string field 'id'".into())),
            };
            let timestamp = match v.get("t") {
                Some(serde_json::Value::Number(n)) => match n.as_i64() {
                    Some(t) if t >= 0 => t,
                    _ => return Err(SampleError::MalformedTimestamp(n.to_string())),
                },
                Some(serde_json::Value::String(s)) => parse_timestamp(s)?,
                _ => return Err(SampleError::MalformedTimestamp("missing".into())),
            };
            let value = match v.get("v") {
                Some(serde_json::Value::Number(n)) => n.as_f64().unwrap_or(f64::NAN),
                Some(serde_json::Value::String(s)) => parse_value(s)?,
                _ => return Err(SampleError::MalformedRow("missing numeric field 'v'".into())),
            };
            Ok(Sample {
                stream_id: id,
                timestamp,
                value,
            })
        })
        .collect()
}

/// Detects NDJSON (first non-blank character `{`) versus CSV.
pub fn parse_rows(text: &str) -> Vec<Result<Sample, SampleError>> {
    if text.trim_start().starts_with('{') {
        parse_ndjson(text)
    } else {
        parse_csv(text)
    }
}
