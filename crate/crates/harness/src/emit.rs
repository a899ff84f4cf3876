//! CSV and JSON-lines writers.
//!
//! CSV numbers are written as `{:.16e}` (17 significant digits); JSON numbers use
//! the shortest representation that parses back to the same double. Non-finite
//! values appear as `NaN`/`inf` in CSV and `null` in JSON.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use whipchain::dynamics::Snapshot;
use whipchain::report::EnergyReport;
use whipchain::ChainState;

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("nothing to write to {0}")]
    Empty(PathBuf),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path} line {line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> EmitError {
    EmitError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Column names of the time-series CSV for reports carrying `e_0 ..= e_{m_max}` and `d_1 ..= d_{d_max}`.
pub fn series_header(m_max: usize, d_max: usize) -> Vec<String> {
    let mut h = vec!["step".to_string(), "t".to_string()];
    h.extend((0..=m_max).map(|m| format!("e{m}")));
    h.extend((0..=m_max).map(|m| format!("e_tilde{m}")));
    h.extend(["u0", "v0", "a", "b", "c"].map(String::from));
    h.extend((1..=d_max).map(|m| format!("d{m}")));
    h.extend(
        [
            "min_sigma",
            "max_link_rate",
            "max_curvature",
            "constraint_drift",
            "orthogonality_drift",
            "projection",
            "a_ratio",
            "c_ratio",
            "d1_ratio",
            "gronwall_ratio",
        ]
        .map(String::from),
    );
    h
}

fn series_row(s: &Snapshot, m_max: usize, d_max: usize) -> Vec<String> {
    let r = &s.report;
    let mut row = vec![s.step.to_string(), fmt_f64(s.state.time)];
    row.extend((0..=m_max).map(|m| fmt_f64(r.e_at(m))));
    row.extend((0..=m_max).map(|m| fmt_f64(r.e_tilde_at(m))));
    row.extend([r.u0, r.v0, r.a, r.b, r.c].map(fmt_f64));
    row.extend((1..=d_max).map(|m| fmt_f64(r.d_at(m))));
    row.extend(
        [
            r.min_sigma,
            r.max_link_rate,
            r.max_curvature,
            r.constraint_drift,
            r.orthogonality_drift,
            s.projection,
            r.a_ratio(),
            r.c_ratio(),
            r.d1_ratio(),
            s.gronwall_ratio.unwrap_or(f64::NAN),
        ]
        .map(fmt_f64),
    );
    row
}

/// One header row and one row per snapshot.
pub fn write_series_csv(path: &Path, snapshots: &[Snapshot], m_max: usize, d_max: usize) -> Result<(), EmitError> {
    if snapshots.is_empty() {
        return Err(EmitError::Empty(path.to_path_buf()));
    }
    let rows = snapshots.iter().map(|s| series_row(s, m_max, d_max));
    write_table(path, &series_header(m_max, d_max), rows)
}

/// Header plus rows of already formatted fields.
pub fn write_table<I>(path: &Path, header: &[String], rows: I) -> Result<(), EmitError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Full state of one snapshot, as written to JSON lines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub step: usize,
    pub t: f64,
    pub n: usize,
    /// Positions of particles `1 ..= n+1`.
    pub eta: Vec<Vec<f64>>,
    pub eta_dot: Vec<Vec<f64>>,
    /// `σ_0 ..= σ_n`
    pub sigma: Vec<f64>,
    pub report: EnergyReport,
    pub projection: f64,
    pub gronwall_ratio: Option<f64>,
}

impl SnapshotRecord {
    pub fn from_snapshot(s: &Snapshot) -> Self {
        Self {
            step: s.step,
            t: s.state.time,
            n: s.state.n(),
            eta: s.state.eta().points(),
            eta_dot: s.state.eta_dot().points(),
            sigma: s.tension.values().to_vec(),
            report: s.report.clone(),
            projection: s.projection,
            gronwall_ratio: s.gronwall_ratio,
        }
    }
}

#[derive(Deserialize)]
struct StateOnly {
    t: f64,
    eta: Vec<Vec<f64>>,
    eta_dot: Vec<Vec<f64>>,
}

pub fn write_snapshots_jsonl(path: &Path, snapshots: &[Snapshot]) -> Result<(), EmitError> {
    if snapshots.is_empty() {
        return Err(EmitError::Empty(path.to_path_buf()));
    }
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    for s in snapshots {
        serde_json::to_writer(&mut w, &SnapshotRecord::from_snapshot(s)).map_err(|e| io_err(path, e))?;
        w.write_all(b"\n").map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Write any serializable records, one JSON object per line.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), EmitError> {
    if records.is_empty() {
        return Err(EmitError::Empty(path.to_path_buf()));
    }
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| io_err(path, e))?;
        w.write_all(b"\n").map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Chain states from a snapshot JSON-lines file.
pub fn read_states_jsonl(path: &Path) -> Result<Vec<ChainState>, EmitError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        let parse = |message: String| EmitError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let rec: StateOnly = serde_json::from_str(&line).map_err(|e| parse(e.to_string()))?;
        out.push(ChainState::new(rec.eta, rec.eta_dot, rec.t).map_err(|e| parse(e.to_string()))?);
    }
    Ok(out)
}

/// A table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_f64(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(i) => (*i).into(),
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(serde_json::Value::Null, Into::into),
            Cell::Text(s) => s.clone().into(),
            Cell::Bool(b) => (*b).into(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

pub type Row = Vec<(&'static str, Cell)>;

/// Rows sharing one column order as CSV.
pub fn write_rows_csv(path: &Path, rows: &[Row]) -> Result<(), EmitError> {
    let first = rows.first().ok_or_else(|| EmitError::Empty(path.to_path_buf()))?;
    let header: Vec<String> = first.iter().map(|(k, _)| k.to_string()).collect();
    write_table(path, &header, rows.iter().map(|r| r.iter().map(|(_, c)| c.csv()).collect()))
}

struct OrderedRow<'a>(&'a Row);

impl Serialize for OrderedRow<'_> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, c) in self.0 {
            map.serialize_entry(k, &c.json())?;
        }
        map.end()
    }
}

/// Rows as JSON objects, one per line, keys in column order.
pub fn write_rows_jsonl(path: &Path, rows: &[Row]) -> Result<(), EmitError> {
    let ordered: Vec<OrderedRow> = rows.iter().map(OrderedRow).collect();
    write_jsonl(path, &ordered)
}
