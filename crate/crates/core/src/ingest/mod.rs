//! CSV ingestion: NOAA storm-event exports and generic observation tables.
//!
//! Both loaders work on a copy of the graph and only commit it once the whole
//! file has been processed, so a strict-mode abort leaves the graph untouched.

mod observations;
mod storm;

use std::fmt;

use csv::StringRecord;
use serde::Serialize;
use thiserror::Error;

use crate::model::ModelError;
use crate::store::StoreError;

pub use observations::{ingest_observations_csv, OBSERVATION_COLUMNS};
pub use storm::{
    ingest_storm_csv, parse_damage, parse_local_time, sanitize_kind, timezone_offset, STORM_COLUMNS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strictness {
    /// The first bad row aborts the whole file.
    #[default]
    Strict,
    /// Bad rows are skipped and recorded in the report.
    Lenient,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("missing required column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: {reason}")]
    Row { line: u64, reason: RowError },
    #[error("reading CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Store(#[from] StoreError),
}

impl From<ModelError> for IngestError {
    fn from(e: ModelError) -> Self {
        IngestError::Store(StoreError::Invalid(e))
    }
}

impl IngestError {
    pub fn code(&self) -> &'static str {
        match self {
            IngestError::MissingColumn(_) => "E-INGEST-COLUMN",
            IngestError::Row { reason, .. } => reason.code(),
            IngestError::Csv(_) => "E-INGEST-CSV",
            IngestError::Store(e) => e.code(),
        }
    }
}

/// Why a single row was rejected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RowError {
    #[error("{column}: {message}")]
    Field {
        column: &'static str,
        message: String,
    },
    #[error("end {end} is before begin {begin}")]
    Order { begin: String, end: String },
    #[error("unknown unit `{0}`")]
    UnknownUnit(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("attribute `{attribute}` already recorded for {situation}")]
    DuplicateAttribute {
        situation: String,
        attribute: String,
    },
    #[error("malformed record: {0}")]
    Malformed(String),
}

impl RowError {
    pub fn code(&self) -> &'static str {
        match self {
            RowError::Field { .. } => "E-INGEST-FIELD",
            RowError::Order { .. } => "E-INGEST-ORDER",
            RowError::UnknownUnit(_) => "E-INGEST-UNIT",
            RowError::DuplicateId(_) => "E-INGEST-DUPID",
            RowError::DuplicateAttribute { .. } => "E-INGEST-DUPATTR",
            RowError::Malformed(_) => "E-INGEST-RECORD",
        }
    }

    fn field(column: &'static str, e: impl fmt::Display) -> Self {
        RowError::Field {
            column,
            message: e.to_string(),
        }
    }

    fn model(column: &'static str, e: ModelError) -> Self {
        match e {
            ModelError::UnknownUnit(u) => RowError::UnknownUnit(u),
            ModelError::OrderViolation { start, end } => RowError::Order {
                begin: start.to_string(),
                end: end.to_string(),
            },
            other => RowError::field(column, other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowIssue {
    pub line: u64,
    pub code: &'static str,
    pub reason: String,
}

impl fmt::Display for RowIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {} {}", self.line, self.code, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestReport {
    pub strictness: Strictness,
    pub rows_read: usize,
    /// Row events (storm files) or situations (observation files).
    pub entities_created: usize,
    pub triples_created: usize,
    pub errors: Vec<RowIssue>,
    pub warnings: Vec<RowIssue>,
}

impl IngestReport {
    fn new(strictness: Strictness) -> Self {
        Self {
            strictness,
            rows_read: 0,
            entities_created: 0,
            triples_created: 0,
            errors: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Records a bad row, or turns it into the abort error in strict mode.
    fn reject(&mut self, line: u64, reason: RowError) -> Result<(), IngestError> {
        match self.strictness {
            Strictness::Strict => Err(IngestError::Row { line, reason }),
            Strictness::Lenient => {
                self.errors.push(RowIssue {
                    line,
                    code: reason.code(),
                    reason: reason.to_string(),
                });
                Ok(())
            }
        }
    }

    fn warn(&mut self, line: u64, code: &'static str, reason: String) {
        self.warnings.push(RowIssue { line, code, reason });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.strictness {
            Strictness::Strict => "strict",
            Strictness::Lenient => "lenient",
        };
        writeln!(f, "mode: {mode}")?;
        writeln!(f, "rows read: {}", self.rows_read)?;
        writeln!(f, "entities created: {}", self.entities_created)?;
        writeln!(f, "triples created: {}", self.triples_created)?;
        writeln!(f, "errors: {}", self.errors.len())?;
        for e in &self.errors {
            writeln!(f, "  {e}")?;
        }
        writeln!(f, "warnings: {}", self.warnings.len())?;
        for w in &self.warnings {
            writeln!(f, "  {w}")?;
        }
        Ok(())
    }
}

fn reader<R: std::io::Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source)
}

/// Header positions of `names`, matched case-insensitively.
fn locate(headers: &StringRecord, names: &[&'static str]) -> Result<Vec<usize>, IngestError> {
    names
        .iter()
        .map(|name| find(headers, name).ok_or_else(|| IngestError::MissingColumn(name.to_string())))
        .collect()
}

fn find(headers: &StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h.eq_ignore_ascii_case(name))
}

/// Line of a record, or a row error for records the CSV reader rejected.
/// I/O failures are not row-level and propagate.
fn record_line(rec: &Result<StringRecord, csv::Error>) -> u64 {
    match rec {
        Ok(r) => r.position().map_or(0, |p| p.line()),
        Err(e) => e.position().map_or(0, |p| p.line()),
    }
}

fn record_or_reject(
    rec: Result<StringRecord, csv::Error>,
) -> Result<Result<StringRecord, RowError>, IngestError> {
    match rec {
        Ok(r) => Ok(Ok(r)),
        Err(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => Err(IngestError::Csv(e)),
        Err(e) => Ok(Err(RowError::Malformed(e.to_string()))),
    }
}
