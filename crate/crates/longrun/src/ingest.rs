//! CSV ingestion.
//!
//! Accepted layouts, with a header row naming the columns (any order, case
//! insensitive, extra columns ignored):
//!
//! - `x, y, fitted`: residuals are `y - fitted`;
//! - `x, residual`: residuals are taken as given.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use longrun_core::{Observation, ResidualSeries, ResidualSource};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read input: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("missing columns: need (x, y, fitted) or (x, residual), found {found:?}")]
    MissingColumns { found: Vec<String> },
    #[error("line {line}, column {column:?}: non-finite value")]
    NonFiniteValue { line: u64, column: String },
    #[error(transparent)]
    Series(#[from] longrun_core::Error),
}

enum Layout {
    Raw { x: usize, y: usize, fitted: usize },
    Residual { x: usize, residual: usize },
}

impl Layout {
    fn detect(headers: &csv::StringRecord) -> Result<Self, IngestError> {
        let names: Vec<String> = headers
            .iter()
            .map(|h| h.trim().to_ascii_lowercase())
            .collect();
        let find = |name: &str| names.iter().position(|h| h == name);
        match (find("x"), find("y"), find("fitted"), find("residual")) {
            (Some(x), Some(y), Some(fitted), _) => Ok(Layout::Raw { x, y, fitted }),
            (Some(x), _, _, Some(residual)) => Ok(Layout::Residual { x, residual }),
            _ => Err(IngestError::MissingColumns { found: names }),
        }
    }

    fn source(&self) -> ResidualSource {
        match self {
            Layout::Raw { .. } => ResidualSource::Raw,
            Layout::Residual { .. } => ResidualSource::Precomputed,
        }
    }
}

fn field(
    record: &csv::StringRecord,
    index: usize,
    name: &str,
    line: u64,
) -> Result<f64, IngestError> {
    let raw = record.get(index).ok_or_else(|| IngestError::Parse {
        line,
        message: format!("missing field {name:?}"),
    })?;
    let value: f64 = raw.trim().parse().map_err(|_| IngestError::Parse {
        line,
        message: format!("column {name:?}: cannot parse {raw:?} as a number"),
    })?;
    if !value.is_finite() {
        return Err(IngestError::NonFiniteValue {
            line,
            column: name.to_string(),
        });
    }
    Ok(value)
}

/// Reads a residual series from CSV text.
pub fn read_series<R: Read>(reader: R) -> Result<ResidualSeries, IngestError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = csv.headers().map_err(|e| parse_error(&e))?.clone();
    let layout = Layout::detect(&headers)?;

    let mut points = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| parse_error(&e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let point = match layout {
            Layout::Raw { x, y, fitted } => Observation {
                covariate: field(&record, x, "x", line)?,
                residual: field(&record, y, "y", line)? - field(&record, fitted, "fitted", line)?,
            },
            Layout::Residual { x, residual } => Observation {
                covariate: field(&record, x, "x", line)?,
                residual: field(&record, residual, "residual", line)?,
            },
        };
        points.push(point);
    }
    Ok(ResidualSeries::new(points, layout.source())?)
}

fn parse_error(e: &csv::Error) -> IngestError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    IngestError::Parse {
        line,
        message: e.to_string(),
    }
}

pub fn read_series_path(path: &Path) -> Result<ResidualSeries, IngestError> {
    read_series(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_columns_are_differenced_and_sorted() {
        let data = "x,y,fitted\n1,2,1.5\n0,0,0.2\n";
        let series = read_series(data.as_bytes()).unwrap();
        assert_eq!(series.residuals(), vec![-0.2, 0.5]);
        assert_eq!(series.source(), ResidualSource::Raw);
    }

    #[test]
    fn residual_columns_pass_through() {
        let data = "residual,x\n0.5,3\n-1,1\n2,2\n";
        let series = read_series(data.as_bytes()).unwrap();
        assert_eq!(series.residuals(), vec![-1.0, 2.0, 0.5]);
        assert_eq!(series.source(), ResidualSource::Precomputed);
    }

    #[test]
    fn malformed_row_names_its_line() {
        let data = "x,residual\n1,0.5\n2,abc\n3,1\n";
        let err = read_series(data.as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::Parse { line: 3, .. }), "{err}");
        assert!(err.to_string().starts_with("line 3:"));

        let data = "x,residual\n1,0.5\n2\n";
        assert!(matches!(
            read_series(data.as_bytes()),
            Err(IngestError::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn thousands_separators_are_rejected() {
        let data = "x,residual\n1,\"1,000\"\n2,1\n";
        assert!(matches!(
            read_series(data.as_bytes()),
            Err(IngestError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn missing_and_non_finite() {
        let err = read_series("a,b\n1,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::MissingColumns { .. }));
        let err = read_series("x,residual\n1,inf\n2,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::NonFiniteValue { line: 2, .. }));
        let err = read_series("x,residual\n1,1\n".as_bytes()).unwrap_err();
        assert!(matches!(
            err,
            IngestError::Series(longrun_core::Error::TooFewPoints(1))
        ));
    }
}
