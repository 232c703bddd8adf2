//! Output formats shared by the CLI commands.

use std::fmt::Write as _;

use longrun_core::rational::{to_decimal, to_fraction};
use longrun_core::BigRational;
use serde::Serialize;

/// Version of every JSON document the CLI emits.
pub const SCHEMA_VERSION: u32 = 1;

/// Default number of significant digits in decimal renderings.
pub const DEFAULT_PRECISION: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// An exact probability with its decimal rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prob {
    pub exact: String,
    pub decimal: String,
}

impl Prob {
    pub fn new(value: &BigRational, precision: usize) -> Self {
        Self {
            exact: to_fraction(value),
            decimal: to_decimal(value, precision),
        }
    }
}

/// `numerator,denominator,decimal` cells for CSV output.
pub fn csv_cells(value: &BigRational, precision: usize) -> String {
    format!(
        "{},{},{}",
        value.numer(),
        value.denom(),
        to_decimal(value, precision)
    )
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable");
    out.push('\n');
    out
}

/// Fixed-width `label : value` lines.
pub fn text_lines(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(label, _)| label.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (label, value) in rows {
        let _ = writeln!(out, "{label:<width$} : {value}");
    }
    out
}
