//! Machine-readable records of where a printed recursion had to be corrected
//! to agree with exact counting.

use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

/// A value produced by the printed form of a formula.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LiteralValue {
    Rational(#[cfg_attr(feature = "serde", serde(serialize_with = "ser_rational"))] BigRational),
    Integer(#[cfg_attr(feature = "serde", serde(serialize_with = "ser_display"))] BigInt),
    /// The printed form is not evaluable here (undefined or self-referential).
    Undefined(String),
}

/// One grid point where the printed and corrected forms differ.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Witness {
    /// `[n, k]` for distribution cells, `[n, k, x]` for conditional counts.
    pub index: Vec<usize>,
    pub literal: LiteralValue,
    pub resolved: LiteralValue,
}

/// A correction applied to a printed formula.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Resolution {
    /// Which formula or term this applies to.
    pub item: String,
    /// The formula as printed.
    pub literal: String,
    /// The form actually evaluated.
    pub resolved: String,
    /// Number of validation-grid points where the printed form is wrong.
    pub failing_points: usize,
    /// Grid points where the printed form is wrong (possibly truncated).
    pub witnesses: Vec<Witness>,
}

/// Outcome of validating an engine against the authoritative counts.
///
/// `mismatches` lists cells where the served values disagree with the
/// authoritative engine; it is empty whenever every correction holds.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DiscrepancyReport {
    pub resolutions: Vec<Resolution>,
    pub mismatches: Vec<Witness>,
}

impl DiscrepancyReport {
    /// True when no served value disagrees with the authoritative engine.
    pub fn is_consistent(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[cfg(feature = "serde")]
fn ser_rational<S: serde::Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&crate::rational::to_fraction(v))
}

#[cfg(feature = "serde")]
fn ser_display<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}
