//! Residual signs and longest runs.

use alloc::vec::Vec;

use crate::{Error, Result};

/// One observation after ingestion.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Observation {
    pub covariate: f64,
    pub residual: f64,
}

/// Where the residuals came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ResidualSource {
    /// `residual = y - fitted`, computed at ingestion.
    Raw,
    /// Residuals supplied as-is.
    Precomputed,
}

/// Residuals ordered by covariate.
///
/// Points are sorted ascending by covariate; ties keep their input order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ResidualSeries {
    points: Vec<Observation>,
    source: ResidualSource,
}

impl ResidualSeries {
    pub fn new(mut points: Vec<Observation>, source: ResidualSource) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints(points.len()));
        }
        if let Some(i) = points
            .iter()
            .position(|p| !p.covariate.is_finite() || !p.residual.is_finite())
        {
            return Err(Error::NonFiniteValue(i));
        }
        // Stable sort: tied covariates keep input order.
        points.sort_by(|a, b| a.covariate.total_cmp(&b.covariate));
        Ok(Self { points, source })
    }

    /// Builds residuals `y - fitted` from raw columns of equal length.
    pub fn from_raw(x: &[f64], y: &[f64], fitted: &[f64]) -> Result<Self> {
        if x.len() != y.len() || x.len() != fitted.len() {
            return Err(Error::LengthMismatch);
        }
        let points = (0..x.len())
            .map(|i| Observation {
                covariate: x[i],
                residual: y[i] - fitted[i],
            })
            .collect();
        Self::new(points, ResidualSource::Raw)
    }

    pub fn from_residuals(x: &[f64], residuals: &[f64]) -> Result<Self> {
        if x.len() != residuals.len() {
            return Err(Error::LengthMismatch);
        }
        let points = x
            .iter()
            .zip(residuals)
            .map(|(&covariate, &residual)| Observation {
                covariate,
                residual,
            })
            .collect();
        Self::new(points, ResidualSource::Precomputed)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Observation] {
        &self.points
    }

    pub fn source(&self) -> ResidualSource {
        self.source
    }

    /// Residuals in covariate order.
    pub fn residuals(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.residual).collect()
    }

    pub fn signs(&self, policy: ZeroPolicy) -> Result<SignSequence> {
        signs_from_residuals(&self.residuals(), policy)
    }
}

/// What to do with residuals that are exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ZeroPolicy {
    #[default]
    Error,
    Drop,
}

/// Indicators `Z_i = 1{residual_i > 0}` in covariate order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SignSequence {
    bits: Vec<bool>,
    zero_positions: Vec<usize>,
}

impl SignSequence {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self {
            bits,
            zero_positions: Vec::new(),
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Ordered positions (before dropping) whose residual was exactly zero.
    pub fn zero_positions(&self) -> &[usize] {
        &self.zero_positions
    }
}

/// Longest runs of a sign sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunSummary {
    /// Longest block of positive residuals, `L_n^+`.
    pub l_plus: usize,
    /// Longest block of negative residuals, `L_n^-`.
    pub l_minus: usize,
    /// `L_n = max(L_n^+, L_n^-)`.
    pub l_n: usize,
    /// Number of positive residuals.
    pub k: usize,
}

impl RunSummary {
    /// Single pass over the bits. An empty input gives all zeros.
    pub fn scan<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut summary = RunSummary::default();
        let mut current = 0usize;
        let mut previous = None;
        for bit in bits {
            current = if previous == Some(bit) {
                current + 1
            } else {
                1
            };
            previous = Some(bit);
            if bit {
                summary.k += 1;
                summary.l_plus = summary.l_plus.max(current);
            } else {
                summary.l_minus = summary.l_minus.max(current);
            }
        }
        summary.l_n = summary.l_plus.max(summary.l_minus);
        summary
    }
}

/// Converts ordered residuals to signs under the zero policy.
pub fn signs_from_residuals(residuals: &[f64], policy: ZeroPolicy) -> Result<SignSequence> {
    if let Some(i) = residuals.iter().position(|r| r.is_nan()) {
        return Err(Error::NonFiniteValue(i));
    }
    let zero_positions: Vec<usize> = residuals
        .iter()
        .enumerate()
        .filter(|(_, r)| **r == 0.0)
        .map(|(i, _)| i)
        .collect();
    if let (ZeroPolicy::Error, Some(&first)) = (policy, zero_positions.first()) {
        return Err(Error::ZeroResidual(first));
    }
    let bits: Vec<bool> = residuals
        .iter()
        .filter(|r| **r != 0.0)
        .map(|r| *r > 0.0)
        .collect();
    if bits.is_empty() && !residuals.is_empty() {
        return Err(Error::EmptyAfterDrop);
    }
    Ok(SignSequence {
        bits,
        zero_positions,
    })
}

/// Longest runs of each sign, by a linear block scan.
pub fn longest_runs(seq: &SignSequence) -> Result<RunSummary> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(RunSummary::scan(seq.bits.iter().copied()))
}
