//! Ground truth by exhaustive enumeration of all `2^n` sign sequences.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;

use crate::exact_null::{ProbabilityTable, Regime};
use crate::rational::ratio;
use crate::run_stats::RunSummary;
use crate::{Error, Result};

/// Default enumeration cap: `2^24` sequences.
pub const DEFAULT_CAP: usize = 24;

/// Joint counts of (positives, longest run) and (positives, longest positive
/// run) over all sequences of one length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointCountTable {
    n: usize,
    // by_longest[k][l]: sequences with k positives and L_n = l.
    by_longest: Vec<Vec<u64>>,
    // by_plus[k][l]: sequences with k positives and L_n^+ = l.
    by_plus: Vec<Vec<u64>>,
}

impl JointCountTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Sequences with `k` positives and `L_n = l`.
    pub fn count(&self, k: usize, l: usize) -> u64 {
        self.by_longest
            .get(k)
            .and_then(|row| row.get(l))
            .copied()
            .unwrap_or(0)
    }

    /// Sequences with `k` positives and `L_n^+ = l`.
    pub fn plus_count(&self, k: usize, l: usize) -> u64 {
        self.by_plus
            .get(k)
            .and_then(|row| row.get(l))
            .copied()
            .unwrap_or(0)
    }

    /// Non-zero cells `(k, l, count)` of the `(k, L_n)` table.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.by_longest.iter().enumerate().flat_map(|(k, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| **c > 0)
                .map(move |(l, c)| (k, l, *c))
        })
    }

    pub fn total(&self) -> u64 {
        self.by_longest.iter().flatten().sum()
    }

    /// Sequences with `L_n = l`.
    pub fn marginal_by_longest(&self, l: usize) -> u64 {
        (0..=self.n).map(|k| self.count(k, l)).sum()
    }

    /// Sequences with `k` positives.
    pub fn marginal_by_k(&self, k: usize) -> u64 {
        self.by_longest
            .get(k)
            .map(|row| row.iter().sum())
            .unwrap_or(0)
    }

    /// Sequences with `k` positives and `L_n <= x`.
    pub fn snk(&self, x: usize, k: usize) -> u64 {
        (0..=x.min(self.n)).map(|l| self.count(k, l)).sum()
    }

    /// Sequences with `k` positives and `L_n^+ <= x`.
    pub fn plus_snk(&self, x: usize, k: usize) -> u64 {
        (0..=x.min(self.n)).map(|l| self.plus_count(k, l)).sum()
    }
}

/// Enumerates every sequence of length `n <= 24`.
pub fn enumerate_joint(n: usize) -> Result<JointCountTable> {
    enumerate_joint_capped(n, DEFAULT_CAP)
}

/// Enumerates every sequence of length `n`, refusing lengths above `cap`.
pub fn enumerate_joint_capped(n: usize, cap: usize) -> Result<JointCountTable> {
    if n < 1 {
        return Err(Error::InvalidLength { n, min: 1 });
    }
    if n > cap || n >= 64 {
        return Err(Error::CapExceeded { n, cap });
    }
    let mut by_longest = vec![vec![0u64; n + 1]; n + 1];
    let mut by_plus = vec![vec![0u64; n + 1]; n + 1];
    for pattern in 0u64..(1u64 << n) {
        let summary = RunSummary::scan((0..n).map(|i| pattern >> i & 1 == 1));
        by_longest[summary.k][summary.l_n] += 1;
        by_plus[summary.k][summary.l_plus] += 1;
    }
    Ok(JointCountTable {
        n,
        by_longest,
        by_plus,
    })
}

/// Number of sequences with `k` positives and no run longer than `x`.
pub fn oracle_snk(n: usize, x: usize, k: usize) -> Result<u64> {
    Ok(enumerate_joint(n)?.snk(x, k))
}

/// Null law of `L_n` by enumeration.
pub fn oracle_null_pmf(n: usize) -> Result<ProbabilityTable> {
    Ok(null_pmf_from(&enumerate_joint(n)?))
}

/// Null law of `L_n` from an existing joint table.
pub fn null_pmf_from(joint: &JointCountTable) -> ProbabilityTable {
    let n = joint.n();
    let denom = BigUint::one() << n;
    let pmf = (0..=n)
        .map(|l| ratio(BigUint::from(joint.marginal_by_longest(l)), denom.clone()))
        .collect();
    ProbabilityTable::from_pmf(n, pmf, Regime::Null)
}
