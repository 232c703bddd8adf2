//! Longest positive run `L_n^+` for biased signs, and how fast
//! `Pr(L_n <= k)` approaches `Pr(L_n^+ <= k)` when positives dominate.
//!
//! For `p > 1/2` long negative runs become negligible against long positive
//! runs as `n` grows, so the two-sided statistic is eventually governed by
//! the positive runs alone (and by `L_n^-` for `p < 1/2`). No rate is claimed;
//! [`convergence_report`] just measures the gap on a grid of lengths.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::alternative_power::{alt_cdf, binomial_mixture, AlternativeSpec};
use crate::{Error, Result};

/// Counts of length-`n` sequences with `k` positives whose longest positive
/// run is at most `x` (negative runs unconstrained).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlusRunCountTable {
    n: usize,
    x: usize,
    counts: Vec<BigUint>,
}

impl PlusRunCountTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> usize {
        self.x
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn count(&self, k: usize) -> BigUint {
        self.counts.get(k).cloned().unwrap_or_default()
    }
}

/// DP over (positives so far, length of the trailing positive run).
pub fn plus_run_counts(n: usize, x: usize) -> Result<PlusRunCountTable> {
    if n < 1 {
        return Err(Error::InvalidLength { n, min: 1 });
    }
    let x_eff = x.min(n);
    // states[j][r]: j positives so far, trailing positive run of length r
    // (r = 0 after a negative or at the start).
    let mut states: Vec<VecDeque<BigUint>> = vec![VecDeque::new(); n + 1];
    let mut totals: Vec<BigUint> = vec![BigUint::default(); n + 1];
    states[0].push_back(BigUint::one());
    totals[0] = BigUint::one();

    for len in 0..n {
        let mut next_states: Vec<VecDeque<BigUint>> = vec![VecDeque::new(); n + 1];
        let mut next_totals: Vec<BigUint> = vec![BigUint::default(); n + 1];
        for j in 0..=len {
            // A positive moves j -> j + 1 and lengthens the trailing run.
            let mut shifted = core::mem::take(&mut states[j]);
            let mut moved = totals[j].clone();
            if !shifted.is_empty() {
                shifted.push_front(BigUint::default());
                if shifted.len() > x_eff + 1 {
                    moved -= shifted.pop_back().expect("non-empty");
                }
            }
            next_states[j + 1] = shifted;
            next_totals[j + 1] = moved;
            // A negative resets the run to length 0.
            let front = &mut next_states[j];
            if front.is_empty() {
                front.push_back(BigUint::default());
            }
            front[0] += &totals[j];
            next_totals[j] += &totals[j];
        }
        states = next_states;
        totals = next_totals;
    }
    Ok(PlusRunCountTable {
        n,
        x,
        counts: totals,
    })
}

/// `Pr(L_n^+ <= k)` when each sign is positive with probability `p`.
pub fn plus_run_cdf(n: usize, k: usize, p: &BigRational) -> Result<BigRational> {
    if *p <= BigRational::from_integer(0.into()) || *p >= BigRational::one() {
        return Err(Error::InvalidProbability);
    }
    if k > n {
        return Err(Error::RunBoundOutOfRange { x: k, n });
    }
    let table = plus_run_counts(n, k)?;
    Ok(binomial_mixture(table.counts(), p))
}

/// One row of a [`ConvergenceReport`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceRow {
    pub n: usize,
    /// `Pr(L_n <= k)`.
    pub longest: BigRational,
    /// `Pr(L_n^+ <= k)` (or `Pr(L_n^- <= k)` when `p < 1/2`).
    pub one_sided: BigRational,
    /// `|longest - one_sided|`.
    pub difference: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub k: usize,
    pub p: BigRational,
    /// True when the comparison uses `L_n^-` because `p < 1/2`.
    pub uses_negative_runs: bool,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// Differences strictly decrease along the grid.
    pub fn strictly_decreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].difference < w[0].difference)
    }

    /// `first / last` difference ratio, if the last difference is non-zero.
    pub fn shrink_factor(&self) -> Option<BigRational> {
        let first = &self.rows.first()?.difference;
        let last = &self.rows.last()?.difference;
        if last.is_positive() {
            Some(first / last)
        } else {
            None
        }
    }
}

/// Gap `|Pr(L_n <= k) - Pr(L_n^+ <= k)|` for each `n` in `n_grid`.
///
/// For `p < 1/2` the comparison is against `L_n^-`, computed as `L_n^+` under
/// `1 - p`. `p = 1/2` is rejected.
pub fn convergence_report(
    k: usize,
    p: &BigRational,
    n_grid: &[usize],
) -> Result<ConvergenceReport> {
    let spec = AlternativeSpec::direct(p.clone())?;
    let half = BigRational::new(1.into(), 2.into());
    if *p == half {
        return Err(Error::UnbiasedProbability);
    }
    let uses_negative_runs = *p < half;
    let dominant = if uses_negative_runs {
        BigRational::one() - p
    } else {
        p.clone()
    };

    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        if n < 1 {
            return Err(Error::InvalidLength { n, min: 1 });
        }
        if k > n {
            return Err(Error::RunBoundOutOfRange { x: k, n });
        }
        let longest = alt_cdf(n, k, &spec)?;
        let one_sided = plus_run_cdf(n, k, &dominant)?;
        let difference = (&longest - &one_sided).abs();
        rows.push(ConvergenceRow {
            n,
            longest,
            one_sided,
            difference,
        });
    }
    Ok(ConvergenceReport {
        k,
        p: p.clone(),
        uses_negative_runs,
        rows,
    })
}
