//! Exact distribution theory for the longest-run lack-of-fit test.
//!
//! Given residuals of a fully specified regression function, ordered by the
//! covariate, the test statistic is the length of the longest block of
//! residuals sharing a sign. Under the null hypothesis the signs are fair coin
//! flips; under a constant-shift alternative they are biased coins with
//! success probability `p`.
//!
//! This crate computes everything in exact arithmetic:
//!
//! - [`run_stats`]: sign sequences and longest runs `L_n^+`, `L_n^-`, `L_n`.
//! - [`exact_null`]: the null law of `L_n`, critical values and p-values,
//!   with an independent linear recursion as a cross-check.
//! - [`conditional_counts`]: `S_n^(k)(x)`, the number of sign sequences with
//!   `k` positives and no run longer than `x`, by dynamic programming and by
//!   a four-case recursion reconciled against it.
//! - [`alternative_power`]: the law of `L_n` under biased signs and the exact
//!   power of the test.
//! - [`asymptotic_check`]: the law of `L_n^+` alone and the convergence of
//!   `Pr(L_n <= k)` towards it for biased signs.
//! - [`brute_oracle`]: exhaustive enumeration used to validate the engines.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod alternative_power;
pub mod asymptotic_check;
pub mod brute_oracle;
pub mod conditional_counts;
pub mod discrepancy;
mod error;
pub mod exact_null;
pub mod rational;
pub mod run_stats;

pub use alternative_power::{
    alt_cdf, p_from_gaussian_shift, power, AlternativeSpec, CriticalRegion, POrigin, PowerResult,
};
pub use asymptotic_check::{
    convergence_report, plus_run_cdf, plus_run_counts, ConvergenceReport, PlusRunCountTable,
};
pub use brute_oracle::{enumerate_joint, oracle_null_pmf, oracle_snk, JointCountTable};
pub use conditional_counts::{
    compositions_bounded, snk_dp, snk_proposition1, CountEngine, CountTable, Proposition1,
};
pub use discrepancy::DiscrepancyReport;
pub use error::Error;
pub use exact_null::{
    critical_value, null_table_by_counting, null_table_riordan, p_value, Convention, CriticalValue,
    ProbabilityTable, Regime, RiordanTable, Tail,
};
pub use run_stats::{
    longest_runs, signs_from_residuals, Observation, ResidualSeries, ResidualSource, RunSummary,
    SignSequence, ZeroPolicy,
};

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;

pub type Result<T, E = Error> = core::result::Result<T, E>;
