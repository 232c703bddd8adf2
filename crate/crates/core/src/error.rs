use alloc::string::String;

/// Errors raised by the exact engines and the statistic kernel.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("a residual series needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("non-finite value at input position {0}")]
    NonFiniteValue(usize),
    #[error("residual at ordered position {0} is exactly zero")]
    ZeroResidual(usize),
    #[error("every residual is zero; nothing left after dropping")]
    EmptyAfterDrop,
    #[error("sign sequence is empty")]
    EmptySequence,
    #[error("sequence length must be at least {min}, got {n}")]
    InvalidLength { n: usize, min: usize },
    #[error("input columns have different lengths")]
    LengthMismatch,
    #[error("run bound must be at least {min}, got {x}")]
    InvalidRunBound { x: usize, min: usize },
    #[error("run bound {x} exceeds sequence length {n}")]
    RunBoundOutOfRange { x: usize, n: usize },
    #[error("significance level must lie strictly between 0 and 1")]
    InvalidAlpha,
    #[error("observed statistic {observed} outside 1..={n}")]
    ObservedOutOfRange { observed: usize, n: usize },
    #[error("probability must lie strictly between 0 and 1")]
    InvalidProbability,
    #[error("p = 1/2 has no dominant sign; the comparison needs p != 1/2")]
    UnbiasedProbability,
    #[error("standard deviation must be positive and finite")]
    InvalidSigma,
    #[error("enumeration of length {n} exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("recursion term {term} is undefined at n={n}, k={k}")]
    RecursionDomain { n: usize, k: usize, term: String },
    #[error("recursion case {case} could not be reconciled with the counting engine")]
    UnreconciledCase { case: u8 },
    #[error("cannot parse number {0:?}")]
    ParseNumber(String),
}
