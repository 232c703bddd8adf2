//! Law of `L_n` when every residual is positive with probability `p`, and the
//! exact power of the test against that alternative.
//!
//! `Pr(L_n <= x) = sum_k S_n^(k)(x) p^k (1-p)^(n-k)`. `p` is carried as an
//! exact rational: decimal input is exact, and a Gaussian-shift `p` is the
//! dyadic rational of the `f64` it evaluates to, so every probability below
//! is exact given `p`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::conditional_counts::snk_dp;
use crate::exact_null::{null_table_by_counting, Convention, ProbabilityTable, Regime, Tail};
use crate::rational::rational_from_f64;
use crate::{Error, Result};

/// How `p` was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum POrigin {
    Direct,
    /// `p = Phi(c / sigma)` for Gaussian errors with a constant shift `c`.
    GaussianShift {
        c: f64,
        sigma: f64,
    },
}

/// Probability that a residual is positive under the alternative.
#[derive(Debug, Clone, PartialEq)]
pub struct AlternativeSpec {
    p: BigRational,
    origin: POrigin,
}

impl AlternativeSpec {
    pub fn direct(p: BigRational) -> Result<Self> {
        check_probability(&p)?;
        Ok(Self {
            p,
            origin: POrigin::Direct,
        })
    }

    pub fn gaussian_shift(c: f64, sigma: f64) -> Result<Self> {
        let value = p_from_gaussian_shift(c, sigma)?;
        let p = rational_from_f64(value).ok_or(Error::InvalidProbability)?;
        check_probability(&p)?;
        Ok(Self {
            p,
            origin: POrigin::GaussianShift { c, sigma },
        })
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    pub fn origin(&self) -> POrigin {
        self.origin
    }

    /// The same alternative with signs flipped.
    pub fn complement(&self) -> Self {
        Self {
            p: BigRational::one() - &self.p,
            origin: POrigin::Direct,
        }
    }
}

fn check_probability(p: &BigRational) -> Result<()> {
    if *p <= BigRational::zero() || *p >= BigRational::one() {
        return Err(Error::InvalidProbability);
    }
    Ok(())
}

/// `p = Pr(eps + c > 0) = Phi(c / sigma)` for centred Gaussian errors.
pub fn p_from_gaussian_shift(c: f64, sigma: f64) -> Result<f64> {
    if sigma.is_nan() || sigma <= 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidSigma);
    }
    if c.is_nan() {
        return Err(Error::InvalidProbability);
    }
    Ok(standard_normal_cdf(c / sigma))
}

/// `Phi(z)` through the complementary error function, which keeps full
/// relative accuracy in both tails.
pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / core::f64::consts::SQRT_2)
}

/// `sum_k counts[k] p^k (1-p)^(n-k)`, exactly.
pub(crate) fn binomial_mixture(counts: &[BigUint], p: &BigRational) -> BigRational {
    let n = counts.len() - 1;
    // p = a / d with d > 0, 1 - p = (d - a) / d.
    let a = p.numer().clone();
    let d = p.denom().clone();
    let b = &d - &a;
    let mut a_pow = vec![BigInt::one(); n + 1];
    let mut b_pow = vec![BigInt::one(); n + 1];
    for i in 1..=n {
        a_pow[i] = &a_pow[i - 1] * &a;
        b_pow[i] = &b_pow[i - 1] * &b;
    }
    let mut total = BigInt::zero();
    for (k, count) in counts.iter().enumerate() {
        if count.is_zero() {
            continue;
        }
        total += BigInt::from_biguint(Sign::Plus, count.clone()) * &a_pow[k] * &b_pow[n - k];
    }
    BigRational::new(total, num_traits::pow(d, n))
}

fn check_length(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidLength { n, min: 1 });
    }
    Ok(())
}

/// `Pr(L_n <= x)` under the alternative. `x = 0` gives 0.
pub fn alt_cdf(n: usize, x: usize, spec: &AlternativeSpec) -> Result<BigRational> {
    check_length(n)?;
    if x > n {
        return Err(Error::RunBoundOutOfRange { x, n });
    }
    if x == 0 {
        return Ok(BigRational::zero());
    }
    if x == n {
        return Ok(BigRational::one());
    }
    let table = snk_dp(n, x)?;
    Ok(binomial_mixture(table.counts(), spec.p()))
}

/// Full law of `L_n` under the alternative.
pub fn alternative_table(n: usize, spec: &AlternativeSpec) -> Result<ProbabilityTable> {
    check_length(n)?;
    let cdf = (0..=n)
        .map(|x| alt_cdf(n, x, spec))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbabilityTable::from_cdf(
        n,
        cdf,
        Regime::Alternative(spec.p().clone()),
    ))
}

/// Rejection set of the test in terms of `L_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum CriticalRegion {
    /// `L_n > upper`.
    Upper { upper: usize },
    /// `L_n < lower` or `L_n > upper`.
    TwoSided { lower: usize, upper: usize },
}

impl CriticalRegion {
    /// Builds the region from a null table.
    ///
    /// The bilateral region uses `c_{n,1-alpha/2}` as lower and
    /// `c_{n,alpha/2}` as upper bound, both under `convention`.
    pub fn from_null(
        null: &ProbabilityTable,
        alpha: &BigRational,
        tail: Tail,
        convention: Convention,
    ) -> Result<Self> {
        match tail {
            Tail::Unilateral => Ok(CriticalRegion::Upper {
                upper: null.critical_value(alpha, convention)?.c,
            }),
            Tail::Bilateral => {
                let half = alpha / BigRational::from_integer(2.into());
                let upper = null.critical_value(&half, convention)?.c;
                let lower = null
                    .critical_value(&(BigRational::one() - &half), convention)?
                    .c;
                Ok(CriticalRegion::TwoSided { lower, upper })
            }
        }
    }

    pub fn contains(&self, l_n: usize) -> bool {
        match *self {
            CriticalRegion::Upper { upper } => l_n > upper,
            CriticalRegion::TwoSided { lower, upper } => l_n < lower || l_n > upper,
        }
    }

    /// Probability of the region under a law with cdf `cdf`.
    fn probability(&self, cdf: impl Fn(usize) -> Result<BigRational>) -> Result<BigRational> {
        match *self {
            CriticalRegion::Upper { upper } => Ok(BigRational::one() - cdf(upper)?),
            CriticalRegion::TwoSided { lower, upper } => {
                let below = if lower == 0 {
                    BigRational::zero()
                } else {
                    cdf(lower - 1)?
                };
                Ok(below + BigRational::one() - cdf(upper)?)
            }
        }
    }

    /// Exact size of the region under the null law.
    pub fn size(&self, null: &ProbabilityTable) -> BigRational {
        self.probability(|x| Ok(null.cdf(x)))
            .expect("table lookups cannot fail")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerResult {
    pub n: usize,
    pub alpha: BigRational,
    pub tail: Tail,
    pub convention: Convention,
    pub spec: AlternativeSpec,
    pub critical_region: CriticalRegion,
    /// Exact size of the region under the null.
    pub size: BigRational,
    pub power: BigRational,
}

/// Exact power of the test against `spec`.
pub fn power(
    n: usize,
    alpha: &BigRational,
    tail: Tail,
    convention: Convention,
    spec: &AlternativeSpec,
) -> Result<PowerResult> {
    let null = null_table_by_counting(n)?;
    power_with_null(&null, alpha, tail, convention, spec)
}

/// [`power`] with a precomputed null table.
pub fn power_with_null(
    null: &ProbabilityTable,
    alpha: &BigRational,
    tail: Tail,
    convention: Convention,
    spec: &AlternativeSpec,
) -> Result<PowerResult> {
    let n = null.n();
    let region = CriticalRegion::from_null(null, alpha, tail, convention)?;
    let power = region.probability(|x| alt_cdf(n, x, spec))?;
    Ok(PowerResult {
        n,
        alpha: alpha.clone(),
        tail,
        convention,
        spec: spec.clone(),
        critical_region: region,
        size: region.size(null),
        power,
    })
}
