//! Null distribution of the longest run `L_n` for fair signs, critical values
//! and p-values.
//!
//! The production engine counts strings: a length-`n` string with every run
//! at most `x` long is a first symbol followed by a composition of `n` into
//! parts of size at most `x`, so `Pr(L_n <= x) = 2 C_x(n) / 2^n`.
//!
//! [`null_table_riordan`] evaluates the classical five-term recursion
//! relating `L_n`, `L_{n-1}`, `L_{n-2}`, `L_{n-k}` and `L_{n-k-1}` as an
//! independent check.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::conditional_counts::compositions_prefix;
use crate::discrepancy::{DiscrepancyReport, LiteralValue, Resolution, Witness};
use crate::rational::ratio;
use crate::{Error, Result};

/// The law a [`ProbabilityTable`] was computed under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regime {
    /// Fair signs.
    Null,
    /// Signs positive with probability `p`.
    Alternative(BigRational),
}

/// Exact law of `L_n`.
///
/// `pmf[k] = Pr(L_n = k)` and `cdf[k] = Pr(L_n <= k)` for `k = 0..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityTable {
    n: usize,
    pmf: Vec<BigRational>,
    cdf: Vec<BigRational>,
    regime: Regime,
}

impl ProbabilityTable {
    /// Builds a table from the cdf `Pr(L_n <= x)`, `x = 0..=n`.
    pub(crate) fn from_cdf(n: usize, cdf: Vec<BigRational>, regime: Regime) -> Self {
        debug_assert_eq!(cdf.len(), n + 1);
        let mut pmf = Vec::with_capacity(n + 1);
        pmf.push(cdf[0].clone());
        for k in 1..=n {
            pmf.push(&cdf[k] - &cdf[k - 1]);
        }
        Self {
            n,
            pmf,
            cdf,
            regime,
        }
    }

    pub(crate) fn from_pmf(n: usize, pmf: Vec<BigRational>, regime: Regime) -> Self {
        debug_assert_eq!(pmf.len(), n + 1);
        let mut cdf = Vec::with_capacity(n + 1);
        let mut acc = BigRational::zero();
        for p in &pmf {
            acc += p;
            cdf.push(acc.clone());
        }
        Self {
            n,
            pmf,
            cdf,
            regime,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn regime(&self) -> &Regime {
        &self.regime
    }

    /// `Pr(L_n = k)`; zero outside `0..=n`.
    pub fn pmf(&self, k: usize) -> BigRational {
        self.pmf.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `Pr(L_n <= k)`; one for `k >= n`.
    pub fn cdf(&self, k: usize) -> BigRational {
        self.cdf.get(k).cloned().unwrap_or_else(BigRational::one)
    }

    /// `Pr(L_n > c)`.
    pub fn upper_tail(&self, c: usize) -> BigRational {
        BigRational::one() - self.cdf(c)
    }

    /// `Pr(L_n >= k)`.
    pub fn at_least(&self, k: usize) -> BigRational {
        match k {
            0 => BigRational::one(),
            k => self.upper_tail(k - 1),
        }
    }

    /// `(k, Pr(L_n = k), Pr(L_n <= k))` for `k = 1..=n`.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &BigRational, &BigRational)> {
        (1..=self.n).map(move |k| (k, &self.pmf[k], &self.cdf[k]))
    }

    /// Critical value of the upper-tail test at level `alpha`.
    pub fn critical_value(
        &self,
        alpha: &BigRational,
        convention: Convention,
    ) -> Result<CriticalValue> {
        check_alpha(alpha)?;
        let c = match convention {
            // Pr(L_n > c) is nonincreasing in c and Pr(L_n > 0) = 1.
            Convention::Standard => (0..=self.n)
                .rev()
                .find(|&c| self.upper_tail(c) >= *alpha)
                .unwrap_or(0),
            Convention::Conservative => (0..=self.n)
                .find(|&c| self.upper_tail(c) <= *alpha)
                .unwrap_or(self.n),
        };
        Ok(CriticalValue {
            n: self.n,
            alpha: alpha.clone(),
            c,
            attained_level: self.upper_tail(c),
            convention,
        })
    }

    /// p-value of an observed longest run.
    ///
    /// Unilateral: `Pr(L_n >= observed)`. Bilateral: twice the smaller tail,
    /// capped at 1.
    pub fn p_value(&self, observed: usize, tail: Tail) -> Result<BigRational> {
        if observed < 1 || observed > self.n {
            return Err(Error::ObservedOutOfRange {
                observed,
                n: self.n,
            });
        }
        let upper = self.at_least(observed);
        Ok(match tail {
            Tail::Unilateral => upper,
            Tail::Bilateral => {
                let lower = self.cdf(observed);
                let doubled = core::cmp::min(upper, lower) * BigRational::from_integer(2.into());
                core::cmp::min(doubled, BigRational::one())
            }
        })
    }
}

fn check_alpha(alpha: &BigRational) -> Result<()> {
    if *alpha <= BigRational::zero() || *alpha >= BigRational::one() {
        return Err(Error::InvalidAlpha);
    }
    Ok(())
}

/// How `c_{n,alpha}` is chosen from the discrete law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Convention {
    /// Largest `c` with `Pr(L_n > c) >= alpha`; size at least `alpha`.
    #[default]
    Standard,
    /// Smallest `c` with `Pr(L_n > c) <= alpha`; size at most `alpha`.
    Conservative,
}

/// One- or two-sided rejection region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Tail {
    /// Reject for long runs: `L_n > c_{n,alpha}`.
    #[default]
    Unilateral,
    /// Reject outside `[c_{n,1-alpha/2}, c_{n,alpha/2}]`.
    Bilateral,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalValue {
    pub n: usize,
    pub alpha: BigRational,
    pub c: usize,
    /// `Pr(L_n > c)` under the null.
    pub attained_level: BigRational,
    pub convention: Convention,
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidLength { n, min });
    }
    Ok(())
}

/// Null law of `L_n` from bounded compositions.
pub fn null_table_by_counting(n: usize) -> Result<ProbabilityTable> {
    check_n(n, 1)?;
    let denom = BigUint::one() << n;
    let mut cdf = vec![BigRational::zero()];
    for x in 1..=n {
        let strings = compositions_prefix(n, x).pop().expect("non-empty") * 2u32;
        cdf.push(ratio(strings, denom.clone()));
    }
    Ok(ProbabilityTable::from_cdf(n, cdf, Regime::Null))
}

/// `critical_value` on a freshly built null table.
pub fn critical_value(
    n: usize,
    alpha: &BigRational,
    convention: Convention,
) -> Result<CriticalValue> {
    null_table_by_counting(n)?.critical_value(alpha, convention)
}

/// `p_value` on a freshly built null table.
pub fn p_value(n: usize, observed: usize, tail: Tail) -> Result<BigRational> {
    null_table_by_counting(n)?.p_value(observed, tail)
}

/// Table from the recursion plus the record of how it was read.
#[derive(Debug, Clone)]
pub struct RiordanTable {
    pub table: ProbabilityTable,
    pub report: DiscrepancyReport,
}

const RIORDAN_PRINTED: &str =
    "(n-1)! Pr(L_n=k) = 2(n-2)! Pr(L_{n-1}=k) - (n-k-2)! Pr(L_{n-k-1}=k) \
     + (n-2)! Pr(L_{n-1}=k-1) - 2(n-3)! Pr(L_{n-2}=k-1) + (n-k-1)! Pr(L_{n-k}=k-1)";
const RIORDAN_RESOLVED: &str =
    "2^(n-1) Pr(L_n=k) = 2 2^(n-2) Pr(L_{n-1}=k) - 2^(n-k-2) Pr(L_{n-k-1}=k) \
     + 2^(n-2) Pr(L_{n-1}=k-1) - 2 2^(n-3) Pr(L_{n-2}=k-1) + 2^(n-k-1) Pr(L_{n-k}=k-1)";
const DOMAIN_PRINTED: &str = "terms Pr(L_m = j) with m < 1 (factorial argument m-1 < 0)";
const DOMAIN_RESOLVED: &str = "terms with m < 1 contribute 0; Pr(L_m = j) = 0 for j < 1 or j > m";

/// Weight attached to `Pr(L_m = .)`: `(m-1)!` as printed, `2^(m-1)` resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Weights {
    Factorial,
    PowerOfTwo,
}

impl Weights {
    // Weight of Pr(L_m = .), m >= 1.
    fn of(self, m: usize) -> BigRational {
        let value = match self {
            Weights::Factorial => (1..m).fold(BigUint::one(), |acc, i| acc * BigUint::from(i)),
            Weights::PowerOfTwo => BigUint::one() << (m - 1),
        };
        BigRational::from_integer(BigInt::from(value))
    }
}

// Right-hand side of the recursion for Pr(L_n = k), n >= 3, 2 <= k <= n,
// solved for Pr(L_n = k). `known[m]` holds Pr(L_m = .) for m < n.
fn riordan_cell(n: usize, k: usize, known: &[Vec<BigRational>], weights: Weights) -> BigRational {
    let pr = |m: i64, j: usize| -> Option<BigRational> {
        if m < 1 {
            return None;
        }
        let m = m as usize;
        Some(known[m].get(j).cloned().unwrap_or_else(BigRational::zero))
    };
    let (ni, ki) = (n as i64, k as i64);
    let terms: [(i64, i64, usize); 5] = [
        (2, ni - 1, k),
        (-1, ni - ki - 1, k),
        (1, ni - 1, k - 1),
        (-2, ni - 2, k - 1),
        (1, ni - ki, k - 1),
    ];
    let mut total = BigRational::zero();
    for (coefficient, m, j) in terms {
        if let Some(p) = pr(m, j) {
            total += BigRational::from_integer(coefficient.into()) * weights.of(m as usize) * p;
        }
    }
    total / weights.of(n)
}

/// Null law of `L_n` from the five-term recursion, `n >= 2`.
///
/// Seeds: `Pr(L_m = 1) = 2^-(m-1)` for all `m`, and `Pr(L_2 = 2) = 1/2`.
/// The recursion is evaluated with weights `2^(m-1)` on `Pr(L_m = .)`
/// (the number of strings of length `m` starting with a given sign); the
/// printed factorial weights are evaluated alongside and every cell where
/// they disagree is recorded as a witness. `report.mismatches` lists cells
/// that disagree with [`null_table_by_counting`].
pub fn null_table_riordan(n: usize) -> Result<RiordanTable> {
    check_n(n, 2)?;
    // known[m][k] = Pr(L_m = k), k = 0..=m.
    let mut known: Vec<Vec<BigRational>> =
        vec![Vec::new(), vec![BigRational::zero(), BigRational::one()]];
    let mut weight_witnesses = Vec::new();
    let mut domain_points = 0usize;

    for m in 2..=n {
        let mut row = vec![BigRational::zero(); m + 1];
        row[1] = ratio(BigUint::one(), BigUint::one() << (m - 1));
        for k in 2..=m {
            if m == 2 {
                row[2] = ratio(BigUint::one(), BigUint::from(2u32));
                continue;
            }
            let resolved = riordan_cell(m, k, &known, Weights::PowerOfTwo);
            let literal = riordan_cell(m, k, &known, Weights::Factorial);
            if (m as i64) - (k as i64) - 1 < 1 {
                domain_points += 1;
            }
            if literal != resolved {
                weight_witnesses.push(Witness {
                    index: vec![m, k],
                    literal: LiteralValue::Rational(literal),
                    resolved: LiteralValue::Rational(resolved.clone()),
                });
            }
            row[k] = resolved;
        }
        known.push(row);
    }

    let pmf = known.pop().expect("n >= 2");
    let table = ProbabilityTable::from_pmf(n, pmf, Regime::Null);
    let reference = null_table_by_counting(n)?;
    let mismatches = (1..=n)
        .filter(|&k| table.pmf(k) != reference.pmf(k))
        .map(|k| Witness {
            index: vec![n, k],
            literal: LiteralValue::Rational(table.pmf(k)),
            resolved: LiteralValue::Rational(reference.pmf(k)),
        })
        .collect();

    let mut report = DiscrepancyReport {
        resolutions: Vec::new(),
        mismatches,
    };
    report.resolutions.push(Resolution {
        item: String::from("recursion domain"),
        literal: String::from(DOMAIN_PRINTED),
        resolved: String::from(DOMAIN_RESOLVED),
        failing_points: domain_points,
        witnesses: Vec::new(),
    });
    if !weight_witnesses.is_empty() {
        report.resolutions.push(Resolution {
            item: format!("term weights (cells n <= {n})"),
            literal: String::from(RIORDAN_PRINTED),
            resolved: String::from(RIORDAN_RESOLVED),
            failing_points: weight_witnesses.len(),
            witnesses: weight_witnesses,
        });
    }
    Ok(RiordanTable { table, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn pmf_vec(t: &ProbabilityTable) -> Vec<BigRational> {
        (1..=t.n()).map(|k| t.pmf(k)).collect()
    }

    #[test]
    fn counting_examples() {
        assert_eq!(
            pmf_vec(&null_table_by_counting(3).unwrap()),
            [q(1, 4), q(1, 2), q(1, 4)]
        );
        assert_eq!(
            pmf_vec(&null_table_by_counting(4).unwrap()),
            [q(1, 8), q(1, 2), q(1, 4), q(1, 8)]
        );
        assert_eq!(pmf_vec(&null_table_by_counting(1).unwrap()), [q(1, 1)]);
        for n in 1..=40 {
            let t = null_table_by_counting(n).unwrap();
            assert_eq!(t.pmf(1), q(1, 1 << (n - 1)));
            assert_eq!(t.pmf(n), q(1, 1 << (n - 1)));
            assert_eq!(t.cdf(n), q(1, 1));
            let total: BigRational = (0..=n).map(|k| t.pmf(k)).sum();
            assert_eq!(total, q(1, 1));
            assert!((1..=n).all(|k| t.cdf(k - 1) <= t.cdf(k)));
        }
        assert!(null_table_by_counting(0).is_err());
    }

    #[test]
    fn riordan_examples() {
        let r = null_table_riordan(2).unwrap();
        assert_eq!(pmf_vec(&r.table), [q(1, 2), q(1, 2)]);
        let r = null_table_riordan(5).unwrap();
        assert_eq!(
            pmf_vec(&r.table),
            [q(1, 16), q(7, 16), q(5, 16), q(1, 8), q(1, 16)]
        );
        assert!(r.report.is_consistent());
        assert_eq!(null_table_riordan(10).unwrap().table.pmf(1), q(1, 512));
        assert!(null_table_riordan(1).is_err());
    }

    #[test]
    fn riordan_weights_are_recorded() {
        let r = null_table_riordan(6).unwrap();
        let weights = r
            .report
            .resolutions
            .iter()
            .find(|r| r.item.starts_with("term weights"))
            .unwrap();
        // Factorial weights fail at (4, 2): 1/3 against 1/2.
        let w = weights
            .witnesses
            .iter()
            .find(|w| w.index == [4, 2])
            .unwrap();
        assert_eq!(w.literal, LiteralValue::Rational(q(1, 3)));
        assert_eq!(w.resolved, LiteralValue::Rational(q(1, 2)));
    }

    #[test]
    fn critical_value_examples() {
        let t = null_table_by_counting(5).unwrap();
        let cv = t.critical_value(&q(1, 4), Convention::Standard).unwrap();
        assert_eq!((cv.c, cv.attained_level), (2, q(1, 2)));
        let cv = t
            .critical_value(&q(1, 4), Convention::Conservative)
            .unwrap();
        assert_eq!((cv.c, cv.attained_level), (3, q(3, 16)));
        let cv = t
            .critical_value(&q(999_999, 1_000_000), Convention::Standard)
            .unwrap();
        assert_eq!((cv.c, cv.attained_level), (0, q(1, 1)));
        let cv = t
            .critical_value(&q(1, 1_000_000), Convention::Conservative)
            .unwrap();
        assert_eq!((cv.c, cv.attained_level), (5, q(0, 1)));
        assert_eq!(
            t.critical_value(&q(0, 1), Convention::Standard),
            Err(Error::InvalidAlpha)
        );
        assert_eq!(
            t.critical_value(&q(1, 1), Convention::Standard),
            Err(Error::InvalidAlpha)
        );
    }

    #[test]
    fn p_value_examples() {
        assert_eq!(p_value(5, 4, Tail::Unilateral).unwrap(), q(6, 32));
        assert_eq!(p_value(5, 1, Tail::Unilateral).unwrap(), q(1, 1));
        assert_eq!(p_value(4, 4, Tail::Unilateral).unwrap(), q(1, 8));
        // n=5: Pr(L >= 4) = 3/16, Pr(L <= 4) = 15/16.
        assert_eq!(p_value(5, 4, Tail::Bilateral).unwrap(), q(3, 8));
        // Pr(L >= 2) = 15/16, Pr(L <= 2) = 1/2: doubled tail hits the cap.
        assert_eq!(p_value(5, 2, Tail::Bilateral).unwrap(), q(1, 1));
        assert_eq!(
            p_value(5, 6, Tail::Unilateral),
            Err(Error::ObservedOutOfRange { observed: 6, n: 5 })
        );
        assert!(p_value(5, 0, Tail::Unilateral).is_err());
    }

    #[test]
    fn critical_value_monotone_in_alpha() {
        let alphas: Vec<BigRational> = (1..=50).map(|i| q(i, 100)).collect();
        for n in 1..=20 {
            let t = null_table_by_counting(n).unwrap();
            for convention in [Convention::Standard, Convention::Conservative] {
                let cs: Vec<usize> = alphas
                    .iter()
                    .map(|a| t.critical_value(a, convention).unwrap().c)
                    .collect();
                assert!(
                    cs.windows(2).all(|w| w[0] >= w[1]),
                    "n={n} {convention:?}: {cs:?}"
                );
            }
        }
    }
}
