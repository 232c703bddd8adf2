//! Running the test on a residual series.

use longrun_core::alternative_power::CriticalRegion;
use longrun_core::rational::to_decimal;
use longrun_core::{
    longest_runs, BigRational, Convention, ProbabilityTable, ResidualSeries, ResidualSource,
    RunSummary, Tail, ZeroPolicy,
};
use serde::Serialize;

use crate::cache::TableCache;
use crate::render::{csv_cells, text_lines, Prob, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestConfig {
    pub alpha: BigRational,
    pub tail: Tail,
    pub convention: Convention,
    pub zero_policy: ZeroPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Reject,
    FailToReject,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub n_input: usize,
    pub n_effective: usize,
    /// Ordered positions of residuals dropped for being exactly zero.
    pub zero_positions: Vec<usize>,
    pub source: ResidualSource,
    pub statistic: RunSummary,
    pub p_value: BigRational,
    pub config: TestConfig,
    pub critical_region: CriticalRegion,
    /// Exact null probability of the rejection region.
    pub size: BigRational,
    pub decision: Decision,
}

/// Runs the test with tables from the process-wide cache.
pub fn run_test(series: &ResidualSeries, config: &TestConfig) -> longrun_core::Result<TestReport> {
    run_test_with(series, config, TableCache::global())
}

pub fn run_test_with(
    series: &ResidualSeries,
    config: &TestConfig,
    cache: &TableCache,
) -> longrun_core::Result<TestReport> {
    let signs = series.signs(config.zero_policy)?;
    let statistic = longest_runs(&signs)?;
    let null = cache.null_table(signs.len())?;
    let critical_region =
        CriticalRegion::from_null(&null, &config.alpha, config.tail, config.convention)?;
    let p_value = null.p_value(statistic.l_n, config.tail)?;
    let decision = if critical_region.contains(statistic.l_n) {
        Decision::Reject
    } else {
        Decision::FailToReject
    };
    Ok(TestReport {
        n_input: series.len(),
        n_effective: signs.len(),
        zero_positions: signs.zero_positions().to_vec(),
        source: series.source(),
        statistic,
        p_value,
        config: config.clone(),
        size: critical_region.size(&null),
        critical_region,
        decision,
    })
}

impl TestReport {
    /// Whether the decision agrees with the tail probability that governs
    /// the configured one-sided rejection rule.
    ///
    /// Conservative: reject iff `Pr(L_n >= observed) <= alpha`. Standard: reject
    /// iff `Pr(L_n > observed) < alpha`. Bilateral tests check each tail
    /// against `alpha / 2`; the lower tail uses `Pr(L_n <= observed) < alpha/2`
    /// (conservative) or `Pr(L_n <= observed + 1) <= alpha/2` (standard).
    pub fn decision_matches_tail_rule(&self, null: &ProbabilityTable) -> bool {
        let l = self.statistic.l_n;
        let alpha = &self.config.alpha;
        let half = alpha / BigRational::from_integer(2.into());
        let upper_rule = |level: &BigRational| match self.config.convention {
            Convention::Conservative => null.at_least(l) <= *level,
            Convention::Standard => null.upper_tail(l) < *level,
        };
        // Lower region L < c_{n,1-alpha/2}.
        let lower_rule = |level: &BigRational| match self.config.convention {
            Convention::Conservative => null.cdf(l) < *level,
            Convention::Standard => null.cdf(l + 1) <= *level,
        };
        let reject = match self.config.tail {
            Tail::Unilateral => upper_rule(alpha),
            Tail::Bilateral => upper_rule(&half) || lower_rule(&half),
        };
        reject == (self.decision == Decision::Reject)
    }

    fn p_value_rule(&self) -> &'static str {
        match self.config.tail {
            Tail::Unilateral => "Pr(L_n >= observed)",
            Tail::Bilateral => "min(1, 2 min(Pr(L_n >= observed), Pr(L_n <= observed)))",
        }
    }

    fn region_text(&self) -> String {
        match self.critical_region {
            CriticalRegion::Upper { upper } => format!("L > {upper}"),
            CriticalRegion::TwoSided { lower, upper } => format!("L < {lower} or L > {upper}"),
        }
    }

    pub fn to_json_value(&self, precision: usize) -> impl Serialize + '_ {
        JsonReport {
            schema: SCHEMA_VERSION,
            command: "test",
            n_input: self.n_input,
            n_effective: self.n_effective,
            dropped_zeros: self.zero_positions.len(),
            zero_positions: &self.zero_positions,
            statistic: self.statistic,
            p_value: Prob::new(&self.p_value, precision),
            p_value_rule: self.p_value_rule(),
            alpha: Prob::new(&self.config.alpha, precision),
            tail: self.config.tail,
            convention: self.config.convention,
            critical_region: self.critical_region,
            size: Prob::new(&self.size, precision),
            decision: self.decision,
            config: JsonConfig {
                source: self.source,
                zero_policy: self.config.zero_policy,
                precision,
            },
        }
    }

    pub fn to_csv(&self, precision: usize) -> String {
        let (lower, upper) = match self.critical_region {
            CriticalRegion::Upper { upper } => (String::new(), upper),
            CriticalRegion::TwoSided { lower, upper } => (lower.to_string(), upper),
        };
        format!(
            "n_effective,dropped_zeros,l_plus,l_minus,l_n,k,p_value_num,p_value_den,p_value,alpha,tail,convention,c_lower,c_upper,decision\n\
             {},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            self.n_effective,
            self.zero_positions.len(),
            self.statistic.l_plus,
            self.statistic.l_minus,
            self.statistic.l_n,
            self.statistic.k,
            csv_cells(&self.p_value, precision),
            to_decimal(&self.config.alpha, precision),
            tail_name(self.config.tail),
            convention_name(self.config.convention),
            lower,
            upper,
            decision_name(self.decision),
        )
    }

    pub fn to_text(&self, precision: usize) -> String {
        let s = &self.statistic;
        let decision = match self.decision {
            Decision::Reject => "reject H0",
            Decision::FailToReject => "fail to reject H0",
        };
        text_lines(&[
            (
                "observations",
                format!(
                    "{} ({} zero residuals dropped)",
                    self.n_effective,
                    self.zero_positions.len()
                ),
            ),
            (
                "longest runs",
                format!(
                    "L+ = {}, L- = {}, L = {} ({} positive)",
                    s.l_plus, s.l_minus, s.l_n, s.k
                ),
            ),
            (
                "rejection region",
                format!(
                    "{} ({} tail, {} convention, size {})",
                    self.region_text(),
                    tail_name(self.config.tail),
                    convention_name(self.config.convention),
                    to_decimal(&self.size, precision)
                ),
            ),
            (
                "p-value",
                format!(
                    "{} = {}",
                    self.p_value_rule(),
                    to_decimal(&self.p_value, precision)
                ),
            ),
            (
                "decision",
                format!(
                    "{decision} at alpha = {}",
                    to_decimal(&self.config.alpha, precision)
                ),
            ),
        ])
    }
}

pub fn tail_name(tail: Tail) -> &'static str {
    match tail {
        Tail::Unilateral => "unilateral",
        Tail::Bilateral => "bilateral",
    }
}

pub fn convention_name(convention: Convention) -> &'static str {
    match convention {
        Convention::Standard => "standard",
        Convention::Conservative => "conservative",
    }
}

fn decision_name(decision: Decision) -> &'static str {
    match decision {
        Decision::Reject => "reject",
        Decision::FailToReject => "fail_to_reject",
    }
}

#[derive(Serialize)]
struct JsonConfig {
    source: ResidualSource,
    zero_policy: ZeroPolicy,
    precision: usize,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    schema: u32,
    command: &'static str,
    n_input: usize,
    n_effective: usize,
    dropped_zeros: usize,
    zero_positions: &'a [usize],
    statistic: RunSummary,
    p_value: Prob,
    p_value_rule: &'static str,
    alpha: Prob,
    tail: Tail,
    convention: Convention,
    critical_region: CriticalRegion,
    size: Prob,
    decision: Decision,
    config: JsonConfig,
}

#[cfg(test)]
mod tests {
    use super::*;
    use longrun_core::rational::parse_rational;
    use proptest::prelude::*;

    fn series(residuals: &[f64]) -> ResidualSeries {
        let x: Vec<f64> = (0..residuals.len()).map(|i| i as f64).collect();
        ResidualSeries::from_residuals(&x, residuals).unwrap()
    }

    fn config(alpha: &str, tail: Tail, convention: Convention) -> TestConfig {
        TestConfig {
            alpha: parse_rational(alpha).unwrap(),
            tail,
            convention,
            zero_policy: ZeroPolicy::Error,
        }
    }

    #[test]
    fn small_example() {
        let report = run_test(
            &series(&[1.0, 1.0, 1.0, 1.0, -1.0]),
            &config("1/4", Tail::Unilateral, Convention::Standard),
        )
        .unwrap();
        assert_eq!(report.statistic.l_n, 4);
        assert_eq!(report.p_value, parse_rational("3/16").unwrap());
        assert_eq!(report.critical_region, CriticalRegion::Upper { upper: 2 });
        assert_eq!(report.decision, Decision::Reject);
    }

    #[test]
    fn zeros_are_dropped_on_request() {
        let mut cfg = config("0.05", Tail::Unilateral, Convention::Standard);
        assert!(run_test(&series(&[1.0, 0.0, -1.0]), &cfg).is_err());
        cfg.zero_policy = ZeroPolicy::Drop;
        let report = run_test(&series(&[1.0, 0.0, -1.0, -2.0]), &cfg).unwrap();
        assert_eq!(report.n_input, 4);
        assert_eq!(report.n_effective, 3);
        assert_eq!(report.zero_positions, vec![1]);
    }

    proptest! {
        #[test]
        fn decision_agrees_with_tail_rule(
            bits in proptest::collection::vec(any::<bool>(), 2..40),
            alpha_pct in 1u32..60,
            bilateral in any::<bool>(),
            conservative in any::<bool>(),
        ) {
            let residuals: Vec<f64> = bits.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect();
            let tail = if bilateral { Tail::Bilateral } else { Tail::Unilateral };
            let convention = if conservative { Convention::Conservative } else { Convention::Standard };
            let cfg = config(&format!("{alpha_pct}/100"), tail, convention);
            let report = run_test(&series(&residuals), &cfg).unwrap();
            let null = TableCache::global().null_table(bits.len()).unwrap();
            prop_assert!(report.decision_matches_tail_rule(&null));
            if conservative && !bilateral {
                prop_assert_eq!(report.decision == Decision::Reject, report.p_value <= cfg.alpha);
            }
        }
    }
}
