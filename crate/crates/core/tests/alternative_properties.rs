use longrun_core::alternative_power::power_with_null;
use longrun_core::rational::{parse_rational, to_f64};
use longrun_core::{
    alt_cdf, convergence_report, null_table_by_counting, AlternativeSpec, BigRational, Convention,
    Tail,
};
use proptest::prelude::*;

fn spec(p: &BigRational) -> AlternativeSpec {
    AlternativeSpec::direct(p.clone()).unwrap()
}

fn grid() -> Vec<BigRational> {
    (10..=19)
        .map(|i| BigRational::new(i.into(), 20.into()))
        .collect()
}

#[test]
fn alt_cdf_reduces_to_null_at_one_half() {
    let half = spec(&parse_rational("1/2").unwrap());
    for n in 1..=30 {
        let null = null_table_by_counting(n).unwrap();
        for x in 0..=n {
            assert_eq!(alt_cdf(n, x, &half).unwrap(), null.cdf(x), "n={n} x={x}");
        }
    }
}

#[test]
fn alt_cdf_symmetric_and_monotone() {
    for p in grid() {
        let a = spec(&p);
        let b = a.complement();
        for n in 1..=20 {
            let mut prev = BigRational::from_integer(0.into());
            for x in 0..=n {
                let v = alt_cdf(n, x, &a).unwrap();
                assert_eq!(v, alt_cdf(n, x, &b).unwrap());
                assert!(v >= prev);
                prev = v;
            }
            assert_eq!(prev, BigRational::from_integer(1.into()));
        }
    }
}

#[test]
fn power_behaves_on_the_grid() {
    let alpha = parse_rational("0.05").unwrap();
    for n in 2..=20 {
        let null = null_table_by_counting(n).unwrap();
        for convention in [Convention::Standard, Convention::Conservative] {
            for tail in [Tail::Unilateral, Tail::Bilateral] {
                let powers: Vec<BigRational> = grid()
                    .iter()
                    .map(|p| {
                        power_with_null(&null, &alpha, tail, convention, &spec(p))
                            .unwrap()
                            .power
                    })
                    .collect();
                let at_half =
                    power_with_null(&null, &alpha, tail, convention, &spec(&grid()[0])).unwrap();
                assert_eq!(at_half.power, at_half.size);
                for p in grid() {
                    let up = power_with_null(&null, &alpha, tail, convention, &spec(&p)).unwrap();
                    let down =
                        power_with_null(&null, &alpha, tail, convention, &spec(&p).complement())
                            .unwrap();
                    assert_eq!(up.power, down.power);
                }
                if tail == Tail::Unilateral {
                    assert!(
                        powers.windows(2).all(|w| w[0] <= w[1]),
                        "n={n} {convention:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn convergence_trend_for_biased_signs() {
    let n_grid = [50, 100, 200, 400];
    for p in ["0.6", "0.7", "0.8", "0.9"] {
        let report = convergence_report(5, &parse_rational(p).unwrap(), &n_grid).unwrap();
        let diffs: Vec<f64> = report.rows.iter().map(|r| to_f64(&r.difference)).collect();
        assert!(report.strictly_decreasing(), "p={p}: {diffs:?}");
        let factor = report.shrink_factor().unwrap();
        assert!(
            factor >= BigRational::from_integer(10.into()),
            "p={p}: {diffs:?}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn alt_cdf_bounded_by_one_sided(n in 1usize..40, num in 1i64..99, k_frac in 0.0f64..1.0) {
        let p = BigRational::new(num.into(), 100.into());
        let k = ((n as f64) * k_frac) as usize;
        let a = alt_cdf(n, k, &spec(&p)).unwrap();
        let dominant = if num >= 50 { p.clone() } else { BigRational::from_integer(1.into()) - &p };
        let b = longrun_core::plus_run_cdf(n, k, &dominant).unwrap();
        prop_assert!(a <= b);
    }
}
