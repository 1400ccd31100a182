mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use treecast::autocorr::pacf;
use treecast::cart::{fit_tree, TreeParams};
use treecast::eval::mase;
use treecast::trend::{kpss_lags, kpss_level};
use treecast::{TimeSeries, TrainingSet};

fn training_set(features: Vec<Vec<f64>>, targets: Vec<f64>) -> TrainingSet {
    let names = (0..features[0].len()).map(|j| format!("x{j}")).collect();
    TrainingSet::from_rows(names, features, targets).unwrap()
}

#[test]
fn pacf_matches_yule_walker() {
    let mut r = rng(11);
    for i in 0..40 {
        let x = if i % 2 == 0 { ar1(&mut r, 0.6, 120) } else { white_noise(&mut r, 80) };
        let got = pacf(&x, 12).unwrap();
        let want = yule_walker_pacf(&x, 12);
        for (k, (a, b)) in got.iter().zip(&want).enumerate() {
            assert!((a - b).abs() < 1e-10, "series {i} lag {}: {a} vs {b}", k + 1);
        }
    }
}

#[test]
fn kpss_matches_direct_formula() {
    let mut r = rng(12);
    for n in [10usize, 25, 60, 150, 400] {
        let x = ar1(&mut r, 0.5, n);
        let got = kpss_level(&x);
        assert_eq!(got.lags, kpss_lags(n));
        assert!((got.statistic - kpss_statistic(&x, got.lags)).abs() < 1e-10);
    }
}

#[test]
fn kpss_matches_frozen_reference_values() {
    // statsmodels kpss(x, regression="c", nlags=floor(4 (n/100)^0.25))
    for (n, lags, expected) in [
        (50, 3, 0.2653120822894904),
        (120, 4, 1.240645984348315),
        (300, 5, 4.522970616771074),
    ] {
        let x = kpss_reference_series(n);
        let got = kpss_level(&x);
        assert_eq!(got.lags, lags);
        assert!((got.statistic - expected).abs() < 1e-10, "n={n}: {}", got.statistic);
    }
}

#[test]
fn root_split_matches_exhaustive_search_with_buckets() {
    let mut r = rng(13);
    for case in 0..300 {
        let (features, targets) = split_dataset(&mut r);
        let min_bucket = r.random_range(1..=4);
        let params = TreeParams {
            min_split: 2 * min_bucket,
            min_bucket,
            max_depth: 1,
            cp: 0.0,
        };
        let ts = training_set(features.clone(), targets.clone());
        let tree = fit_tree(&ts, &params, None).unwrap();
        let got = tree.root().split.as_ref().map(|s| (s.feature, s.threshold));
        let want = if targets.len() >= 2 * min_bucket {
            brute_force_root_split(&features, &targets, min_bucket).map(|(f, t, _)| (f, t))
        } else {
            None
        };
        assert_eq!(got, want, "case {case}");
    }
}

#[test]
fn mase_matches_definition() {
    let mut r = rng(14);
    for _ in 0..100 {
        let f = [1usize, 4, 12][r.random_range(0..3)];
        let n = f + r.random_range(2..40);
        let h = r.random_range(1..10);
        let train = white_noise(&mut r, n);
        let actuals = white_noise(&mut r, h);
        let fc = white_noise(&mut r, h);
        let ts = TimeSeries::with_frequency(train.clone(), f).unwrap();
        let got = mase(&ts, &actuals, &fc).unwrap();
        let want = brute_force_mase(&train, f, &actuals, &fc);
        assert!((got - want).abs() < 1e-12 * want.max(1.0));
    }
}

proptest! {
    #[test]
    fn first_partial_is_first_autocorrelation(x in prop::collection::vec(-100.0f64..100.0, 5..60)) {
        prop_assume!(x.iter().any(|v| *v != x[0]));
        let p = pacf(&x, 3).unwrap();
        prop_assert!((p[0] - autocorrelation(&x, 1)).abs() < 1e-12);
    }
}
