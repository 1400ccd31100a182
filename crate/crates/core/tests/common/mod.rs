//! Reference implementations and data generators shared by the integration
//! and acceptance tests. Each oracle is written directly from its textbook
//! definition and shares no code with the library.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

/// Biased sample autocorrelation at `lag`, two-pass.
pub fn autocorrelation(x: &[f64], lag: usize) -> f64 {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let mut num = 0.0;
    for t in lag..n {
        num += (x[t] - mean) * (x[t - lag] - mean);
    }
    let mut den = 0.0;
    for v in x {
        den += (v - mean) * (v - mean);
    }
    num / den
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            let pivot_row = a[col].clone();
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x
}

/// Partial autocorrelation at each lag `1..=max_lag`: the last coefficient
/// of the order-k Yule-Walker system.
pub fn yule_walker_pacf(x: &[f64], max_lag: usize) -> Vec<f64> {
    let r: Vec<f64> = (0..=max_lag).map(|k| autocorrelation(x, k)).collect();
    (1..=max_lag)
        .map(|k| {
            let a = (0..k)
                .map(|i| (0..k).map(|j| r[i.abs_diff(j)]).collect())
                .collect();
            let b = r[1..=k].to_vec();
            solve(a, b)[k - 1]
        })
        .collect()
}

/// KPSS level statistic with a Bartlett long-run variance and `lags` lags.
pub fn kpss_statistic(x: &[f64], lags: usize) -> f64 {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let e: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let mut eta = 0.0;
    for t in 0..n {
        let s: f64 = e[..=t].iter().sum();
        eta += s * s;
    }
    eta /= (n as f64).powi(2);
    let mut s2 = 0.0;
    for s in 0..=lags {
        let mut gamma = 0.0;
        for t in s..n {
            gamma += e[t] * e[t - s];
        }
        let w = if s == 0 { 1.0 } else { 2.0 * (1.0 - s as f64 / (lags as f64 + 1.0)) };
        s2 += w * gamma;
    }
    s2 /= n as f64;
    eta / s2
}

/// Deterministic series for the frozen KPSS reference values:
/// `sin(0.3 t) + 0.02 t + 0.5 cos(1.7 t)` for `t = 1..=n`.
pub fn kpss_reference_series(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|t| {
            let t = t as f64;
            (0.3 * t).sin() + 0.02 * t + 0.5 * (1.7 * t).cos()
        })
        .collect()
}

/// Exhaustive best root split as `(feature, threshold, gain)`: every feature,
/// every midpoint between consecutive distinct values, both children holding
/// at least `min_bucket` rows. Ties within `1e-12 * node SSE` go to the lowest
/// feature, then the smallest threshold.
pub fn brute_force_root_split(
    features: &[Vec<f64>],
    targets: &[f64],
    min_bucket: usize,
) -> Option<(usize, f64, f64)> {
    fn sse(values: &[f64]) -> f64 {
        let m = values.iter().sum::<f64>() / values.len() as f64;
        values.iter().map(|v| (v - m) * (v - m)).sum()
    }
    let node_sse = sse(targets);
    let p = features[0].len();
    let mut all = Vec::new();
    for f in 0..p {
        let mut distinct: Vec<f64> = features.iter().map(|r| r[f]).collect();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        for w in distinct.windows(2) {
            let thr = (w[0] + w[1]) / 2.0;
            let left: Vec<f64> = (0..targets.len()).filter(|&i| features[i][f] < thr).map(|i| targets[i]).collect();
            let right: Vec<f64> = (0..targets.len()).filter(|&i| features[i][f] >= thr).map(|i| targets[i]).collect();
            if left.len() < min_bucket || right.len() < min_bucket {
                continue;
            }
            all.push((f, thr, node_sse - sse(&left) - sse(&right)));
        }
    }
    let best = all.iter().map(|c| c.2).fold(f64::NEG_INFINITY, f64::max);
    if best.is_nan() || best <= 1e-12 * node_sse {
        return None;
    }
    all.into_iter().find(|c| c.2 >= best - 1e-12 * node_sse)
}

/// MASE straight from its definition.
pub fn brute_force_mase(train: &[f64], frequency: usize, actuals: &[f64], forecast: &[f64]) -> f64 {
    let mut mae = 0.0;
    for i in 0..actuals.len() {
        mae += (actuals[i] - forecast[i]).abs();
    }
    mae /= actuals.len() as f64;
    let mut scale = 0.0;
    for t in frequency..train.len() {
        scale += (train[t] - train[t - frequency]).abs();
    }
    scale /= (train.len() - frequency) as f64;
    mae / scale
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn white_noise(rng: &mut StdRng, n: usize) -> Vec<f64> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    (0..n).map(|_| normal.sample(rng)).collect()
}

/// Stationary AR(1) with unit innovations, after a 100-step burn-in.
pub fn ar1(rng: &mut StdRng, phi: f64, n: usize) -> Vec<f64> {
    let e = white_noise(rng, n + 100);
    let mut x = vec![0.0; n + 100];
    for t in 1..x.len() {
        x[t] = phi * x[t - 1] + e[t];
    }
    x.split_off(100)
}

/// Random walk starting at 100 with a drift of magnitude in [0.5, 1.5]
/// (random sign) and unit Gaussian steps.
pub fn random_walk_with_drift(rng: &mut StdRng, n: usize) -> Vec<f64> {
    let drift = rng.random_range(0.5..1.5) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let steps = white_noise(rng, n);
    let mut level = 100.0;
    steps
        .into_iter()
        .map(|e| {
            level += drift + e;
            level
        })
        .collect()
}

/// Quarterly series: level around 100, a random zero-mean seasonal profile
/// with amplitude up to 20 and Gaussian noise with standard deviation 2.
pub fn seasonal_quarterly(rng: &mut StdRng, n: usize) -> Vec<f64> {
    let level = rng.random_range(50.0..150.0);
    let mut profile: Vec<f64> = (0..4).map(|_| rng.random_range(-20.0..20.0)).collect();
    let centre = profile.iter().sum::<f64>() / 4.0;
    profile.iter_mut().for_each(|v| *v -= centre);
    let noise = Normal::new(0.0, 2.0).unwrap();
    (0..n).map(|t| level + profile[t % 4] + noise.sample(rng)).collect()
}

/// Small datasets with integer features to provoke tied splits.
pub fn split_dataset(rng: &mut StdRng) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = rng.random_range(2..=30);
    let p = rng.random_range(1..=3);
    let continuous = rng.random_bool(0.5);
    let value = |rng: &mut StdRng| {
        if continuous {
            rng.random_range(-10.0..10.0)
        } else {
            rng.random_range(0..6) as f64
        }
    };
    let features = (0..n).map(|_| (0..p).map(|_| value(rng)).collect()).collect();
    let targets = (0..n).map(|_| value(rng)).collect();
    (features, targets)
}
