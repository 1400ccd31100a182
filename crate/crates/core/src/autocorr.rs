//! Sample autocorrelation and partial autocorrelation.

/// Autocorrelations `r_0..=r_max_lag` of the demeaned series with the
/// biased (1/T) normalization. `None` when the series has zero variance.
pub fn acf(values: &[f64], max_lag: usize) -> Option<Vec<f64>> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let c0: f64 = centered.iter().map(|v| v * v).sum();
    if c0 == 0.0 {
        return None;
    }
    Some(
        (0..=max_lag.min(n - 1))
            .map(|k| {
                centered[k..]
                    .iter()
                    .zip(&centered)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    / c0
            })
            .collect(),
    )
}

/// Partial autocorrelations for lags `1..=max_lag` via the Durbin-Levinson
/// recursion. Element `k - 1` holds the lag-`k` value.
pub fn pacf(values: &[f64], max_lag: usize) -> Option<Vec<f64>> {
    let r = acf(values, max_lag)?;
    let max_lag = r.len() - 1;
    let mut out = Vec::with_capacity(max_lag);
    let mut phi: Vec<f64> = Vec::with_capacity(max_lag);
    for k in 1..=max_lag {
        let num = r[k] - (1..k).map(|j| phi[j - 1] * r[k - j]).sum::<f64>();
        let den = 1.0 - (1..k).map(|j| phi[j - 1] * r[j]).sum::<f64>();
        let kk = if den.abs() < f64::EPSILON { 0.0 } else { num / den };
        let previous = phi.clone();
        for j in 1..k {
            phi[j - 1] = previous[j - 1] - kk * previous[k - j - 1];
        }
        phi.push(kk);
        out.push(kk);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_partial_equals_first_autocorrelation() {
        let x = [1.0, 3.0, 2.0, 5.0, 4.0, 6.0, 5.5, 7.0];
        let r = acf(&x, 3).unwrap();
        let p = pacf(&x, 3).unwrap();
        assert_eq!(r[0], 1.0);
        assert!((p[0] - r[1]).abs() < 1e-15);
    }

    #[test]
    fn constant_series_has_no_autocorrelation() {
        assert!(acf(&[2.0; 10], 3).is_none());
        assert!(pacf(&[2.0; 10], 3).is_none());
    }

    #[test]
    fn max_lag_is_clamped() {
        let p = pacf(&[1.0, 2.0, 0.0, 1.5], 10).unwrap();
        assert_eq!(p.len(), 3);
    }
}
