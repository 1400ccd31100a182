//! Strategies for trending series.
//!
//! * additive: targets (and optionally features) have the mean of their
//!   feature vector subtracted; forecasts get the input window mean added back.
//! * multiplicative: the same with division and multiplication.
//! * differences: the model is trained on a differenced series and the
//!   forecasts are integrated back at the end.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{TimeSeries, TrainingSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendKind {
    None,
    Additive,
    Multiplicative,
    Differences,
}

impl TrendKind {
    pub fn name(self) -> &'static str {
        match self {
            TrendKind::None => "none",
            TrendKind::Additive => "additive",
            TrendKind::Multiplicative => "multiplicative",
            TrendKind::Differences => "differences",
        }
    }
}

impl std::str::FromStr for TrendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(TrendKind::None),
            "additive" => Ok(TrendKind::Additive),
            "multiplicative" => Ok(TrendKind::Multiplicative),
            "differences" => Ok(TrendKind::Differences),
            other => Err(Error::InvalidParams(format!("unknown trend `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSpec {
    pub kind: TrendKind,
    /// Only meaningful for additive and multiplicative.
    pub transform_features: bool,
    /// Only meaningful for differences.
    pub n_diff: usize,
    /// `last_values[k]` is the last value of the series differenced `k` times.
    pub last_values: Vec<f64>,
}

impl TrendSpec {
    pub fn none() -> Self {
        TrendSpec {
            kind: TrendKind::None,
            transform_features: false,
            n_diff: 0,
            last_values: Vec::new(),
        }
    }

    pub fn additive(transform_features: bool) -> Self {
        TrendSpec {
            kind: TrendKind::Additive,
            transform_features,
            ..Self::none()
        }
    }

    pub fn multiplicative(transform_features: bool) -> Self {
        TrendSpec {
            kind: TrendKind::Multiplicative,
            transform_features,
            ..Self::none()
        }
    }

    fn features_transformed(&self) -> bool {
        self.transform_features
            && matches!(self.kind, TrendKind::Additive | TrendKind::Multiplicative)
    }

    /// Human-readable policy, e.g. "additive transformation applied to features and targets".
    pub fn describe(&self) -> String {
        let scope = if self.transform_features {
            "features and targets"
        } else {
            "targets"
        };
        match self.kind {
            TrendKind::None => "no trend transformation".into(),
            TrendKind::Additive => format!("additive transformation applied to {scope}"),
            TrendKind::Multiplicative => format!("multiplicative transformation applied to {scope}"),
            TrendKind::Differences => match self.n_diff {
                1 => "1 first difference".into(),
                d => format!("{d} first differences"),
            },
        }
    }
}

/// Applies the additive or multiplicative transform to every example.
pub fn transform_examples(ts: &TrainingSet, spec: &TrendSpec) -> Result<TrainingSet> {
    let mut out = ts.clone();
    match spec.kind {
        TrendKind::None | TrendKind::Differences => {}
        TrendKind::Additive => {
            for (i, m) in ts.row_feature_means.iter().enumerate() {
                out.targets[i] -= m;
                if spec.transform_features {
                    out.features[i].iter_mut().for_each(|v| *v -= m);
                }
            }
        }
        TrendKind::Multiplicative => {
            for (i, m) in ts.row_feature_means.iter().enumerate() {
                if *m == 0.0 {
                    return Err(Error::ZeroFeatureMean { row: i });
                }
                out.targets[i] /= m;
                if spec.transform_features {
                    out.features[i].iter_mut().for_each(|v| *v /= m);
                }
            }
        }
    }
    Ok(out)
}

/// Transforms a forecast-time input window the way training features were.
///
/// Returns `None` for a multiplicative spec when the window mean is zero.
pub fn transform_window(window: &[f64], window_mean: f64, spec: &TrendSpec) -> Option<Vec<f64>> {
    if !spec.features_transformed() {
        return Some(window.to_vec());
    }
    match spec.kind {
        TrendKind::Additive => Some(window.iter().map(|v| v - window_mean).collect()),
        TrendKind::Multiplicative if window_mean != 0.0 => {
            Some(window.iter().map(|v| v / window_mean).collect())
        }
        _ => None,
    }
}

pub fn back_transform_forecast(raw_prediction: f64, input_window_mean: f64, spec: &TrendSpec) -> f64 {
    match spec.kind {
        TrendKind::None | TrendKind::Differences => raw_prediction,
        TrendKind::Additive => raw_prediction + input_window_mean,
        TrendKind::Multiplicative => raw_prediction * input_window_mean,
    }
}

fn first_difference(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Differences `series` `d` times, keeping what [`integrate`] needs.
pub fn difference(series: &TimeSeries, d: usize) -> Result<(TimeSeries, TrendSpec)> {
    if series.len() <= d {
        return Err(Error::SeriesTooShort {
            needed: d,
            got: series.len(),
        });
    }
    let mut values = series.values().to_vec();
    let mut last_values = Vec::with_capacity(d);
    for _ in 0..d {
        last_values.push(*values.last().expect("nonempty"));
        values = first_difference(&values);
    }
    let start = series.start().advance(d, series.frequency());
    let differenced = series.with_values(values, start)?;
    let spec = TrendSpec {
        kind: TrendKind::Differences,
        transform_features: false,
        n_diff: d,
        last_values,
    };
    Ok((differenced, spec))
}

/// Undoes [`difference`] on values that continue the differenced series.
pub fn integrate(forecast: &[f64], spec: &TrendSpec) -> Result<Vec<f64>> {
    if spec.kind != TrendKind::Differences {
        return Err(Error::SpecMismatch(format!(
            "cannot integrate with a `{}` trend spec",
            spec.kind.name()
        )));
    }
    if spec.last_values.len() != spec.n_diff {
        return Err(Error::SpecMismatch(format!(
            "{} stored values for {} differences",
            spec.last_values.len(),
            spec.n_diff
        )));
    }
    let mut values = forecast.to_vec();
    for &seed in spec.last_values.iter().rev() {
        let mut level = seed;
        for v in values.iter_mut() {
            level += *v;
            *v = level;
        }
    }
    Ok(values)
}

/// 5% critical value of the KPSS level-stationarity test.
pub const KPSS_CRITICAL_5PCT: f64 = 0.463;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KpssOutcome {
    pub statistic: f64,
    pub critical_value: f64,
    pub reject_stationarity: bool,
    pub lags: usize,
}

/// Bartlett-kernel truncation lag `floor(4 (T/100)^(1/4))`.
pub fn kpss_lags(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// KPSS test for level stationarity.
pub fn kpss_level(values: &[f64]) -> KpssOutcome {
    let n = values.len();
    let lags = kpss_lags(n).min(n.saturating_sub(1));
    let outcome = |statistic: f64| KpssOutcome {
        statistic,
        critical_value: KPSS_CRITICAL_5PCT,
        reject_stationarity: statistic > KPSS_CRITICAL_5PCT,
        lags,
    };
    if n < 2 || values.iter().all(|v| *v == values[0]) {
        return outcome(0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let resid: Vec<f64> = values.iter().map(|v| v - mean).collect();

    let mut partial = 0.0;
    let mut eta = 0.0;
    for e in &resid {
        partial += e;
        eta += partial * partial;
    }
    eta /= (n * n) as f64;

    let mut long_run = resid.iter().map(|e| e * e).sum::<f64>();
    for lag in 1..=lags {
        let weight = 1.0 - lag as f64 / (lags as f64 + 1.0);
        let cov: f64 = resid[lag..].iter().zip(&resid).map(|(a, b)| a * b).sum();
        long_run += 2.0 * weight * cov;
    }
    long_run /= n as f64;

    let scale = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if long_run <= (f64::EPSILON * scale).powi(2) * n as f64 {
        return outcome(0.0);
    }
    outcome(eta / long_run)
}

/// Number of first differences (0, 1 or 2) needed for the KPSS test at 5%
/// to stop rejecting level stationarity.
pub fn estimate_n_diff(series: &TimeSeries) -> Result<usize> {
    const MIN_LEN: usize = 10;
    const MAX_DIFF: usize = 2;
    if series.len() < MIN_LEN {
        return Err(Error::SeriesTooShort {
            needed: MIN_LEN - 1,
            got: series.len(),
        });
    }
    let mut values = series.values().to_vec();
    let mut d = 0;
    while d < MAX_DIFF && values.len() >= 2 && kpss_level(&values).reject_stationarity {
        values = first_difference(&values);
        d += 1;
    }
    Ok(d)
}
