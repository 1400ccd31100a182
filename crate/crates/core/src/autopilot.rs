//! Automatic forecasting pipeline: lag selection, trend handling, model
//! fitting and recursive multi-step forecasts.

use serde::{Deserialize, Serialize};

use crate::autocorr::pacf;
use crate::cart::{fit_tree, RegressionTree, TreeParams};
use crate::ensemble::{fit_forest, EnsembleParams, Forest};
use crate::error::{Error, Result};
use crate::series::{build_training_set, mean, prediction_window, LagSet, Period, TimeSeries, TrainingSet};
use crate::trend::{
    back_transform_forecast, difference, estimate_n_diff, integrate, transform_examples,
    transform_window, TrendKind, TrendSpec,
};

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0;

/// Largest PACF lag examined for non-seasonal series.
pub const PACF_MAX_LAG: usize = 20;

/// Lags used when no partial autocorrelation is significant.
pub const FALLBACK_LAGS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    RegressionTree,
    Bagging,
    RandomForest,
}

impl Method {
    pub fn code(self) -> &'static str {
        match self {
            Method::RegressionTree => "rt",
            Method::Bagging => "bagging",
            Method::RandomForest => "rf",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Method::RegressionTree => "regression trees",
            Method::Bagging => "bagging",
            Method::RandomForest => "random forests",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rt" | "tree" => Ok(Method::RegressionTree),
            "bagging" => Ok(Method::Bagging),
            "rf" | "random_forest" => Ok(Method::RandomForest),
            other => Err(Error::InvalidParams(format!("unknown method `{other}`"))),
        }
    }
}

/// Requested trend handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendPolicy {
    None,
    Additive { transform_features: bool },
    Multiplicative { transform_features: bool },
    /// `None` estimates the order with repeated KPSS tests.
    Differences { n_diff: Option<usize> },
}

impl Default for TrendPolicy {
    fn default() -> Self {
        TrendPolicy::Additive {
            transform_features: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelOptions {
    pub lags: Option<LagSet>,
    pub trend: TrendPolicy,
    /// For a single tree these are its parameters; for ensembles, the members'.
    pub tree_params: Option<TreeParams>,
    pub n_trees: Option<usize>,
    pub mtry: Option<usize>,
    pub seed: u64,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            lags: None,
            trend: TrendPolicy::default(),
            tree_params: None,
            n_trees: None,
            mtry: None,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regressor {
    Tree(RegressionTree),
    Forest(Forest),
}

impl Regressor {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        match self {
            Regressor::Tree(t) => t.predict(x),
            Regressor::Forest(f) => f.predict(x),
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Regressor::Tree(t) => t.n_features(),
            Regressor::Forest(f) => f.n_features(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub frequency: usize,
    pub start: Period,
    pub length: usize,
}

impl SeriesMeta {
    pub fn next_period(&self) -> Period {
        self.start.advance(self.length, self.frequency)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastModel {
    pub method: Method,
    pub lags: LagSet,
    pub trend: TrendSpec,
    pub regressor: Regressor,
    /// Last `max(lags)` observations on the modeling scale (after differencing).
    pub tail: Vec<f64>,
    pub series_meta: SeriesMeta,
    /// Training examples after the trend transform; not persisted.
    #[serde(skip)]
    pub training_set: Option<TrainingSet>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult {
    pub values: Vec<f64>,
    pub horizon: usize,
    pub start: Period,
    pub frequency: usize,
    /// Steps (0-based) where a zero window mean forced the additive back-transform.
    pub fallback_steps: Vec<usize>,
}

impl ForecastResult {
    pub fn new(values: Vec<f64>, start: Period, frequency: usize) -> Self {
        ForecastResult {
            horizon: values.len(),
            values,
            start,
            frequency,
            fallback_steps: Vec::new(),
        }
    }

    pub fn period_at(&self, i: usize) -> Period {
        self.start.advance(i, self.frequency)
    }
}

/// One recursive step on the modeling scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastStep {
    pub window: Vec<f64>,
    pub model_input: Vec<f64>,
    pub raw_prediction: f64,
    pub value: f64,
    pub fallback: bool,
}

/// Significance bound for a sample partial autocorrelation: a two-sided 5%
/// normal test, Bonferroni-adjusted over the `max_lag` lags examined.
pub fn pacf_threshold(n: usize, max_lag: usize) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    let normal = Normal::standard();
    let z = normal.inverse_cdf(1.0 - 0.05 / (2.0 * max_lag.max(1) as f64));
    z / (n as f64).sqrt()
}

/// Seasonal series use lags `1..=frequency`; others use the significant
/// partial autocorrelations, or `1..=5` if none is significant. The largest
/// lag is capped at `T - 2`.
pub fn select_lags(series: &TimeSeries) -> Result<LagSet> {
    let n = series.len();
    if n < 3 {
        return Err(Error::SeriesTooShort { needed: 2, got: n });
    }
    let candidates: Vec<usize> = if series.frequency() > 1 {
        (1..=series.frequency()).collect()
    } else {
        let max_lag = (n / 3).clamp(1, PACF_MAX_LAG);
        let bound = pacf_threshold(n, max_lag);
        let significant: Vec<usize> = pacf(series.values(), max_lag)
            .map(|p| {
                p.iter()
                    .enumerate()
                    .filter(|(_, v)| v.abs() > bound)
                    .map(|(i, _)| i + 1)
                    .collect()
            })
            .unwrap_or_default();
        if significant.is_empty() {
            (1..=FALLBACK_LAGS).collect()
        } else {
            significant
        }
    };
    let capped: Vec<usize> = candidates.into_iter().filter(|&k| k <= n - 2).collect();
    if capped.is_empty() {
        LagSet::new(vec![1])
    } else {
        LagSet::new(capped)
    }
}

fn resolve_trend(series: &TimeSeries, policy: TrendPolicy) -> Result<(TimeSeries, TrendSpec)> {
    match policy {
        TrendPolicy::None => Ok((series.clone(), TrendSpec::none())),
        TrendPolicy::Additive { transform_features } => {
            Ok((series.clone(), TrendSpec::additive(transform_features)))
        }
        TrendPolicy::Multiplicative { transform_features } => {
            Ok((series.clone(), TrendSpec::multiplicative(transform_features)))
        }
        TrendPolicy::Differences { n_diff } => {
            let d = match n_diff {
                Some(d) => d,
                // too short for the stationarity test: leave undifferenced
                None if series.len() < 10 => 0,
                None => estimate_n_diff(series)?,
            };
            difference(series, d)
        }
    }
}

fn fit_regressor(
    ts: &TrainingSet,
    method: Method,
    options: &ModelOptions,
) -> Result<Regressor> {
    match method {
        Method::RegressionTree => {
            let params = options.tree_params.unwrap_or_default();
            Ok(Regressor::Tree(fit_tree(ts, &params, None)?))
        }
        Method::Bagging | Method::RandomForest => {
            let mut params = if method == Method::Bagging {
                if options.mtry.is_some() {
                    return Err(Error::InvalidParams(
                        "bagging considers every feature; use rf to set mtry".into(),
                    ));
                }
                EnsembleParams::bagging(options.seed)
            } else {
                EnsembleParams::random_forest(ts.n_features(), options.seed)
            };
            if let Some(n) = options.n_trees {
                params.n_trees = n;
            }
            if let Some(m) = options.mtry {
                params.mtry = Some(m);
            }
            if let Some(tp) = options.tree_params {
                params.tree_params = tp;
            }
            Ok(Regressor::Forest(fit_forest(ts, &params)?))
        }
    }
}

/// Builds the training set, applies the trend policy and fits the regressor.
pub fn create_model(
    series: &TimeSeries,
    method: Method,
    options: &ModelOptions,
) -> Result<ForecastModel> {
    let (processed, trend) = resolve_trend(series, options.trend)?;
    let lags = match &options.lags {
        Some(l) => l.clone(),
        None => select_lags(&processed)?,
    };
    let raw = build_training_set(&processed, &lags)?;
    let training_set = transform_examples(&raw, &trend)?;
    let regressor = fit_regressor(&training_set, method, options)?;
    let values = processed.values();
    let tail = values[values.len() - lags.max_lag()..].to_vec();
    Ok(ForecastModel {
        method,
        lags,
        trend,
        regressor,
        tail,
        series_meta: SeriesMeta {
            frequency: series.frequency(),
            start: series.start(),
            length: series.len(),
        },
        training_set: Some(training_set),
    })
}

impl ForecastModel {
    pub fn validate(&self) -> Result<()> {
        if self.tail.len() != self.lags.max_lag() {
            return Err(Error::ModelFormat(format!(
                "tail holds {} values, lags need {}",
                self.tail.len(),
                self.lags.max_lag()
            )));
        }
        if self.regressor.n_features() != self.lags.len() {
            return Err(Error::ModelFormat(
                "regressor feature count differs from lag count".into(),
            ));
        }
        if self.tail.iter().any(|v| !v.is_finite()) {
            return Err(Error::ModelFormat("non-finite value in tail".into()));
        }
        match &self.regressor {
            Regressor::Tree(t) => t.validate()?,
            Regressor::Forest(f) => f.validate()?,
        }
        if self.trend.kind == TrendKind::Differences && self.trend.last_values.len() != self.trend.n_diff {
            return Err(Error::ModelFormat("differencing state is incomplete".into()));
        }
        Ok(())
    }
}

/// Runs the recursive strategy for `h` steps on the modeling scale.
pub fn forecast_steps(model: &ForecastModel, h: usize) -> Result<Vec<ForecastStep>> {
    let mut history = model.tail.clone();
    let mut steps = Vec::with_capacity(h);
    for _ in 0..h {
        let window = prediction_window(&history, &model.lags)?;
        let window_mean = mean(&window);
        let (model_input, fallback) = match transform_window(&window, window_mean, &model.trend) {
            Some(input) => (input, false),
            None => (window.clone(), true),
        };
        let raw_prediction = model.regressor.predict(&model_input)?;
        let value = if fallback {
            log::warn!("zero input mean under the multiplicative transform; using additive back-transform");
            raw_prediction + window_mean
        } else {
            back_transform_forecast(raw_prediction, window_mean, &model.trend)
        };
        history.push(value);
        steps.push(ForecastStep {
            window,
            model_input,
            raw_prediction,
            value,
            fallback,
        });
    }
    Ok(steps)
}

pub fn forecast(model: &ForecastModel, h: usize) -> Result<ForecastResult> {
    if h == 0 {
        return Err(Error::InvalidParams("horizon must be at least 1".into()));
    }
    let steps = forecast_steps(model, h)?;
    let fallback_steps = steps
        .iter()
        .enumerate()
        .filter(|(_, s)| s.fallback)
        .map(|(i, _)| i)
        .collect();
    let on_model_scale: Vec<f64> = steps.into_iter().map(|s| s.value).collect();
    let values = if model.trend.kind == TrendKind::Differences {
        integrate(&on_model_scale, &model.trend)?
    } else {
        on_model_scale
    };
    Ok(ForecastResult {
        horizon: h,
        values,
        start: model.series_meta.next_period(),
        frequency: model.series_meta.frequency,
        fallback_steps,
    })
}

/// Stable multi-line summary of a model.
pub fn describe_model(model: &ForecastModel) -> String {
    let mut out = String::new();
    out.push_str(&format!("Regression model: {}\n", model.method.description()));
    out.push_str(&format!("Autoregressive lags: {}\n", model.lags));
    out.push_str(&format!("Trend: {}\n", model.trend.describe()));
    if let Regressor::Forest(forest) = &model.regressor {
        let p = forest.n_features();
        out.push_str(&format!(
            "Ensemble: {} trees, {} candidate features per split, seed {}\n",
            forest.params.n_trees,
            forest.params.mtry.unwrap_or(p),
            forest.params.seed
        ));
    }
    if let Some(ts) = &model.training_set {
        out.push_str(&format!("Training examples: {}\n", ts.n_rows()));
    }
    out
}
