//! MASE and dataset-level benchmarking.

use rayon::prelude::*;

use crate::autopilot::{create_model, forecast, Method, ModelOptions};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Mean absolute scaled error of `forecast` against `actuals`, scaled by the
/// in-sample seasonal naive MAE of `train` at lag `train.frequency()`.
pub fn mase(train: &TimeSeries, actuals: &[f64], forecast: &[f64]) -> Result<f64> {
    if actuals.len() != forecast.len() {
        return Err(Error::LengthMismatch(format!(
            "{} actuals vs {} forecasts",
            actuals.len(),
            forecast.len()
        )));
    }
    if actuals.is_empty() {
        return Err(Error::LengthMismatch("empty forecast".into()));
    }
    let f = train.frequency();
    let history = train.values();
    if history.len() <= f {
        return Err(Error::SeriesTooShort {
            needed: f,
            got: history.len(),
        });
    }
    let error_sum: f64 = actuals.iter().zip(forecast).map(|(y, p)| (y - p).abs()).sum();
    let naive_sum: f64 = history[f..]
        .iter()
        .zip(history)
        .map(|(now, before)| (now - before).abs())
        .sum();
    if naive_sum == 0.0 {
        return Err(Error::DegenerateScale);
    }
    // (error_sum / h) / (naive_sum / (T - f)) with a single final division
    let h = actuals.len() as f64;
    let scale_count = (history.len() - f) as f64;
    Ok((error_sum * scale_count) / (naive_sum * h))
}

/// A series to evaluate: the model sees `train`, the forecast is scored on `actuals`.
#[derive(Debug, Clone)]
pub struct BenchmarkItem {
    pub id: String,
    pub train: TimeSeries,
    pub actuals: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    pub label: String,
    pub method: Method,
    pub options: ModelOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RecordStatus {
    Ok,
    /// The in-sample naive error is zero; excluded from the aggregates.
    Degenerate,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub series_id: String,
    pub mase: Option<f64>,
    pub horizon: usize,
    pub status: RecordStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub label: String,
    pub records: Vec<EvalRecord>,
    pub mean_mase: f64,
    pub median_mase: f64,
    pub n_series: usize,
    pub n_degenerate: usize,
    pub n_failed: usize,
}

fn evaluate(item: &BenchmarkItem, config: &BenchmarkConfig) -> EvalRecord {
    let horizon = item.actuals.len();
    let outcome = create_model(&item.train, config.method, &config.options)
        .and_then(|model| forecast(&model, horizon))
        .and_then(|f| mase(&item.train, &item.actuals, &f.values));
    let (mase, status) = match outcome {
        Ok(v) => (Some(v), RecordStatus::Ok),
        Err(Error::DegenerateScale) => (None, RecordStatus::Degenerate),
        Err(e) => (None, RecordStatus::Failed(e.to_string())),
    };
    EvalRecord {
        series_id: item.id.clone(),
        mase,
        horizon,
        status,
    }
}

/// Midpoint of the two central values for even sizes. Input must be sorted.
fn median_of_sorted(values: &[f64]) -> f64 {
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Aggregates records; mean and median cover the `Ok` records only.
pub fn summarize(label: &str, mut records: Vec<EvalRecord>) -> BenchmarkReport {
    records.sort_by(|a, b| a.series_id.cmp(&b.series_id));
    let mut scores: Vec<f64> = records.iter().filter_map(|r| r.mase).collect();
    scores.sort_by(f64::total_cmp);
    let mean_mase = if scores.is_empty() {
        f64::NAN
    } else {
        scores.iter().sum::<f64>() / scores.len() as f64
    };
    BenchmarkReport {
        label: label.to_string(),
        mean_mase,
        median_mase: median_of_sorted(&scores),
        n_series: records.len(),
        n_degenerate: records
            .iter()
            .filter(|r| r.status == RecordStatus::Degenerate)
            .count(),
        n_failed: records
            .iter()
            .filter(|r| matches!(r.status, RecordStatus::Failed(_)))
            .count(),
        records,
    }
}

/// Fits and scores every series independently with the shared config.
pub fn run_benchmark(dataset: &[BenchmarkItem], config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let records: Vec<EvalRecord> = dataset.par_iter().map(|item| evaluate(item, config)).collect();
    Ok(summarize(&config.label, records))
}

impl BenchmarkReport {
    /// Per-series rows followed by a summary block.
    pub fn to_text(&self) -> String {
        let mut out = String::from("series_id,horizon,mase,status\n");
        for r in &self.records {
            let (score, status) = match (&r.status, r.mase) {
                (RecordStatus::Ok, Some(v)) => (format!("{v:.6}"), "ok".to_string()),
                (RecordStatus::Degenerate, _) => ("NA".into(), "degenerate".into()),
                (RecordStatus::Failed(msg), _) => ("NA".into(), format!("failed: {}", msg.replace(',', ";"))),
                (RecordStatus::Ok, None) => ("NA".into(), "ok".into()),
            };
            out.push_str(&format!("{},{},{},{}\n", r.series_id, r.horizon, score, status));
        }
        out.push('\n');
        out.push_str("Strategy,Mean MASE,Median MASE\n");
        out.push_str(&format!(
            "{},{:.3},{:.3}\n",
            self.label, self.mean_mase, self.median_mase
        ));
        out.push_str(&format!(
            "series: {}, evaluated: {}, degenerate: {}, failed: {}\n",
            self.n_series,
            self.n_series - self.n_degenerate - self.n_failed,
            self.n_degenerate,
            self.n_failed
        ));
        out
    }
}
