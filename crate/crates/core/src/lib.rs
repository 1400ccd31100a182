//! Univariate time series forecasting with regression trees, bagging and
//! random forests over autoregressive lag features.
//!
//! ```
//! use treecast::{create_model, forecast, LagSet, Method, ModelOptions, TimeSeries, TrendPolicy};
//!
//! let series = TimeSeries::from_values((1..=10).map(f64::from).collect()).unwrap();
//! let options = ModelOptions {
//!     lags: Some(LagSet::new(vec![1, 2, 3]).unwrap()),
//!     trend: TrendPolicy::None,
//!     ..Default::default()
//! };
//! let model = create_model(&series, Method::RegressionTree, &options).unwrap();
//! assert_eq!(forecast(&model, 4).unwrap().values, vec![7.0; 4]);
//! ```

pub mod autocorr;
pub mod autopilot;
pub mod cart;
pub mod cli;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod io;
pub mod numfmt;
pub mod rng;
pub mod series;
pub mod trend;

pub use autopilot::{
    create_model, describe_model, forecast, select_lags, ForecastModel, ForecastResult, Method,
    ModelOptions, Regressor, TrendPolicy,
};
pub use cart::{fit_tree, RegressionTree, TreeParams};
pub use ensemble::{fit_forest, EnsembleParams, Forest};
pub use error::{Error, Result};
pub use eval::{mase, run_benchmark, BenchmarkConfig, BenchmarkItem, BenchmarkReport};
pub use series::{build_training_set, LagSet, Period, TimeSeries, TrainingSet};
pub use trend::{TrendKind, TrendSpec};
