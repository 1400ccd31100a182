//! File formats: datasets, forecasts, saved models and plots.

pub mod forecast_file;
pub mod model_file;
pub mod plot;
pub mod series_file;

pub use forecast_file::{parse_forecast, period_label, write_forecast, ForecastFormat};
pub use model_file::{model_from_json, model_to_json};
pub use plot::emit_plot;
pub use series_file::{parse_series_bytes, parse_series_file, write_series_file, SeriesFileRecord, SeriesFormat};
