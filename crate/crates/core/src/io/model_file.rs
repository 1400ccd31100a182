//! Saved models: a versioned JSON envelope around [`ForecastModel`].

use serde::{Deserialize, Serialize};

use crate::autopilot::ForecastModel;
use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "treecast-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize)]
struct EnvelopeRef<'a> {
    format: &'a str,
    version: u32,
    model: &'a ForecastModel,
}

#[derive(Deserialize)]
struct Envelope {
    format: String,
    version: u32,
    model: ForecastModel,
}

pub fn model_to_json(model: &ForecastModel) -> String {
    let env = EnvelopeRef {
        format: MODEL_FORMAT,
        version: MODEL_VERSION,
        model,
    };
    serde_json::to_string(&env).expect("model serializes")
}

pub fn model_from_json(text: &str) -> Result<ForecastModel> {
    let env: Envelope =
        serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
    if env.format != MODEL_FORMAT {
        return Err(Error::ModelFormat(format!("unexpected format `{}`", env.format)));
    }
    if env.version != MODEL_VERSION {
        return Err(Error::ModelFormat(format!("unsupported version {}", env.version)));
    }
    env.model.validate()?;
    Ok(env.model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autopilot::{create_model, forecast, Method, ModelOptions};
    use crate::series::TimeSeries;

    fn series() -> TimeSeries {
        let values = (0..60).map(|i| (i as f64 * 0.7).sin() * 3.0 + i as f64 * 0.1).collect();
        TimeSeries::with_frequency(values, 12).unwrap()
    }

    #[test]
    fn saved_models_forecast_identically() {
        for method in [Method::RegressionTree, Method::Bagging, Method::RandomForest] {
            let opts = ModelOptions {
                n_trees: Some(10),
                seed: 5,
                ..Default::default()
            };
            let m = create_model(&series(), method, &opts).unwrap();
            let back = model_from_json(&model_to_json(&m)).unwrap();
            assert_eq!(forecast(&m, 6).unwrap().values, forecast(&back, 6).unwrap().values);
        }
    }

    #[test]
    fn rejects_foreign_documents() {
        assert!(matches!(model_from_json("{}"), Err(Error::ModelFormat(_))));
        assert!(matches!(model_from_json("not json"), Err(Error::ModelFormat(_))));
        let m = create_model(&series(), Method::RegressionTree, &ModelOptions::default()).unwrap();
        let text = model_to_json(&m).replace("\"version\":1", "\"version\":9");
        assert!(matches!(model_from_json(&text), Err(Error::ModelFormat(_))));
    }
}
