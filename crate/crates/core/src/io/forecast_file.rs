//! Forecast output as CSV (`period,value`) or JSON.

use serde::{Deserialize, Serialize};

use crate::autopilot::ForecastResult;
use crate::error::{Error, Result};
use crate::numfmt::format_g;
use crate::series::Period;

/// Significant digits kept in written forecasts.
pub const FORECAST_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForecastFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ForecastFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ForecastFormat::Csv),
            "json" => Ok(ForecastFormat::Json),
            other => Err(Error::InvalidParams(format!("unknown forecast format `{other}`"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ForecastDoc {
    start: Period,
    frequency: usize,
    values: Vec<f64>,
}

/// `2024` for annual data, `2024Q1` quarterly, `2024M01` monthly and
/// `2024P3` for any other frequency.
pub fn period_label(p: Period, frequency: usize) -> String {
    match frequency {
        1 => p.cycle.to_string(),
        4 => format!("{}Q{}", p.cycle, p.phase),
        12 => format!("{}M{:02}", p.cycle, p.phase),
        _ => format!("{}P{}", p.cycle, p.phase),
    }
}

pub fn parse_period_label(label: &str, frequency: usize) -> Option<Period> {
    let (cycle, phase) = match frequency {
        1 => (label, "1"),
        4 => label.split_once('Q')?,
        12 => label.split_once('M')?,
        _ => label.split_once('P')?,
    };
    let cycle = cycle.parse().ok()?;
    let phase: usize = phase.parse().ok()?;
    (1..=frequency).contains(&phase).then_some(Period::new(cycle, phase))
}

fn rounded(v: f64) -> f64 {
    format_g(v, FORECAST_DIGITS).parse().expect("formatted float parses")
}

pub fn write_forecast(result: &ForecastResult, format: ForecastFormat) -> String {
    match format {
        ForecastFormat::Csv => {
            let mut out = format!("#frequency={}\nperiod,value\n", result.frequency);
            for (i, v) in result.values.iter().enumerate() {
                out.push_str(&format!(
                    "{},{}\n",
                    period_label(result.period_at(i), result.frequency),
                    format_g(*v, FORECAST_DIGITS)
                ));
            }
            out
        }
        ForecastFormat::Json => {
            let doc = ForecastDoc {
                start: result.start,
                frequency: result.frequency,
                values: result.values.iter().copied().map(rounded).collect(),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("forecast serializes");
            s.push('\n');
            s
        }
    }
}

pub fn parse_forecast(text: &str, format: ForecastFormat) -> Result<ForecastResult> {
    match format {
        ForecastFormat::Json => {
            let doc: ForecastDoc =
                serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
            if doc.frequency == 0 || doc.start.phase == 0 || doc.start.phase > doc.frequency {
                return Err(Error::parse(0, "invalid start or frequency"));
            }
            Ok(ForecastResult::new(doc.values, doc.start, doc.frequency))
        }
        ForecastFormat::Csv => {
            let mut frequency = None;
            let mut start = None;
            let mut values = Vec::new();
            let mut header = false;
            for (i, raw) in text.lines().enumerate() {
                let line_no = i + 1;
                let line = raw.trim();
                if line.is_empty() {
                    continue;
                }
                if let Some(f) = line.strip_prefix("#frequency=") {
                    frequency = Some(
                        f.trim()
                            .parse::<usize>()
                            .ok()
                            .filter(|&f| f > 0)
                            .ok_or_else(|| Error::parse(line_no, "invalid frequency"))?,
                    );
                    continue;
                }
                if !header {
                    if line != "period,value" {
                        return Err(Error::parse(line_no, "expected header `period,value`"));
                    }
                    header = true;
                    continue;
                }
                let f = frequency.ok_or_else(|| Error::parse(line_no, "missing #frequency line"))?;
                let (label, value) = line
                    .split_once(',')
                    .ok_or_else(|| Error::parse(line_no, "expected `period,value`"))?;
                let period = parse_period_label(label.trim(), f)
                    .ok_or_else(|| Error::parse(line_no, format!("invalid period `{label}`")))?;
                let expected = start.map(|s: Period| s.advance(values.len(), f));
                match expected {
                    None => start = Some(period),
                    Some(e) if e != period => {
                        return Err(Error::parse(line_no, "periods are not consecutive"));
                    }
                    _ => {}
                }
                let v: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("invalid number `{}`", value.trim())))?;
                if !v.is_finite() {
                    return Err(Error::NonFiniteInput { line: line_no });
                }
                values.push(v);
            }
            let frequency = frequency.ok_or_else(|| Error::parse(0, "missing #frequency line"))?;
            let start = start.ok_or(Error::EmptyDataset)?;
            Ok(ForecastResult::new(values, start, frequency))
        }
    }
}
