//! Dataset files.
//!
//! Two layouts are accepted:
//!
//! * long CSV with a `series_id,index,value` header, preceded by optional
//!   `#frequency=<int>`, `#horizon=<int>` and `#start=<cycle>[/<phase>]`
//!   lines that apply to every series in the file;
//! * a Monash-style file with `@frequency`, `@horizon` metadata, an `@data`
//!   marker, then one `name:start:v1,v2,...` line per series, where `start`
//!   is `<cycle>` or `<cycle>/<phase>`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::series::{Period, TimeSeries};

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFileRecord {
    pub name: String,
    pub start: Period,
    pub frequency: usize,
    pub values: Vec<f64>,
    /// Held-out evaluation length, when the file declares one.
    pub horizon: Option<usize>,
}

impl SeriesFileRecord {
    pub fn to_series(&self) -> Result<TimeSeries> {
        TimeSeries::new(self.values.clone(), self.frequency, self.start)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesFormat {
    Csv,
    Monash,
}

pub fn parse_series_bytes(bytes: &[u8]) -> Result<Vec<SeriesFileRecord>> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::parse(0, format!("input is not UTF-8: {e}")))?;
    parse_series_file(text)
}

pub fn detect_format(text: &str) -> SeriesFormat {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    match first {
        Some(l) if l.starts_with('@') => SeriesFormat::Monash,
        _ => SeriesFormat::Csv,
    }
}

pub fn parse_series_file(text: &str) -> Result<Vec<SeriesFileRecord>> {
    match detect_format(text) {
        SeriesFormat::Csv => parse_csv(text),
        SeriesFormat::Monash => parse_monash(text),
    }
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid number `{}`", token.trim())))?;
    if !v.is_finite() {
        return Err(Error::NonFiniteInput { line });
    }
    Ok(v)
}

fn parse_positive(token: &str, line: usize, what: &str) -> Result<usize> {
    match token.trim().parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::parse(line, format!("invalid {what} `{}`", token.trim()))),
    }
}

fn parse_start(token: &str, line: usize) -> Result<Period> {
    let token = token.trim();
    let (cycle, phase) = match token.split_once('/') {
        Some((c, p)) => (c, parse_positive(p, line, "start phase")?),
        None => (token, 1),
    };
    let cycle = cycle
        .trim()
        .parse::<i64>()
        .map_err(|_| Error::parse(line, format!("invalid start `{token}`")))?;
    Ok(Period::new(cycle, phase))
}

fn format_start(p: Period) -> String {
    if p.phase == 1 {
        p.cycle.to_string()
    } else {
        format!("{}/{}", p.cycle, p.phase)
    }
}

fn frequency_from_word(token: &str, line: usize) -> Result<usize> {
    match token.trim().to_ascii_lowercase().as_str() {
        "yearly" => Ok(1),
        "quarterly" => Ok(4),
        "monthly" => Ok(12),
        "weekly" => Ok(52),
        "daily" => Ok(7),
        "hourly" => Ok(24),
        other => parse_positive(other, line, "frequency"),
    }
}

fn check_start(start: Period, frequency: usize, line: usize) -> Result<()> {
    if start.phase > frequency {
        return Err(Error::parse(
            line,
            format!("start phase {} exceeds frequency {frequency}", start.phase),
        ));
    }
    Ok(())
}

fn parse_csv(text: &str) -> Result<Vec<SeriesFileRecord>> {
    let mut frequency = 1;
    let mut horizon = None;
    let mut start = Period::new(1, 1);
    let mut header_seen = false;
    let mut order: Vec<String> = Vec::new();
    let mut rows: HashMap<String, Vec<(i64, f64, usize)>> = HashMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if header_seen {
                continue;
            }
            if let Some((key, value)) = meta.split_once('=') {
                match key.trim() {
                    "frequency" => frequency = parse_positive(value, line_no, "frequency")?,
                    "horizon" => horizon = Some(parse_positive(value, line_no, "horizon")?),
                    "start" => start = parse_start(value, line_no)?,
                    _ => {}
                }
            }
            continue;
        }
        if !header_seen {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols != ["series_id", "index", "value"] {
                return Err(Error::parse(line_no, "expected header `series_id,index,value`"));
            }
            header_seen = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::parse(line_no, format!("expected 3 fields, got {}", cols.len())));
        }
        let id = cols[0].trim().to_string();
        if id.is_empty() {
            return Err(Error::parse(line_no, "empty series_id"));
        }
        let index = cols[1]
            .trim()
            .parse::<i64>()
            .map_err(|_| Error::parse(line_no, format!("invalid index `{}`", cols[1].trim())))?;
        let value = parse_value(cols[2], line_no)?;
        rows.entry(id.clone())
            .or_insert_with(|| {
                order.push(id.clone());
                Vec::new()
            })
            .push((index, value, line_no));
    }
    if !header_seen {
        return Err(Error::parse(1, "missing header `series_id,index,value`"));
    }
    check_start(start, frequency, 1)?;
    if order.is_empty() {
        return Err(Error::EmptyDataset);
    }

    order
        .into_iter()
        .map(|name| {
            let mut points = rows.remove(&name).expect("grouped");
            points.sort_by_key(|p| p.0);
            if let Some(w) = points.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::parse(
                    w[1].2,
                    format!("duplicate index {} for series `{name}`", w[1].0),
                ));
            }
            Ok(SeriesFileRecord {
                name,
                start,
                frequency,
                values: points.into_iter().map(|p| p.1).collect(),
                horizon,
            })
        })
        .collect()
}

fn parse_monash(text: &str) -> Result<Vec<SeriesFileRecord>> {
    let mut frequency = 1;
    let mut horizon = None;
    let mut in_data = false;
    let mut records: Vec<SeriesFileRecord> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !in_data {
            let Some(directive) = line.strip_prefix('@') else {
                return Err(Error::parse(line_no, "expected a metadata line before @data"));
            };
            let (key, value) = directive
                .split_once(char::is_whitespace)
                .map(|(k, v)| (k, v.trim()))
                .unwrap_or((directive, ""));
            match key.to_ascii_lowercase().as_str() {
                "data" => in_data = true,
                "frequency" => frequency = frequency_from_word(value, line_no)?,
                "horizon" => horizon = Some(parse_positive(value, line_no, "horizon")?),
                "missing" => {
                    if value.eq_ignore_ascii_case("true") {
                        return Err(Error::parse(line_no, "missing values are not supported"));
                    }
                }
                "relation" | "attribute" | "equallength" => {}
                other => return Err(Error::parse(line_no, format!("unsupported directive `@{other}`"))),
            }
            continue;
        }
        let parts: Vec<&str> = line.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::parse(line_no, "expected `name:start:values`"));
        }
        let name = parts[0].trim().to_string();
        if name.is_empty() {
            return Err(Error::parse(line_no, "empty series name"));
        }
        if records.iter().any(|r| r.name == name) {
            return Err(Error::DuplicateSeriesName(name));
        }
        let start = parse_start(parts[1], line_no)?;
        check_start(start, frequency, line_no)?;
        let values = parts[2]
            .split(',')
            .map(|t| {
                if t.trim() == "?" {
                    Err(Error::parse(line_no, "missing values are not supported"))
                } else {
                    parse_value(t, line_no)
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        records.push(SeriesFileRecord {
            name,
            start,
            frequency,
            values,
            horizon,
        });
    }
    if !in_data {
        return Err(Error::parse(0, "missing @data section"));
    }
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(records)
}

fn uniform<T: PartialEq + Copy>(records: &[SeriesFileRecord], get: impl Fn(&SeriesFileRecord) -> T) -> Result<T> {
    let first = get(&records[0]);
    if records.iter().any(|r| get(r) != first) {
        return Err(Error::InvalidParams(
            "every series in the file must share frequency, horizon and start".into(),
        ));
    }
    Ok(first)
}

pub fn write_series_file(records: &[SeriesFileRecord], format: SeriesFormat) -> Result<String> {
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let horizon = uniform(records, |r| r.horizon)?;
    let frequency = uniform(records, |r| r.frequency)?;
    let mut out = String::new();
    match format {
        SeriesFormat::Csv => {
            let start = uniform(records, |r| r.start)?;
            out.push_str(&format!("#frequency={frequency}\n"));
            if let Some(h) = horizon {
                out.push_str(&format!("#horizon={h}\n"));
            }
            out.push_str(&format!("#start={}\n", format_start(start)));
            out.push_str("series_id,index,value\n");
            for r in records {
                for (i, v) in r.values.iter().enumerate() {
                    out.push_str(&format!("{},{},{}\n", r.name, i + 1, v));
                }
            }
        }
        SeriesFormat::Monash => {
            out.push_str(&format!("@frequency {frequency}\n"));
            if let Some(h) = horizon {
                out.push_str(&format!("@horizon {h}\n"));
            }
            out.push_str("@data\n");
            for r in records {
                let values: Vec<String> = r.values.iter().map(|v| v.to_string()).collect();
                out.push_str(&format!("{}:{}:{}\n", r.name, format_start(r.start), values.join(",")));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn csv_single_series_in_index_order() {
        let text = "#frequency=1\nseries_id,index,value\na,3,30\na,1,10\na,2,20\n";
        let recs = parse_series_file(text).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].name, "a");
        assert_eq!(recs[0].frequency, 1);
        assert_eq!(recs[0].values, vec![10.0, 20.0, 30.0]);
    }

    #[test]
    fn csv_groups_by_id() {
        let text = "#frequency=4\n#horizon=2\n#start=2019/2\nseries_id,index,value\nx,1,1\ny,1,5\nx,2,2\n";
        let recs = parse_series_file(text).unwrap();
        assert_eq!(recs.iter().map(|r| r.name.as_str()).collect::<Vec<_>>(), ["x", "y"]);
        assert_eq!(recs[0].values, vec![1.0, 2.0]);
        assert_eq!(recs[1].horizon, Some(2));
        assert_eq!(recs[1].start, Period::new(2019, 2));
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(
            parse_series_file("series_id,index,value\na,1,x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_series_file("series_id,index,value\na,1,1\na,2,NaN\n"),
            Err(Error::NonFiniteInput { line: 3 })
        ));
        assert!(matches!(
            parse_series_file("id,value\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_series_file("series_id,index,value\na,1,1\na,1,2\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_series_file("series_id,index,value\n"),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn monash_line() {
        let text = "@relation toy\n@frequency 4\n@horizon 4\n@data\ns1:1:5,5,5,10\n";
        let recs = parse_series_file(text).unwrap();
        assert_eq!(
            recs,
            vec![SeriesFileRecord {
                name: "s1".into(),
                start: Period::new(1, 1),
                frequency: 4,
                values: vec![5.0, 5.0, 5.0, 10.0],
                horizon: Some(4),
            }]
        );
        let written = write_series_file(&recs, SeriesFormat::Monash).unwrap();
        assert_eq!(parse_series_file(&written).unwrap(), recs);
    }

    #[test]
    fn monash_errors() {
        assert!(matches!(
            parse_series_file("@frequency 1\n@data\n"),
            Err(Error::EmptyDataset)
        ));
        assert!(matches!(
            parse_series_file("@frequency 1\n@data\na:1:1,2\na:1:3\n"),
            Err(Error::DuplicateSeriesName(_))
        ));
        assert!(matches!(
            parse_series_file("@frequency 1\n@data\na:1:1,?,2\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_series_file("@frequency 1\n@data\na:1979-01-01 00-00-00:1,2\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_series_file("@frequency 4\n@data\na:2000/5:1,2\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_series_file("@frobnicate yes\n@data\na:1:1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn frequency_words() {
        let recs = parse_series_file("@frequency quarterly\n@data\na:2019/3:1,2,3\n").unwrap();
        assert_eq!(recs[0].frequency, 4);
        assert_eq!(recs[0].start, Period::new(2019, 3));
    }

    fn records() -> impl Strategy<Value = Vec<SeriesFileRecord>> {
        (1usize..13, prop::option::of(1usize..10), -3000i64..3000).prop_flat_map(|(f, h, cycle)| {
            prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 1..20), 1..5).prop_map(
                move |all| {
                    all.into_iter()
                        .enumerate()
                        .map(|(i, values)| SeriesFileRecord {
                            name: format!("series{i}"),
                            start: Period::new(cycle, 1),
                            frequency: f,
                            values,
                            horizon: h,
                        })
                        .collect()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn both_formats_round_trip(recs in records()) {
            for format in [SeriesFormat::Csv, SeriesFormat::Monash] {
                let text = write_series_file(&recs, format).unwrap();
                prop_assert_eq!(detect_format(&text), format);
                prop_assert_eq!(&parse_series_file(&text).unwrap(), &recs);
            }
        }
    }
}
