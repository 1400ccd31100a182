//! Time-series container and autoregressive featurization.
//!
//! A series plus a set of lags becomes a supervised training set: each
//! example holds the lagged values (ordered by descending lag, `Lag3 Lag2
//! Lag1`) and the observation that follows them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A period label: the seasonal cycle (e.g. a year) and the 1-based phase
/// within that cycle (e.g. a quarter).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub cycle: i64,
    pub phase: usize,
}

impl Period {
    pub fn new(cycle: i64, phase: usize) -> Self {
        Period { cycle, phase }
    }

    /// The period `steps` positions after `self` for the given frequency.
    pub fn advance(self, steps: usize, frequency: usize) -> Period {
        let f = frequency as i64;
        let linear = self.cycle * f + (self.phase as i64 - 1) + steps as i64;
        Period {
            cycle: linear.div_euclid(f),
            phase: linear.rem_euclid(f) as usize + 1,
        }
    }
}

/// Ordered finite observations with a seasonal frequency and a start period.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    frequency: usize,
    start: Period,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, frequency: usize, start: Period) -> Result<Self> {
        if frequency == 0 {
            return Err(Error::InvalidFrequency(frequency));
        }
        if start.phase == 0 || start.phase > frequency {
            return Err(Error::InvalidStart {
                cycle: start.cycle,
                phase: start.phase,
                frequency,
            });
        }
        if values.is_empty() {
            return Err(Error::SeriesTooShort { needed: 0, got: 0 });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(TimeSeries {
            values,
            frequency,
            start,
        })
    }

    /// A non-seasonal series starting at period 1.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 1, Period::new(1, 1))
    }

    /// A seasonal series starting at phase 1 of cycle 1.
    pub fn with_frequency(values: Vec<f64>, frequency: usize) -> Result<Self> {
        Self::new(values, frequency, Period::new(1, 1))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn frequency(&self) -> usize {
        self.frequency
    }

    pub fn start(&self) -> Period {
        self.start
    }

    /// Period of the observation at zero-based `index`.
    pub fn period_at(&self, index: usize) -> Period {
        self.start.advance(index, self.frequency)
    }

    /// Period immediately after the last observation.
    pub fn next_period(&self) -> Period {
        self.period_at(self.values.len())
    }

    /// Splits off the last `h` values, returning (training part, held-out values).
    pub fn split_tail(&self, h: usize) -> Result<(TimeSeries, Vec<f64>)> {
        if h >= self.values.len() {
            return Err(Error::SeriesTooShort {
                needed: h,
                got: self.values.len(),
            });
        }
        let cut = self.values.len() - h;
        let head = TimeSeries {
            values: self.values[..cut].to_vec(),
            frequency: self.frequency,
            start: self.start,
        };
        Ok((head, self.values[cut..].to_vec()))
    }

    /// Same metadata, new values. Used by transforms that keep the labeling.
    pub(crate) fn with_values(&self, values: Vec<f64>, start: Period) -> Result<TimeSeries> {
        TimeSeries::new(values, self.frequency, start)
    }
}

/// A nonempty, strictly increasing set of positive lags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct LagSet(Vec<usize>);

impl LagSet {
    /// Builds a lag set from any ordering; duplicates and zero are rejected.
    pub fn new(mut lags: Vec<usize>) -> Result<Self> {
        if lags.is_empty() {
            return Err(Error::InvalidLags("lag set is empty".into()));
        }
        if lags.contains(&0) {
            return Err(Error::InvalidLags("lags must be positive".into()));
        }
        lags.sort_unstable();
        if lags.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidLags("duplicate lag".into()));
        }
        Ok(LagSet(lags))
    }

    /// Lags `1..=max`.
    pub fn contiguous(max: usize) -> Result<Self> {
        Self::new((1..=max).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_lag(&self) -> usize {
        *self.0.last().expect("lag set is nonempty")
    }

    /// Lags in feature-column order (descending).
    pub fn descending(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().rev().copied()
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.descending().map(|k| format!("Lag{k}")).collect()
    }
}

impl TryFrom<Vec<usize>> for LagSet {
    type Error = Error;

    fn try_from(lags: Vec<usize>) -> Result<Self> {
        LagSet::new(lags)
    }
}

impl From<LagSet> for Vec<usize> {
    fn from(lags: LagSet) -> Self {
        lags.0
    }
}

impl std::fmt::Display for LagSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for lag in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{lag}")?;
            first = false;
        }
        Ok(())
    }
}

/// Lagged feature matrix and targets built from a series.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub feature_names: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    /// Mean of each example's untransformed feature vector.
    pub row_feature_means: Vec<f64>,
}

impl TrainingSet {
    /// Assembles a training set from raw rows; row means are computed here.
    pub fn from_rows(
        feature_names: Vec<String>,
        features: Vec<Vec<f64>>,
        targets: Vec<f64>,
    ) -> Result<Self> {
        if features.len() != targets.len() {
            return Err(Error::LengthMismatch(format!(
                "{} feature rows for {} targets",
                features.len(),
                targets.len()
            )));
        }
        let p = feature_names.len();
        if let Some(row) = features.iter().find(|r| r.len() != p) {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: row.len(),
            });
        }
        let row_feature_means = features.iter().map(|r| mean(r)).collect();
        Ok(TrainingSet {
            feature_names,
            features,
            targets,
            row_feature_means,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.targets.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Tabular rendering in the style of `cbind(features, Target = targets)`.
    pub fn to_table(&self) -> String {
        let mut header: Vec<String> = vec![String::new()];
        header.extend(self.feature_names.iter().cloned());
        header.push("Target".into());

        let mut cells: Vec<Vec<String>> = vec![header];
        for (i, (row, target)) in self.features.iter().zip(&self.targets).enumerate() {
            let mut line = vec![(i + 1).to_string()];
            line.extend(row.iter().map(|v| crate::numfmt::format_g(*v, 7)));
            line.push(crate::numfmt::format_g(*target, 7));
            cells.push(line);
        }
        let n_cols = cells[0].len();
        let widths: Vec<usize> = (0..n_cols)
            .map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (r, line) in cells.iter().enumerate() {
            let rendered: Vec<String> = line
                .iter()
                .enumerate()
                .map(|(c, cell)| {
                    if c == 0 && r > 0 {
                        format!("{cell:<w$}", w = widths[c])
                    } else {
                        format!("{cell:>w$}", w = widths[c])
                    }
                })
                .collect();
            out.push_str(&rendered.join(" "));
            out.push('\n');
        }
        out
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// One example per target index `j` in `max_lag..T`, features ordered by
/// descending lag.
pub fn build_training_set(series: &TimeSeries, lags: &LagSet) -> Result<TrainingSet> {
    let values = series.values();
    let max_lag = lags.max_lag();
    if values.len() <= max_lag {
        return Err(Error::SeriesTooShort {
            needed: max_lag,
            got: values.len(),
        });
    }
    let features: Vec<Vec<f64>> = (max_lag..values.len())
        .map(|j| lags.descending().map(|k| values[j - k]).collect())
        .collect();
    let targets = values[max_lag..].to_vec();
    TrainingSet::from_rows(lags.feature_names(), features, targets)
}

/// Feature vector for forecasting the value right after `history`.
pub fn prediction_window(history: &[f64], lags: &LagSet) -> Result<Vec<f64>> {
    let n = history.len();
    if n < lags.max_lag() {
        return Err(Error::SeriesTooShort {
            needed: lags.max_lag(),
            got: n,
        });
    }
    Ok(lags.descending().map(|k| history[n - k]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lags(v: &[usize]) -> LagSet {
        LagSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn training_set_for_eight_points() {
        let s = TimeSeries::from_values((1..=8).map(f64::from).collect()).unwrap();
        let ts = build_training_set(&s, &lags(&[1, 2, 3])).unwrap();
        assert_eq!(ts.n_rows(), 5);
        assert_eq!(ts.features[0], vec![1.0, 2.0, 3.0]);
        assert_eq!(ts.targets[0], 4.0);
        assert_eq!(ts.features[4], vec![5.0, 6.0, 7.0]);
        assert_eq!(ts.targets[4], 8.0);
        assert_eq!(ts.feature_names, vec!["Lag3", "Lag2", "Lag1"]);
    }

    #[test]
    fn training_set_for_ten_points() {
        let s = TimeSeries::from_values((1..=10).map(f64::from).collect()).unwrap();
        let ts = build_training_set(&s, &lags(&[1, 2, 3])).unwrap();
        assert_eq!(ts.n_rows(), 7);
        assert_eq!(ts.features[6], vec![7.0, 8.0, 9.0]);
        assert_eq!(ts.targets[6], 10.0);
        assert_eq!(ts.row_feature_means[6], 8.0);
    }

    #[test]
    fn minimal_series_gives_one_row() {
        let s = TimeSeries::from_values(vec![0.5, -1.0, 2.0, 3.25]).unwrap();
        let ts = build_training_set(&s, &lags(&[1, 2, 3])).unwrap();
        assert_eq!(ts.features, vec![vec![0.5, -1.0, 2.0]]);
        assert_eq!(ts.targets, vec![3.25]);
    }

    #[test]
    fn too_short_series_is_rejected() {
        let s = TimeSeries::from_values(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            build_training_set(&s, &lags(&[1, 2, 3])),
            Err(Error::SeriesTooShort { .. })
        ));
        assert!(matches!(
            prediction_window(&[1.0, 2.0], &lags(&[3])),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn windows_follow_recursive_pattern() {
        let hist: Vec<f64> = (1..=8).map(f64::from).collect();
        let l = lags(&[1, 2, 3]);
        assert_eq!(prediction_window(&hist, &l).unwrap(), vec![6.0, 7.0, 8.0]);
        let mut extended = hist.clone();
        extended.push(100.0);
        assert_eq!(prediction_window(&extended, &l).unwrap(), vec![7.0, 8.0, 100.0]);
        assert_eq!(prediction_window(&[4.5], &lags(&[1])).unwrap(), vec![4.5]);
    }

    #[test]
    fn series_validation() {
        assert!(matches!(
            TimeSeries::from_values(vec![1.0, f64::NAN]),
            Err(Error::NonFiniteValue { index: 1 })
        ));
        assert!(TimeSeries::from_values(vec![]).is_err());
        assert!(TimeSeries::new(vec![1.0], 0, Period::new(1, 1)).is_err());
        assert!(TimeSeries::new(vec![1.0], 4, Period::new(1, 5)).is_err());
        assert!(TimeSeries::new(vec![1.0], 4, Period::new(1, 0)).is_err());
    }

    #[test]
    fn lag_set_validation() {
        assert!(LagSet::new(vec![]).is_err());
        assert!(LagSet::new(vec![0, 1]).is_err());
        assert!(LagSet::new(vec![2, 2]).is_err());
        assert_eq!(lags(&[3, 1, 2]).as_slice(), &[1, 2, 3]);
        assert_eq!(lags(&[1, 12]).to_string(), "1 12");
    }

    #[test]
    fn period_arithmetic() {
        let p = Period::new(2023, 3);
        assert_eq!(p.advance(0, 4), Period::new(2023, 3));
        assert_eq!(p.advance(2, 4), Period::new(2024, 1));
        assert_eq!(p.advance(9, 4), Period::new(2025, 4));
        assert_eq!(Period::new(1, 1).advance(10, 1), Period::new(11, 1));
        let s = TimeSeries::new(vec![0.0; 20], 4, Period::new(2019, 1)).unwrap();
        assert_eq!(s.next_period(), Period::new(2024, 1));
    }

    #[test]
    fn table_rendering() {
        let s = TimeSeries::from_values((1..=10).map(f64::from).collect()).unwrap();
        let ts = build_training_set(&s, &lags(&[1, 2, 3])).unwrap();
        let table = ts.to_table();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines[0], "  Lag3 Lag2 Lag1 Target");
        assert_eq!(lines[1], "1    1    2    3      4");
        assert_eq!(lines[7], "7    7    8    9     10");
    }

    proptest! {
        #[test]
        fn rows_match_lagged_values(
            values in prop::collection::vec(-1e3f64..1e3, 2..60),
            raw_lags in prop::collection::btree_set(1usize..12, 1..5),
        ) {
            let l = LagSet::new(raw_lags.into_iter().collect()).unwrap();
            let s = TimeSeries::from_values(values.clone()).unwrap();
            match build_training_set(&s, &l) {
                Err(Error::SeriesTooShort { .. }) => prop_assert!(values.len() <= l.max_lag()),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
                Ok(ts) => {
                    prop_assert_eq!(ts.n_rows(), values.len() - l.max_lag());
                    prop_assert_eq!(ts.n_features(), l.len());
                    for (r, row) in ts.features.iter().enumerate() {
                        let j = r + l.max_lag();
                        prop_assert_eq!(ts.targets[r], values[j]);
                        for (c, k) in l.descending().enumerate() {
                            prop_assert_eq!(row[c], values[j - k]);
                        }
                        prop_assert_eq!(ts.row_feature_means[r], mean(row));
                    }
                    // the window is the row one more observation would produce
                    let window = prediction_window(&values, &l).unwrap();
                    let mut extended = values.clone();
                    extended.push(0.0);
                    let s2 = TimeSeries::from_values(extended).unwrap();
                    let ts2 = build_training_set(&s2, &l).unwrap();
                    prop_assert_eq!(&window, ts2.features.last().unwrap());
                }
            }
        }
    }
}
