//! Tabular dataset loading and the preprocessing pipeline: L1 normalization,
//! normal/privileged feature splits, white-noise injection, and fold plans.

use std::collections::BTreeSet;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Learning task kind. Binary tasks carry a single target column valued in
/// {-1, +1}; multiclass tasks use one-hot target rows; regression targets are
/// unconstrained reals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    Binary,
    Multiclass,
    Regression,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Task::Binary => write!(f, "binary"),
            Task::Multiclass => write!(f, "multiclass"),
            Task::Regression => write!(f, "regression"),
        }
    }
}

/// Selects the label column of a CSV file either by header name or by
/// zero-based position.
#[derive(Debug, Clone)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

/// Axis along which L1 normalization rescales. The default pipeline
/// normalizes per feature column; per-row normalization is the documented
/// alternative reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L1Axis {
    Column,
    Row,
}

/// A labeled tabular dataset with an optional privileged feature block.
///
/// Privileged features are available during training only; every test-time
/// API in this crate accepts the normal feature matrix alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    x: DMatrix<f64>,
    x_priv: Option<DMatrix<f64>>,
    y: DMatrix<f64>,
    task: Task,
    class_labels: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset, validating the shape and target invariants.
    pub fn new(
        x: DMatrix<f64>,
        x_priv: Option<DMatrix<f64>>,
        y: DMatrix<f64>,
        task: Task,
        class_labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if x.nrows() == 0 {
            return Err(Error::InvalidParameter("dataset has no rows".into()));
        }
        if x.nrows() != y.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "x has {} rows but y has {}",
                x.nrows(),
                y.nrows()
            )));
        }
        if let Some(xp) = &x_priv {
            if xp.nrows() != x.nrows() {
                return Err(Error::DimensionMismatch(format!(
                    "privileged block has {} rows, expected {}",
                    xp.nrows(),
                    x.nrows()
                )));
            }
        }
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "dataset contains non-finite values".into(),
            ));
        }
        match task {
            Task::Binary => {
                if y.ncols() != 1 {
                    return Err(Error::InvalidParameter(format!(
                        "binary targets must be a single column, got {}",
                        y.ncols()
                    )));
                }
                if y.iter().any(|&v| v != 1.0 && v != -1.0) {
                    return Err(Error::InvalidParameter(
                        "binary targets must be -1 or +1".into(),
                    ));
                }
            }
            Task::Multiclass => {
                for i in 0..y.nrows() {
                    let row = y.row(i);
                    let ones = row.iter().filter(|&&v| v == 1.0).count();
                    let zeros = row.iter().filter(|&&v| v == 0.0).count();
                    if ones != 1 || ones + zeros != y.ncols() {
                        return Err(Error::InvalidParameter(format!(
                            "target row {i} is not one-hot"
                        )));
                    }
                }
            }
            Task::Regression => {}
        }
        Ok(Self {
            x,
            x_priv,
            y,
            task,
            class_labels,
        })
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn x_priv(&self) -> Option<&DMatrix<f64>> {
        self.x_priv.as_ref()
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn class_labels(&self) -> Option<&[String]> {
        self.class_labels.as_deref()
    }

    pub fn n_rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    pub fn n_priv_features(&self) -> usize {
        self.x_priv.as_ref().map_or(0, |m| m.ncols())
    }

    pub fn n_outputs(&self) -> usize {
        self.y.ncols()
    }

    /// Returns the row subset as a new dataset (row order follows `rows`).
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter("empty row subset".into()));
        }
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n_rows()) {
            return Err(Error::InvalidParameter(format!(
                "row index {bad} out of range ({} rows)",
                self.n_rows()
            )));
        }
        let take = |m: &DMatrix<f64>| -> DMatrix<f64> {
            DMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
        };
        Ok(Self {
            x: take(&self.x),
            x_priv: self.x_priv.as_ref().map(take),
            y: take(&self.y),
            task: self.task,
            class_labels: self.class_labels.clone(),
        })
    }

    /// Replaces the normal feature block, keeping everything else.
    pub(crate) fn with_x(&self, x: DMatrix<f64>) -> Self {
        assert_eq!(x.nrows(), self.n_rows());
        Self {
            x,
            x_priv: self.x_priv.clone(),
            y: self.y.clone(),
            task: self.task,
            class_labels: self.class_labels.clone(),
        }
    }

    /// Attaches a privileged feature block.
    pub fn with_privileged(&self, x_priv: DMatrix<f64>) -> Result<Self> {
        if x_priv.nrows() != self.n_rows() {
            return Err(Error::DimensionMismatch(format!(
                "privileged block has {} rows, expected {}",
                x_priv.nrows(),
                self.n_rows()
            )));
        }
        Ok(Self {
            x: self.x.clone(),
            x_priv: Some(x_priv),
            y: self.y.clone(),
            task: self.task,
            class_labels: self.class_labels.clone(),
        })
    }

    /// Drops the privileged block (what a non-LUPI learner sees).
    pub fn without_privileged(&self) -> Self {
        Self {
            x: self.x.clone(),
            x_priv: None,
            y: self.y.clone(),
            task: self.task,
            class_labels: self.class_labels.clone(),
        }
    }

    /// Re-expresses a binary dataset as a two-class one-vs-all problem:
    /// the {-1, +1} column becomes one-hot columns [is -1, is +1]. The
    /// correcting-function term shifts every output column of a trained
    /// model by the same amount, so the argmax route is insensitive to it
    /// while the sign route is not; both stay supported.
    pub fn to_one_vs_all(&self) -> Result<Self> {
        if self.task != Task::Binary {
            return Err(Error::TaskMismatch(format!(
                "one-vs-all conversion applies to binary datasets, got {}",
                self.task
            )));
        }
        let y = DMatrix::from_fn(self.n_rows(), 2, |i, k| {
            let positive = self.y[(i, 0)] > 0.0;
            if (k == 1) == positive {
                1.0
            } else {
                0.0
            }
        });
        Ok(Self {
            x: self.x.clone(),
            x_priv: self.x_priv.clone(),
            y,
            task: Task::Multiclass,
            class_labels: self
                .class_labels
                .clone()
                .or_else(|| Some(vec!["-1".into(), "1".into()])),
        })
    }
}

/// Deterministic k-fold assignment of dataset rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    k: usize,
    assignments: Vec<usize>,
    seed: u64,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_rows(&self) -> usize {
        self.assignments.len()
    }

    /// Rows held out by fold `fold`.
    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    /// Rows used for training when fold `fold` is held out.
    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Loads a CSV file into a [`Dataset`] with no privileged block.
///
/// Classification labels are mapped to targets in sorted label order: binary
/// tasks get a single {-1, +1} column, multiclass tasks get one-hot columns.
/// The mapping is recorded in `class_labels`.
pub fn load_csv<P: AsRef<Path>>(
    path: P,
    label: &LabelColumn,
    task: Task,
    has_header: bool,
) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io {
                path: path.to_path_buf(),
                source: std::io::Error::other(e.to_string()),
            },
            _ => Error::MalformedRow {
                row: 0,
                reason: e.to_string(),
            },
        })?;

    let label_idx = match label {
        LabelColumn::Index(i) => *i,
        LabelColumn::Name(name) => {
            if !has_header {
                return Err(Error::UnknownLabelColumn(format!(
                    "{name} (file has no header row)"
                )));
            }
            let headers = reader
                .headers()
                .map_err(|e| Error::MalformedRow {
                    row: 0,
                    reason: e.to_string(),
                })?
                .clone();
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::UnknownLabelColumn(name.clone()))?
        }
    };

    let mut feature_rows: Vec<Vec<f64>> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    let mut width: Option<usize> = None;

    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::MalformedRow {
            row,
            reason: e.to_string(),
        })?;
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(Error::MalformedRow {
                row,
                reason: format!("expected {w} columns, found {}", record.len()),
            });
        }
        if label_idx >= w {
            return Err(Error::UnknownLabelColumn(format!(
                "index {label_idx} (rows have {w} columns)"
            )));
        }
        let mut features = Vec::with_capacity(w - 1);
        for (column, cell) in record.iter().enumerate() {
            if column == label_idx {
                raw_labels.push(cell.trim().to_string());
            } else {
                let value: f64 = cell.trim().parse().map_err(|_| Error::NonNumericCell {
                    row,
                    column,
                    value: cell.to_string(),
                })?;
                features.push(value);
            }
        }
        feature_rows.push(features);
    }

    if feature_rows.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "{} contains no data rows",
            path.display()
        )));
    }
    let n = feature_rows.len();
    let n_features = feature_rows[0].len();
    if n_features == 0 {
        return Err(Error::InvalidParameter(
            "no feature columns beside the label column".into(),
        ));
    }
    let x = DMatrix::from_fn(n, n_features, |i, j| feature_rows[i][j]);

    let (y, class_labels) = match task {
        Task::Regression => {
            let mut targets = DMatrix::zeros(n, 1);
            for (row, raw) in raw_labels.iter().enumerate() {
                targets[(row, 0)] = raw.parse().map_err(|_| Error::NonNumericCell {
                    row,
                    column: label_idx,
                    value: raw.clone(),
                })?;
            }
            (targets, None)
        }
        Task::Binary => {
            let labels: Vec<String> = sorted_distinct(&raw_labels);
            if labels.len() != 2 {
                return Err(Error::InvalidParameter(format!(
                    "binary task requires exactly 2 distinct labels, found {}",
                    labels.len()
                )));
            }
            let mut targets = DMatrix::zeros(n, 1);
            for (row, raw) in raw_labels.iter().enumerate() {
                targets[(row, 0)] = if raw == &labels[0] { -1.0 } else { 1.0 };
            }
            (targets, Some(labels))
        }
        Task::Multiclass => {
            let labels: Vec<String> = sorted_distinct(&raw_labels);
            let mut targets = DMatrix::zeros(n, labels.len());
            for (row, raw) in raw_labels.iter().enumerate() {
                let class = labels.iter().position(|l| l == raw).unwrap();
                targets[(row, class)] = 1.0;
            }
            (targets, Some(labels))
        }
    };

    Dataset::new(x, None, y, task, class_labels)
}

fn sorted_distinct(raw: &[String]) -> Vec<String> {
    raw.iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Writes a dataset back to CSV (feature columns `f0..`, label column last).
/// Privileged features, if any, are written after the normal block with a
/// `p` prefix so a round trip through [`load_csv`] + [`split_privileged`]
/// reproduces the dataset.
pub fn save_csv<P: AsRef<Path>>(dataset: &Dataset, path: P) -> Result<Dataset> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    })?;
    let n = dataset.n_rows();
    let mut header: Vec<String> = (0..dataset.n_features()).map(|j| format!("f{j}")).collect();
    header.extend((0..dataset.n_priv_features()).map(|j| format!("p{j}")));
    header.push("label".into());
    writer.write_record(&header).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    })?;
    for i in 0..n {
        let mut record: Vec<String> = dataset.x.row(i).iter().map(|v| format!("{v}")).collect();
        if let Some(xp) = &dataset.x_priv {
            record.extend(xp.row(i).iter().map(|v| format!("{v}")));
        }
        record.push(row_label(dataset, i));
        writer.write_record(&record).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(e.to_string()),
        })?;
    }
    writer.flush().map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(dataset.clone())
}

fn row_label(dataset: &Dataset, row: usize) -> String {
    match dataset.task {
        Task::Regression => format!("{}", dataset.y[(row, 0)]),
        Task::Binary => {
            let idx = if dataset.y[(row, 0)] < 0.0 { 0 } else { 1 };
            match &dataset.class_labels {
                Some(labels) => labels[idx].clone(),
                None => {
                    if idx == 0 {
                        "-1".into()
                    } else {
                        "1".into()
                    }
                }
            }
        }
        Task::Multiclass => {
            let class = dataset
                .y
                .row(row)
                .iter()
                .position(|&v| v == 1.0)
                .unwrap_or(0);
            match &dataset.class_labels {
                Some(labels) => labels[class].clone(),
                None => format!("{class}"),
            }
        }
    }
}

/// Per-column absolute sums used as L1 divisors. Zero columns map to a
/// divisor of 1 so they pass through unchanged.
pub fn l1_column_scales(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_fn(m.ncols(), |j, _| {
        let s: f64 = m.column(j).iter().map(|v| v.abs()).sum();
        if s == 0.0 {
            1.0
        } else {
            s
        }
    })
}

/// Divides each column by the matching scale.
pub fn apply_column_scales(m: &DMatrix<f64>, scales: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for j in 0..out.ncols() {
        let s = scales[j];
        for v in out.column_mut(j).iter_mut() {
            *v /= s;
        }
    }
    out
}

/// L1-normalizes every feature column of `x` and `x_priv` in place on a
/// copy: each column is divided by its absolute-value sum, all-zero columns
/// are left untouched, targets are never rescaled.
pub fn normalize_l1(dataset: &Dataset) -> Dataset {
    normalize_l1_axis(dataset, L1Axis::Column)
}

/// [`normalize_l1`] with an explicit axis choice.
pub fn normalize_l1_axis(dataset: &Dataset, axis: L1Axis) -> Dataset {
    let norm = |m: &DMatrix<f64>| match axis {
        L1Axis::Column => apply_column_scales(m, &l1_column_scales(m)),
        L1Axis::Row => {
            let mut out = m.clone();
            for i in 0..out.nrows() {
                let s: f64 = out.row(i).iter().map(|v| v.abs()).sum();
                if s != 0.0 {
                    for v in out.row_mut(i).iter_mut() {
                        *v /= s;
                    }
                }
            }
            out
        }
    };
    Dataset {
        x: norm(&dataset.x),
        x_priv: dataset.x_priv.as_ref().map(norm),
        y: dataset.y.clone(),
        task: dataset.task,
        class_labels: dataset.class_labels.clone(),
    }
}

/// Splits the feature columns into a normal block (first `normal_count`
/// columns) and a privileged block (the rest), preserving column order.
pub fn split_privileged(dataset: &Dataset, normal_count: usize) -> Result<Dataset> {
    if dataset.x_priv.is_some() {
        return Err(Error::InvalidParameter(
            "dataset already has a privileged block".into(),
        ));
    }
    let n_features = dataset.n_features();
    if normal_count == 0 || normal_count >= n_features {
        return Err(Error::InvalidParameter(format!(
            "normal_count must be in [1, {}), got {normal_count}",
            n_features
        )));
    }
    let x = dataset.x.columns(0, normal_count).into_owned();
    let x_priv = dataset
        .x
        .columns(normal_count, n_features - normal_count)
        .into_owned();
    Ok(Dataset {
        x,
        x_priv: Some(x_priv),
        y: dataset.y.clone(),
        task: dataset.task,
        class_labels: dataset.class_labels.clone(),
    })
}

/// Default split point for a feature count: the extra attribute of an odd
/// count goes to the normal side.
pub fn default_normal_count(n_features: usize) -> usize {
    n_features.div_ceil(2)
}

/// Adds zero-mean Gaussian noise with power `10^(power_dbw/10)` (variance in
/// watts per entry) to the normal features. Privileged features and targets
/// are untouched.
pub fn add_white_noise(dataset: &Dataset, power_dbw: f64, seed: u64) -> Result<Dataset> {
    if !power_dbw.is_finite() {
        return Err(Error::InvalidParameter("noise power must be finite".into()));
    }
    let variance = 10f64.powf(power_dbw / 10.0);
    let normal = Normal::new(0.0, variance.sqrt())
        .map_err(|e| Error::InvalidParameter(format!("noise distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = dataset.x.clone();
    for v in x.iter_mut() {
        *v += normal.sample(&mut rng);
    }
    Ok(dataset.with_x(x))
}

/// Builds a deterministic shuffled k-fold plan with fold sizes differing by
/// at most one.
pub fn make_folds(n_rows: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 || k > n_rows {
        return Err(Error::InvalidParameter(format!(
            "fold count must satisfy 2 <= k <= {n_rows}, got {k}"
        )));
    }
    let mut order: Vec<usize> = (0..n_rows).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut assignments = vec![0usize; n_rows];
    for (position, &row) in order.iter().enumerate() {
        assignments[row] = position % k;
    }
    Ok(FoldPlan {
        k,
        assignments,
        seed,
    })
}

/// Deterministic holdout split: about `test_fraction` of the rows (at least
/// one, never all) go to the test set.
pub fn holdout_split(
    dataset: &Dataset,
    test_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    if !(0.0..1.0).contains(&test_fraction) || test_fraction <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let n = dataset.n_rows();
    let n_test = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let test_rows = &order[..n_test];
    let train_rows = &order[n_test..];
    Ok((dataset.subset(train_rows)?, dataset.subset(test_rows)?))
}

/// Draws a uniform value in `[lo, hi]` on the log scale.
pub(crate) fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let (a, b) = (lo.ln(), hi.ln());
    (a + (b - a) * rng.random::<f64>()).exp()
}
