//! Decision rules mapping raw output-function values to labels or values,
//! plus the two evaluation metrics (accuracy, RMSE).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Task};
use crate::error::{Error, Result};

/// Decided values per row: signs for binary, class indices for one-vs-all
/// multiclass, raw values for regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Decided {
    Binary(Vec<f64>),
    Class(Vec<usize>),
    Real(DMatrix<f64>),
}

/// Raw model outputs together with the decision for each row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    raw: DMatrix<f64>,
    decided: Decided,
    task: Task,
}

impl Prediction {
    /// Applies the task's decision rule to raw output values.
    pub fn from_raw(raw: DMatrix<f64>, task: Task) -> Result<Self> {
        let decided = match task {
            Task::Binary => Decided::Binary(decide_binary(&raw)?),
            Task::Multiclass => Decided::Class(decide_multiclass(&raw)?),
            Task::Regression => Decided::Real(raw.clone()),
        };
        Ok(Self { raw, decided, task })
    }

    pub fn raw(&self) -> &DMatrix<f64> {
        &self.raw
    }

    pub fn decided(&self) -> &Decided {
        &self.decided
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn n_rows(&self) -> usize {
        self.raw.nrows()
    }
}

/// Sign rule for single-output binary tasks; zero maps to +1.
pub fn decide_binary(raw: &DMatrix<f64>) -> Result<Vec<f64>> {
    if raw.ncols() != 1 {
        return Err(Error::TaskMismatch(format!(
            "binary decision needs one output column, got {}",
            raw.ncols()
        )));
    }
    Ok(raw
        .column(0)
        .iter()
        .map(|&v| if v >= 0.0 { 1.0 } else { -1.0 })
        .collect())
}

/// One-vs-all argmax over output nodes; ties break toward the lowest index.
pub fn decide_multiclass(raw: &DMatrix<f64>) -> Result<Vec<usize>> {
    if raw.ncols() < 2 {
        return Err(Error::TaskMismatch(format!(
            "one-vs-all decision needs at least 2 output columns, got {}",
            raw.ncols()
        )));
    }
    Ok((0..raw.nrows())
        .map(|i| {
            let mut best = 0;
            let mut best_value = raw[(i, 0)];
            for k in 1..raw.ncols() {
                if raw[(i, k)] > best_value {
                    best = k;
                    best_value = raw[(i, k)];
                }
            }
            best
        })
        .collect())
}

/// Evaluation metric: accuracy in percent for classification, root mean
/// square error for regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Metric {
    Accuracy(f64),
    Rmse(f64),
}

impl Metric {
    pub fn value(&self) -> f64 {
        match *self {
            Metric::Accuracy(v) | Metric::Rmse(v) => v,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Accuracy(_) => "accuracy",
            Metric::Rmse(_) => "rmse",
        }
    }

    /// Classification metrics improve upward, regression downward.
    pub fn higher_is_better(&self) -> bool {
        matches!(self, Metric::Accuracy(_))
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Metric::Accuracy(v) => write!(f, "accuracy {v:.2}%"),
            Metric::Rmse(v) => write!(f, "rmse {v:.6}"),
        }
    }
}

/// Scores a prediction against ground truth: accuracy (percent) for
/// classification tasks, RMSE for regression.
pub fn metrics(prediction: &Prediction, truth: &Dataset) -> Result<Metric> {
    if prediction.task != truth.task() {
        return Err(Error::TaskMismatch(format!(
            "prediction is {} but dataset is {}",
            prediction.task,
            truth.task()
        )));
    }
    if prediction.n_rows() != truth.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} predictions for {} rows",
            prediction.n_rows(),
            truth.n_rows()
        )));
    }
    match (&prediction.decided, truth.task()) {
        (Decided::Binary(signs), Task::Binary) => {
            let correct = signs
                .iter()
                .zip(truth.y().column(0).iter())
                .filter(|(&s, &y)| s == y)
                .count();
            Ok(Metric::Accuracy(
                100.0 * correct as f64 / signs.len() as f64,
            ))
        }
        (Decided::Class(classes), Task::Multiclass) => {
            if truth.y().ncols() != prediction.raw.ncols() {
                return Err(Error::DimensionMismatch(format!(
                    "{} output columns vs {} classes",
                    prediction.raw.ncols(),
                    truth.y().ncols()
                )));
            }
            let correct = classes
                .iter()
                .enumerate()
                .filter(|(i, &class)| truth.y()[(*i, class)] == 1.0)
                .count();
            Ok(Metric::Accuracy(
                100.0 * correct as f64 / classes.len() as f64,
            ))
        }
        (Decided::Real(values), Task::Regression) => {
            if values.ncols() != truth.y().ncols() {
                return Err(Error::DimensionMismatch(format!(
                    "{} output columns vs {} target columns",
                    values.ncols(),
                    truth.y().ncols()
                )));
            }
            let diff = values - truth.y();
            Ok(Metric::Rmse(
                (diff.norm_squared() / (diff.nrows() * diff.ncols()) as f64).sqrt(),
            ))
        }
        _ => unreachable!("decided variant always matches task"),
    }
}
