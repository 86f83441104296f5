//! Experiment orchestration: k-fold cross-validation with the
//! privileged-information contract, random hyperparameter search,
//! activation selection, noise benchmarks, and seed-replicated reporting.
//!
//! Privileged features are consumed during training only; every evaluation
//! path predicts from normal features alone. Trials own RNG streams derived
//! from `(master_seed, trial_index)` and reports are assembled in trial
//! order, so results do not depend on execution interleaving.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{self, apply_column_scales, l1_column_scales, Dataset, FoldPlan, Task};
use crate::enhance::{Activation, EnhancementLayer};
use crate::error::{Error, Result};
use crate::kernel::{self, KernelSpec};
use crate::predict::{metrics, Metric, Prediction};
use crate::solvers::{RvflModel, RvflPlusModel};

/// The four trainable learners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LearnerKind {
    RvflPinv,
    RvflRidge,
    RvflPlus,
    KrvflPlus,
}

impl std::fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            LearnerKind::RvflPinv => "rvfl-pinv",
            LearnerKind::RvflRidge => "rvfl-ridge",
            LearnerKind::RvflPlus => "rvfl-plus",
            LearnerKind::KrvflPlus => "krvfl-plus",
        };
        write!(f, "{name}")
    }
}

impl std::str::FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rvfl-pinv" => Ok(LearnerKind::RvflPinv),
            "rvfl-ridge" | "rvfl" => Ok(LearnerKind::RvflRidge),
            "rvfl-plus" => Ok(LearnerKind::RvflPlus),
            "krvfl-plus" => Ok(LearnerKind::KrvflPlus),
            other => Err(Error::InvalidParameter(format!(
                "unknown learner {other:?} (expected rvfl-pinv, rvfl-ridge, rvfl-plus, krvfl-plus)"
            ))),
        }
    }
}

/// A fully specified learner. Defaults follow the benchmark conventions:
/// 1000 enhancement nodes, initialization half-range `2^2.5`, `C = 1`,
/// `gamma = 1000` for the explicit-feature learner and `5000` for the
/// kernel learner, Gaussian kernel parameter `tau = 0.025`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub kind: LearnerKind,
    pub c: f64,
    pub gamma: f64,
    pub u: f64,
    pub nodes: usize,
    pub tau: f64,
    pub activation: Activation,
    pub seed: u64,
}

impl LearnerConfig {
    pub fn new(kind: LearnerKind) -> Self {
        Self {
            kind,
            c: 1.0,
            gamma: if kind == LearnerKind::KrvflPlus {
                5000.0
            } else {
                1000.0
            },
            u: 2f64.powf(2.5),
            nodes: 1000,
            tau: 0.025,
            activation: Activation::Sigmoid,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "C must be positive, got {}",
                self.c
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.u > 0.0 && self.u.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "u must be positive, got {}",
                self.u
            )));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if self.nodes == 0 {
            return Err(Error::InvalidParameter("node count must be >= 1".into()));
        }
        Ok(())
    }

    fn uses_privileged(&self) -> bool {
        matches!(self.kind, LearnerKind::RvflPlus | LearnerKind::KrvflPlus)
    }
}

/// How feature normalization interacts with train/test splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Normalization {
    /// L1 column scales are fitted on the training rows of each split and
    /// applied to the matching test rows.
    #[default]
    FitOnTrain,
    /// The whole dataset is normalized once before splitting.
    Joint,
    /// Features are used as-is.
    Off,
}

/// One evaluated trial (a fold or a seed replicate).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub index: usize,
    pub seed: u64,
    pub value: f64,
    pub wall_time_s: f64,
}

/// Aggregated trial results. The mean and standard deviation are computed
/// from exactly the listed trials (sample standard deviation; zero for a
/// single trial). Wall times are informational only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub learner: String,
    pub metric_name: String,
    pub higher_is_better: bool,
    pub trials: Vec<TrialOutcome>,
    pub mean: f64,
    pub std: f64,
    pub wall_time_s: f64,
    pub config: String,
    pub seeds: Vec<u64>,
}

impl RunReport {
    fn from_trials(
        learner: String,
        metric_name: String,
        higher_is_better: bool,
        trials: Vec<TrialOutcome>,
        config: String,
    ) -> Self {
        let n = trials.len() as f64;
        let mean = trials.iter().map(|t| t.value).sum::<f64>() / n;
        let std = if trials.len() > 1 {
            (trials
                .iter()
                .map(|t| (t.value - mean) * (t.value - mean))
                .sum::<f64>()
                / (n - 1.0))
                .sqrt()
        } else {
            0.0
        };
        let wall_time_s = trials.iter().map(|t| t.wall_time_s).sum();
        let seeds = trials.iter().map(|t| t.seed).collect();
        Self {
            learner,
            metric_name,
            higher_is_better,
            trials,
            mean,
            std,
            wall_time_s,
            config,
            seeds,
        }
    }

    /// Mean with the table-style `mean +/- std` rendering.
    pub fn summary(&self) -> String {
        format!(
            "{}: {} {:.4} +/- {:.4} ({} trials, {:.3}s)",
            self.learner,
            self.metric_name,
            self.mean,
            self.std,
            self.trials.len(),
            self.wall_time_s
        )
    }
}

/// Deterministic per-trial stream seed derived from a master seed.
pub fn trial_seed(master: u64, trial_index: usize) -> u64 {
    master ^ (trial_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// A trained model of any learner kind, with the unified prediction path
/// (normal features in, raw outputs out).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FittedModel {
    Rvfl(RvflModel),
    RvflPlus(RvflPlusModel),
    KrvflPlus(kernel::KrvflPlusModel),
}

impl FittedModel {
    pub fn predict(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        match self {
            FittedModel::Rvfl(m) => m.predict(x),
            FittedModel::RvflPlus(m) => m.predict(x),
            FittedModel::KrvflPlus(m) => m.predict(x),
        }
    }

    pub fn kind(&self) -> LearnerKind {
        match self {
            FittedModel::Rvfl(m) => match m.variant() {
                crate::solvers::RvflVariant::Pinv => LearnerKind::RvflPinv,
                crate::solvers::RvflVariant::Ridge { .. } => LearnerKind::RvflRidge,
            },
            FittedModel::RvflPlus(_) => LearnerKind::RvflPlus,
            FittedModel::KrvflPlus(_) => LearnerKind::KrvflPlus,
        }
    }

    pub fn n_outputs(&self) -> usize {
        match self {
            FittedModel::Rvfl(m) => m.n_outputs(),
            FittedModel::RvflPlus(m) => m.n_outputs(),
            FittedModel::KrvflPlus(m) => m.n_outputs(),
        }
    }
}

/// Trains the configured learner on a training set. The second return
/// value carries solver diagnostics where the learner produces them.
pub fn fit_model(
    train: &Dataset,
    learner: &LearnerConfig,
) -> Result<(FittedModel, Option<crate::solvers::TrainDiagnostics>)> {
    learner.validate()?;
    if learner.uses_privileged() && train.x_priv().is_none() {
        return Err(Error::InvalidParameter(format!(
            "{} needs a privileged feature block in the training set",
            learner.kind
        )));
    }
    match learner.kind {
        LearnerKind::RvflPinv | LearnerKind::RvflRidge => {
            let layer = EnhancementLayer::init(
                train.n_features(),
                learner.nodes,
                learner.activation,
                learner.u,
                learner.seed,
            )?;
            let model = if learner.kind == LearnerKind::RvflPinv {
                RvflModel::fit_pinv(layer, train.x(), train.y())?
            } else {
                RvflModel::fit_ridge(layer, train.x(), train.y(), learner.c)?
            };
            Ok((FittedModel::Rvfl(model), None))
        }
        LearnerKind::RvflPlus => {
            let layer = EnhancementLayer::init(
                train.n_features(),
                learner.nodes,
                learner.activation,
                learner.u,
                learner.seed,
            )?;
            // Independent draw for the privileged side: seed + 1.
            let layer_priv = EnhancementLayer::init(
                train.n_priv_features(),
                learner.nodes,
                learner.activation,
                learner.u,
                learner.seed.wrapping_add(1),
            )?;
            let (model, diagnostics) = RvflPlusModel::fit(
                layer,
                layer_priv,
                train.x(),
                train.x_priv().unwrap(),
                train.y(),
                learner.c,
                learner.gamma,
            )?;
            Ok((FittedModel::RvflPlus(model), Some(diagnostics)))
        }
        LearnerKind::KrvflPlus => {
            let spec = KernelSpec::gaussian(learner.tau)?;
            let model = kernel::train_krvfl_plus(
                train.x(),
                train.x_priv().unwrap(),
                train.y(),
                &spec,
                &spec,
                learner.c,
                learner.gamma,
            )?;
            Ok((FittedModel::KrvflPlus(model), None))
        }
    }
}

/// Trains the configured learner and returns raw predictions on the test
/// features. Privileged features are read from the training set only.
pub fn train_and_predict(
    train: &Dataset,
    test_x: &DMatrix<f64>,
    learner: &LearnerConfig,
) -> Result<DMatrix<f64>> {
    let (model, _) = fit_model(train, learner)?;
    model.predict(test_x)
}

/// Evaluates one train/test split and returns the task metric.
pub fn evaluate_split(train: &Dataset, test: &Dataset, learner: &LearnerConfig) -> Result<Metric> {
    let raw = train_and_predict(train, test.x(), learner)?;
    let prediction = Prediction::from_raw(raw, test.task())?;
    metrics(&prediction, test)
}

fn normalized_split(
    dataset: &Dataset,
    train_rows: &[usize],
    test_rows: &[usize],
    normalization: Normalization,
) -> Result<(Dataset, Dataset)> {
    let train = dataset.subset(train_rows)?;
    let test = dataset.subset(test_rows)?;
    match normalization {
        Normalization::Off | Normalization::Joint => Ok((train, test)),
        Normalization::FitOnTrain => {
            let scales = l1_column_scales(train.x());
            let train_x = apply_column_scales(train.x(), &scales);
            let test_x = apply_column_scales(test.x(), &scales);
            let mut train = train.with_x(train_x);
            if let Some(xp) = train.x_priv() {
                let priv_scales = l1_column_scales(xp);
                let xp = apply_column_scales(xp, &priv_scales);
                train = train.with_privileged(xp)?;
            }
            Ok((train, test.with_x(test_x)))
        }
    }
}

/// Runs k-fold cross-validation for one learner. Each fold is a trial with
/// its own derived seed; privileged features are available to the trained
/// model only, never to the prediction path.
pub fn run_cv(dataset: &Dataset, learner: &LearnerConfig, folds: &FoldPlan) -> Result<RunReport> {
    run_cv_with(dataset, learner, folds, Normalization::default())
}

/// [`run_cv`] with an explicit normalization mode.
pub fn run_cv_with(
    dataset: &Dataset,
    learner: &LearnerConfig,
    folds: &FoldPlan,
    normalization: Normalization,
) -> Result<RunReport> {
    if folds.n_rows() != dataset.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "fold plan covers {} rows but dataset has {}",
            folds.n_rows(),
            dataset.n_rows()
        )));
    }
    let dataset = match normalization {
        Normalization::Joint => data::normalize_l1(dataset),
        _ => dataset.clone(),
    };
    let mut trials = Vec::with_capacity(folds.k());
    let mut metric_name = "";
    let mut higher = true;
    for fold in 0..folds.k() {
        let started = Instant::now();
        let seed = trial_seed(learner.seed, fold);
        let (train, test) = normalized_split(
            &dataset,
            &folds.train_rows(fold),
            &folds.test_rows(fold),
            normalization,
        )?;
        let fold_learner = LearnerConfig { seed, ..*learner };
        let metric = evaluate_split(&train, &test, &fold_learner)?;
        metric_name = metric.name();
        higher = metric.higher_is_better();
        trials.push(TrialOutcome {
            index: fold,
            seed,
            value: metric.value(),
            wall_time_s: started.elapsed().as_secs_f64(),
        });
    }
    let config = config_snapshot(learner, &normalization)?;
    Ok(RunReport::from_trials(
        learner.kind.to_string(),
        metric_name.to_string(),
        higher,
        trials,
        config,
    ))
}

fn config_snapshot(learner: &LearnerConfig, normalization: &Normalization) -> Result<String> {
    #[derive(Serialize)]
    struct Snapshot<'a> {
        learner: &'a LearnerConfig,
        normalization: &'a Normalization,
    }
    serde_json::to_string(&Snapshot {
        learner,
        normalization,
    })
    .map_err(|e| Error::Persistence(e.to_string()))
}

/// One hyperparameter dimension of a search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ParamSpace {
    Fixed(f64),
    LogUniform { lo: f64, hi: f64 },
    Grid(Vec<f64>),
}

impl ParamSpace {
    fn validate(&self, name: &str) -> Result<()> {
        match self {
            ParamSpace::Fixed(v) => {
                if !(v.is_finite() && *v > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "{name} must be positive, got {v}"
                    )));
                }
            }
            ParamSpace::LogUniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && *lo > 0.0 && hi >= lo) {
                    return Err(Error::InvalidParameter(format!(
                        "{name} range [{lo}, {hi}] is not a positive interval"
                    )));
                }
            }
            ParamSpace::Grid(values) => {
                if values.is_empty() || values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return Err(Error::InvalidParameter(format!(
                        "{name} grid must be nonempty and positive"
                    )));
                }
            }
        }
        Ok(())
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            ParamSpace::Fixed(v) => *v,
            ParamSpace::LogUniform { lo, hi } => data::log_uniform(rng, *lo, *hi),
            ParamSpace::Grid(values) => values[rng.random_range(0..values.len())],
        }
    }
}

/// Random-search space. Defaults: `C` and `gamma` log-uniform over
/// `[1e-5, 1e5]`, `u` on the half-step power-of-two grid `2^-5 .. 2^5`,
/// `tau` log-uniform over `[0.01, 10]`, all five activations, 1000 nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub kind: LearnerKind,
    pub c: ParamSpace,
    pub gamma: ParamSpace,
    pub u: ParamSpace,
    pub tau: ParamSpace,
    pub activations: Vec<Activation>,
    pub nodes: usize,
    pub budget: usize,
}

impl SearchSpace {
    pub fn new(kind: LearnerKind, budget: usize) -> Self {
        let u_grid: Vec<f64> = (0..=20).map(|i| 2f64.powf(-5.0 + 0.5 * i as f64)).collect();
        Self {
            kind,
            c: ParamSpace::LogUniform { lo: 1e-5, hi: 1e5 },
            gamma: ParamSpace::LogUniform { lo: 1e-5, hi: 1e5 },
            u: ParamSpace::Grid(u_grid),
            tau: ParamSpace::LogUniform { lo: 0.01, hi: 10.0 },
            activations: Activation::ALL.to_vec(),
            nodes: 1000,
            budget,
        }
    }

    fn validate(&self) -> Result<()> {
        self.c.validate("C")?;
        self.gamma.validate("gamma")?;
        self.u.validate("u")?;
        self.tau.validate("tau")?;
        if self.activations.is_empty() {
            return Err(Error::InvalidParameter(
                "no activations to search over".into(),
            ));
        }
        if self.budget == 0 {
            return Err(Error::InvalidParameter("search budget must be >= 1".into()));
        }
        if self.nodes == 0 {
            return Err(Error::InvalidParameter("node count must be >= 1".into()));
        }
        Ok(())
    }

    fn draw<R: Rng>(&self, rng: &mut R, seed: u64) -> LearnerConfig {
        LearnerConfig {
            kind: self.kind,
            c: self.c.draw(rng),
            gamma: self.gamma.draw(rng),
            u: self.u.draw(rng),
            nodes: self.nodes,
            tau: self.tau.draw(rng),
            activation: self.activations[rng.random_range(0..self.activations.len())],
            seed,
        }
    }
}

/// Validation protocol used to score a hyperparameter draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Validation {
    Holdout { test_fraction: f64, split_seed: u64 },
    CrossVal { k: usize, fold_seed: u64 },
}

/// Result of a random hyperparameter search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best: LearnerConfig,
    pub best_score: f64,
    pub best_report: RunReport,
    /// Every evaluated draw with its score, in draw order.
    pub evaluated: Vec<(LearnerConfig, f64)>,
}

fn validation_report(
    dataset: &Dataset,
    learner: &LearnerConfig,
    validation: &Validation,
    normalization: Normalization,
) -> Result<RunReport> {
    match validation {
        Validation::CrossVal { k, fold_seed } => {
            let folds = data::make_folds(dataset.n_rows(), *k, *fold_seed)?;
            run_cv_with(dataset, learner, &folds, normalization)
        }
        Validation::Holdout {
            test_fraction,
            split_seed,
        } => {
            let started = Instant::now();
            let (train_raw, test_raw) = data::holdout_split(dataset, *test_fraction, *split_seed)?;
            let (train, test) = match normalization {
                Normalization::FitOnTrain => {
                    let scales = l1_column_scales(train_raw.x());
                    let train_x = apply_column_scales(train_raw.x(), &scales);
                    let test_x = apply_column_scales(test_raw.x(), &scales);
                    let mut train = train_raw.with_x(train_x);
                    if let Some(xp) = train.x_priv() {
                        let priv_scales = l1_column_scales(xp);
                        train = train.with_privileged(apply_column_scales(xp, &priv_scales))?;
                    }
                    (train, test_raw.with_x(test_x))
                }
                Normalization::Joint => {
                    let joint = data::normalize_l1(dataset);
                    data::holdout_split(&joint, *test_fraction, *split_seed)?
                }
                Normalization::Off => (train_raw, test_raw),
            };
            let metric = evaluate_split(&train, &test, learner)?;
            let trials = vec![TrialOutcome {
                index: 0,
                seed: learner.seed,
                value: metric.value(),
                wall_time_s: started.elapsed().as_secs_f64(),
            }];
            let config = config_snapshot(learner, &normalization)?;
            Ok(RunReport::from_trials(
                learner.kind.to_string(),
                metric.name().to_string(),
                metric.higher_is_better(),
                trials,
                config,
            ))
        }
    }
}

/// Draws `budget` configurations, scores each on the validation protocol,
/// and returns the best (highest mean for classification, lowest for
/// regression; ties keep the earliest draw).
pub fn random_search(
    dataset: &Dataset,
    space: &SearchSpace,
    validation: &Validation,
    seed: u64,
) -> Result<SearchOutcome> {
    random_search_with(dataset, space, validation, seed, Normalization::default())
}

/// [`random_search`] with an explicit normalization mode.
pub fn random_search_with(
    dataset: &Dataset,
    space: &SearchSpace,
    validation: &Validation,
    seed: u64,
    normalization: Normalization,
) -> Result<SearchOutcome> {
    space.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // One shared layer seed keeps draws comparable: score differences come
    // from hyperparameters, not from fresh random layers.
    let layer_seed = trial_seed(seed, usize::MAX >> 1);
    let mut best: Option<(LearnerConfig, f64, RunReport)> = None;
    let mut evaluated = Vec::with_capacity(space.budget);
    for _ in 0..space.budget {
        let candidate = space.draw(&mut rng, layer_seed);
        let report = validation_report(dataset, &candidate, validation, normalization)?;
        let score = report.mean;
        let improves = match &best {
            None => true,
            Some((_, incumbent, _)) => {
                if report.higher_is_better {
                    score > *incumbent
                } else {
                    score < *incumbent
                }
            }
        };
        evaluated.push((candidate, score));
        if improves {
            best = Some((candidate, score, report));
        }
    }
    let (best, best_score, best_report) = best.expect("budget >= 1 was validated");
    Ok(SearchOutcome {
        best,
        best_score,
        best_report,
        evaluated,
    })
}

/// Scores every activation with the same base configuration and returns
/// the per-activation reports plus the winner.
pub fn select_activation(
    dataset: &Dataset,
    base: &LearnerConfig,
    validation: &Validation,
    normalization: Normalization,
) -> Result<(Activation, Vec<(Activation, RunReport)>)> {
    let mut reports = Vec::with_capacity(Activation::ALL.len());
    let mut best: Option<(Activation, f64, bool)> = None;
    for activation in Activation::ALL {
        let candidate = LearnerConfig {
            activation,
            ..*base
        };
        let report = validation_report(dataset, &candidate, validation, normalization)?;
        let score = report.mean;
        let higher = report.higher_is_better;
        let improves = match best {
            None => true,
            Some((_, incumbent, _)) => {
                if higher {
                    score > incumbent
                } else {
                    score < incumbent
                }
            }
        };
        if improves {
            best = Some((activation, score, higher));
        }
        reports.push((activation, report));
    }
    Ok((best.expect("five activations evaluated").0, reports))
}

/// Noise benchmark: for each seed, the normal features of a fresh copy are
/// corrupted with white noise of the given power while the clean originals
/// are attached as privileged information; every learner is then
/// cross-validated on the corrupted data. Returns one report per learner
/// (seeds are trials).
pub fn run_noise_experiment(
    dataset: &Dataset,
    power_dbw: f64,
    learners: &[LearnerConfig],
    seeds: &[u64],
    k: usize,
) -> Result<Vec<RunReport>> {
    if dataset.x_priv().is_some() {
        return Err(Error::InvalidParameter(
            "noise experiment expects a dataset without a privileged split".into(),
        ));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("no seeds supplied".into()));
    }
    let mut reports = Vec::with_capacity(learners.len());
    for learner in learners {
        let mut trials = Vec::with_capacity(seeds.len());
        let mut metric_name = String::new();
        let mut higher = true;
        for (index, &seed) in seeds.iter().enumerate() {
            let started = Instant::now();
            let noisy = data::add_white_noise(dataset, power_dbw, seed)?;
            let with_priv = noisy.with_privileged(dataset.x().clone())?;
            let folds = data::make_folds(with_priv.n_rows(), k, seed)?;
            let seeded = learner.with_seed(trial_seed(learner.seed ^ seed, index));
            let report = run_cv(&with_priv, &seeded, &folds)?;
            metric_name = report.metric_name.clone();
            higher = report.higher_is_better;
            trials.push(TrialOutcome {
                index,
                seed,
                value: report.mean,
                wall_time_s: started.elapsed().as_secs_f64(),
            });
        }
        let config = config_snapshot(learner, &Normalization::default())?;
        reports.push(RunReport::from_trials(
            learner.kind.to_string(),
            metric_name,
            higher,
            trials,
            config,
        ));
    }
    Ok(reports)
}

/// Parameters of the synthetic privileged-information benchmark.
///
/// Each sample carries a clean scalar score drawn from one of two
/// class-conditional Gaussians (means `+-separation/2`, unit variance).
/// The observed label is the sign of the score, except that a random
/// `unreliable_rate` fraction of samples (the teacher-marked ones) have
/// their label re-drawn at random. Normal features spread the clean score
/// over `feature_dim` coordinates and add Gaussian noise; the privileged
/// block marks the unreliable samples: zero for reliable rows,
/// `sketch_scale` times a sample-specific random unit direction in
/// `sketch_dim` dimensions for unreliable ones. The marks give the
/// correcting function per-sample slack capacity exactly where the labels
/// are untrustworthy, which is the information a teacher has and the
/// test-time model does not.
///
/// Privileged features that themselves predict the labels do not work
/// here: the correcting function then absorbs the label structure the
/// main model is supposed to learn, and accuracy degrades monotonically
/// as `gamma` shrinks. Reliability marks are label-independent, so the
/// absorbed component is exactly the noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticLupiSpec {
    pub samples: usize,
    /// Width of the normal feature block.
    pub feature_dim: usize,
    /// Gap between the two class means of the clean score.
    pub separation: f64,
    /// Noise standard deviation on each normal feature.
    pub noise_std: f64,
    /// Fraction of samples whose label is re-drawn at random.
    pub unreliable_rate: f64,
    /// Width of the privileged reliability sketch.
    pub sketch_dim: usize,
    /// Magnitude of the sketch rows marking unreliable samples.
    pub sketch_scale: f64,
}

impl Default for SyntheticLupiSpec {
    fn default() -> Self {
        Self {
            samples: 320,
            feature_dim: 6,
            separation: 2.4,
            noise_std: 1.2,
            unreliable_rate: 0.35,
            sketch_dim: 96,
            sketch_scale: 30.0,
        }
    }
}

/// Generates a binary dataset per [`SyntheticLupiSpec`], deterministically
/// from a seed. Rows alternate between the two classes.
pub fn synthetic_lupi(spec: &SyntheticLupiSpec, seed: u64) -> Result<Dataset> {
    if spec.samples < 4 || spec.feature_dim == 0 || spec.sketch_dim == 0 {
        return Err(Error::InvalidParameter(
            "need at least 4 samples and 1 feature/sketch dimension".into(),
        ));
    }
    if spec.separation <= 0.0
        || spec.noise_std < 0.0
        || !spec.noise_std.is_finite()
        || !(0.0..=1.0).contains(&spec.unreliable_rate)
        || spec.sketch_scale <= 0.0
    {
        return Err(Error::InvalidParameter(
            "separation and sketch scale must be positive, noise nonnegative, \
             unreliable rate in [0, 1]"
                .into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let n = spec.samples;
    let q = spec.feature_dim;

    let mut x = DMatrix::zeros(n, q);
    let mut sketch = DMatrix::zeros(n, spec.sketch_dim);
    let mut y = DMatrix::zeros(n, 1);
    for i in 0..n {
        let class = if i % 2 == 0 { 1.0 } else { -1.0 };
        let score = class * spec.separation / 2.0 + unit.sample(&mut rng);
        let mut label = if score >= 0.0 { 1.0 } else { -1.0 };
        let unreliable = rng.random::<f64>() < spec.unreliable_rate;
        if unreliable && rng.random::<f64>() < 0.5 {
            label = -label;
        }
        y[(i, 0)] = label;
        for j in 0..q {
            x[(i, j)] = score / (q as f64).sqrt() + spec.noise_std * unit.sample(&mut rng);
        }
        let mut direction: Vec<f64> = (0..spec.sketch_dim)
            .map(|_| unit.sample(&mut rng))
            .collect();
        let norm = direction
            .iter()
            .map(|a| a * a)
            .sum::<f64>()
            .sqrt()
            .max(1e-300);
        if unreliable {
            for j in 0..spec.sketch_dim {
                sketch[(i, j)] = spec.sketch_scale * direction[j] / norm;
            }
        }
        direction.clear();
    }
    Dataset::new(x, Some(sketch), y, Task::Binary, None)
}
