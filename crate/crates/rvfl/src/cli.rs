//! Command surface behind the `rvfl` binary: train, predict,
//! cross-validate, random hyperparameter search, noise benchmark,
//! closed-form verification, and generalization-bound evaluation.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
//! failure. Reports echo the full configuration plus a stable hash of it,
//! so every run is reproducible from its report alone.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bound::{generalization_bound_terms, BoundInputs};
use crate::data::{self, apply_column_scales, l1_column_scales, Dataset, LabelColumn, Task};
use crate::enhance::{Activation, EnhancedOutput};
use crate::error::{Error, Result};
use crate::harness::{
    self, fit_model, FittedModel, LearnerConfig, LearnerKind, Normalization, ParamSpace, RunReport,
    SearchSpace, Validation,
};
use crate::oracle;
use crate::predict::{metrics, Decided, Prediction};
use crate::solvers::{self, RhsForm, CONDITION_WARN_THRESHOLD};

/// Closed-form learners backed by an independent optimality oracle.
#[derive(Debug, Parser)]
#[command(name = "rvfl", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model on a CSV dataset and persist it.
    Train(TrainArgs),
    /// Predict with a persisted model on a CSV dataset.
    Predict(PredictArgs),
    /// k-fold cross-validation benchmark for one or more learners.
    Cv(CvArgs),
    /// Random hyperparameter search.
    Search(SearchArgs),
    /// White-noise robustness benchmark (clean features become privileged).
    BenchNoise(BenchNoiseArgs),
    /// Check the closed-form trainer against the KKT saddle-point oracle.
    Verify(VerifyArgs),
    /// Evaluate the Rademacher-complexity generalization bound.
    Bound(BoundArgs),
}

impl Cli {
    /// Runs the selected command, returning the process exit code.
    pub fn run(self) -> Result<i32> {
        match self.command {
            Command::Train(args) => cmd_train(&args).map(|_| 0),
            Command::Predict(args) => cmd_predict(&args).map(|_| 0),
            Command::Cv(args) => cmd_cv(&args).map(|_| 0),
            Command::Search(args) => cmd_search(&args).map(|_| 0),
            Command::BenchNoise(args) => cmd_bench_noise(&args).map(|_| 0),
            Command::Verify(args) => {
                let report = cmd_verify(args.instances, args.seed, args.flip_sign)?;
                println!("{}", report.render());
                Ok(if report.pass { 0 } else { 3 })
            }
            Command::Bound(args) => cmd_bound(&args).map(|_| 0),
        }
    }
}

/// Maps library errors to the documented exit codes.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::InvalidParameter(_) => 1,
        Error::Io { .. }
        | Error::MalformedRow { .. }
        | Error::NonNumericCell { .. }
        | Error::UnknownLabelColumn(_)
        | Error::TaskMismatch(_)
        | Error::DimensionMismatch(_)
        | Error::Persistence(_) => 2,
        Error::SingularSystem(_) => 3,
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Path to the CSV dataset.
    #[arg(long)]
    pub data: PathBuf,
    /// Label column: a zero-based index or a header name.
    #[arg(long, default_value = "label")]
    pub label: String,
    /// Task kind: binary, multiclass, or regression.
    #[arg(long, default_value = "multiclass")]
    pub task: String,
    /// Whether the file starts with a header row.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub has_header: bool,
    /// Column count kept as normal features; the rest become privileged.
    /// Defaults to half the attributes (rounded up) for learners that use
    /// privileged information, and all attributes otherwise.
    #[arg(long)]
    pub normal_count: Option<usize>,
    /// Run a binary task through the two-column one-vs-all route.
    #[arg(long, default_value_t = false)]
    pub one_vs_all: bool,
    /// L1 normalization mode: fit-on-train, joint, or off.
    #[arg(long, default_value = "fit-on-train")]
    pub l1: String,
}

#[derive(Debug, Clone, Args)]
pub struct LearnerArgs {
    /// Learner kind: rvfl-pinv, rvfl-ridge, rvfl-plus, or krvfl-plus.
    #[arg(long, default_value = "rvfl-ridge")]
    pub learner: String,
    /// Regularization trade-off C.
    #[arg(long)]
    pub c: Option<f64>,
    /// Privileged-space regularization gamma.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Enhancement initialization half-range u.
    #[arg(long)]
    pub u: Option<f64>,
    /// Enhancement node count P.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Gaussian kernel parameter tau (kernel learner only).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Activation: sigmoid, sine, hardlim, tribas, or radbas.
    #[arg(long)]
    pub activation: Option<String>,
    /// Master seed for random layers and derived trial streams.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl LearnerArgs {
    pub fn to_config(&self) -> Result<LearnerConfig> {
        let kind: LearnerKind = self.learner.parse()?;
        let mut config = LearnerConfig::new(kind).with_seed(self.seed);
        if let Some(c) = self.c {
            config.c = c;
        }
        if let Some(gamma) = self.gamma {
            config.gamma = gamma;
        }
        if let Some(u) = self.u {
            config.u = u;
        }
        if let Some(nodes) = self.nodes {
            config.nodes = nodes;
        }
        if let Some(tau) = self.tau {
            config.tau = tau;
        }
        if let Some(activation) = &self.activation {
            config.activation = activation.parse()?;
        }
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub learner: LearnerArgs,
    /// Where to write the trained model (JSON).
    #[arg(long)]
    pub model_out: PathBuf,
    /// Optional path for the JSON training report (stdout summary always).
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Path to a model produced by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// CSV dataset with the same schema the model was trained on.
    #[arg(long)]
    pub data: PathBuf,
    /// Whether the file starts with a header row.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub has_header: bool,
    /// Label column of the prediction dataset.
    #[arg(long, default_value = "label")]
    pub label: String,
    /// Where to write predictions (CSV: raw outputs, decided label).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub learner: LearnerArgs,
    /// Additional learners to benchmark side by side.
    #[arg(long = "also", value_delimiter = ',')]
    pub also: Vec<String>,
    /// Fold count.
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Where to write the report CSV.
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Learner kind to tune.
    #[arg(long, default_value = "rvfl-plus")]
    pub learner: String,
    /// C dimension: a value, `lo..hi` (log-uniform), or `a,b,c` (grid).
    #[arg(long, default_value = "1e-5..1e5")]
    pub c: String,
    /// gamma dimension, same forms as --c.
    #[arg(long, default_value = "1e-5..1e5")]
    pub gamma: String,
    /// u dimension, same forms as --c; defaults to the power-of-two grid.
    #[arg(long)]
    pub u: Option<String>,
    /// tau dimension, same forms as --c.
    #[arg(long, default_value = "0.01..10")]
    pub tau: String,
    /// Activations to search over.
    #[arg(long, value_delimiter = ',')]
    pub activations: Vec<String>,
    /// Enhancement node count P.
    #[arg(long, default_value_t = 1000)]
    pub nodes: usize,
    /// Number of random draws.
    #[arg(long, default_value_t = 60)]
    pub budget: usize,
    /// Validation protocol: `cv:<k>` or `holdout:<fraction>`.
    #[arg(long, default_value = "cv:5")]
    pub validation: String,
    /// Search seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the per-draw log CSV.
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchNoiseArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub learner: LearnerArgs,
    /// Additional learners to benchmark side by side.
    #[arg(long = "also", value_delimiter = ',')]
    pub also: Vec<String>,
    /// White-noise power in dBW (variance = 10^(dBW/10)).
    #[arg(long, default_value_t = 10.0)]
    pub power_dbw: f64,
    /// Number of seed-replicated trials.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Fold count inside each trial.
    #[arg(long, default_value_t = 2)]
    pub folds: usize,
    /// Where to write the report CSV.
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Number of randomized instances to check.
    #[arg(long, default_value_t = 100)]
    pub instances: usize,
    /// Instance-generator seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Debug option: use the minus-sign right-hand side and show that it
    /// disagrees with the oracle.
    #[arg(long, default_value_t = false)]
    pub flip_sign: bool,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Measured empirical loss.
    #[arg(long, default_value_t = 0.0)]
    pub empirical_loss: f64,
    /// Lipschitz constant of the loss.
    #[arg(long, default_value_t = 1.0)]
    pub lipschitz: f64,
    /// Enhanced-vector norm bound Z.
    #[arg(long)]
    pub feature_bound: f64,
    /// Weight norm bound B.
    #[arg(long)]
    pub weight_bound: f64,
    /// Sample count M.
    #[arg(long)]
    pub samples: usize,
    /// Confidence parameter delta in (0, 1).
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
}

/// Fully resolved run configuration, echoed into every report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub dataset: String,
    pub task: Task,
    pub label: String,
    pub has_header: bool,
    pub normal_count: Option<usize>,
    pub one_vs_all: bool,
    pub normalization: Normalization,
    pub learner: LearnerConfig,
    pub folds: Option<usize>,
    pub output: Option<String>,
}

impl RunConfig {
    pub fn echo_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Persistence(e.to_string()))
    }
}

/// FNV-1a over the echoed configuration; stable across runs and versions.
pub fn config_hash(config_json: &str) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in config_json.bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

fn parse_task(s: &str) -> Result<Task> {
    match s.to_ascii_lowercase().as_str() {
        "binary" => Ok(Task::Binary),
        "multiclass" => Ok(Task::Multiclass),
        "regression" => Ok(Task::Regression),
        other => Err(Error::InvalidParameter(format!(
            "unknown task {other:?} (expected binary, multiclass, regression)"
        ))),
    }
}

fn parse_label(s: &str) -> LabelColumn {
    match s.parse::<usize>() {
        Ok(index) => LabelColumn::Index(index),
        Err(_) => LabelColumn::Name(s.to_string()),
    }
}

fn parse_normalization(s: &str) -> Result<Normalization> {
    match s.to_ascii_lowercase().as_str() {
        "fit-on-train" | "fit" => Ok(Normalization::FitOnTrain),
        "joint" => Ok(Normalization::Joint),
        "off" | "none" => Ok(Normalization::Off),
        other => Err(Error::InvalidParameter(format!(
            "unknown normalization {other:?} (expected fit-on-train, joint, off)"
        ))),
    }
}

/// Parses a hyperparameter dimension: `v` fixes it, `lo..hi` searches
/// log-uniformly, `a,b,c` searches a grid.
pub fn parse_param_space(s: &str) -> Result<ParamSpace> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: f64 = lo.trim().parse().map_err(|_| bad_dim(s))?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad_dim(s))?;
        return Ok(ParamSpace::LogUniform { lo, hi });
    }
    if s.contains(',') {
        let values = s
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad_dim(s)))
            .collect::<Result<Vec<f64>>>()?;
        return Ok(ParamSpace::Grid(values));
    }
    Ok(ParamSpace::Fixed(s.trim().parse().map_err(|_| bad_dim(s))?))
}

fn bad_dim(s: &str) -> Error {
    Error::InvalidParameter(format!(
        "cannot parse {s:?} as a value, `lo..hi` range, or `a,b,c` grid"
    ))
}

struct LoadedData {
    dataset: Dataset,
    config_task: Task,
    feature_scales: Option<Vec<f64>>,
    normal_count: Option<usize>,
}

/// Loads, splits, converts, and (for `train`) normalizes a dataset per the
/// shared data flags.
fn load_for_learner(
    args: &DataArgs,
    learner: &LearnerConfig,
    fit_scales: bool,
) -> Result<LoadedData> {
    let task = parse_task(&args.task)?;
    let mut dataset = data::load_csv(&args.data, &parse_label(&args.label), task, args.has_header)?;

    let needs_privileged = matches!(learner.kind, LearnerKind::RvflPlus | LearnerKind::KrvflPlus);
    let normal_count = if needs_privileged || args.normal_count.is_some() {
        let count = args
            .normal_count
            .unwrap_or_else(|| data::default_normal_count(dataset.n_features()));
        dataset = data::split_privileged(&dataset, count)?;
        Some(count)
    } else {
        None
    };

    if args.one_vs_all {
        dataset = dataset.to_one_vs_all()?;
    }

    let mut feature_scales = None;
    if fit_scales && parse_normalization(&args.l1)? != Normalization::Off {
        let scales = l1_column_scales(dataset.x());
        let x = apply_column_scales(dataset.x(), &scales);
        feature_scales = Some(scales.iter().copied().collect());
        dataset = match dataset.x_priv() {
            Some(xp) => {
                let priv_scales = l1_column_scales(xp);
                let xp = apply_column_scales(xp, &priv_scales);
                let with_x = Dataset::new(
                    x,
                    None,
                    dataset.y().clone(),
                    dataset.task(),
                    dataset.class_labels().map(<[String]>::to_vec),
                )?;
                with_x.with_privileged(xp)?
            }
            None => Dataset::new(
                x,
                None,
                dataset.y().clone(),
                dataset.task(),
                dataset.class_labels().map(<[String]>::to_vec),
            )?,
        };
    }

    Ok(LoadedData {
        dataset,
        config_task: task,
        feature_scales,
        normal_count,
    })
}

/// Persisted model wrapper: everything `predict` needs to reproduce the
/// training-time feature pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub task: Task,
    pub class_labels: Option<Vec<String>>,
    pub feature_scales: Option<Vec<f64>>,
    pub normal_count: Option<usize>,
    pub model: FittedModel,
}

pub const MODEL_FORMAT: &str = "rvfl-model/1";

impl ModelFile {
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self).map_err(|e| Error::Persistence(e.to_string()))?;
        fs::write(path, json).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let file: ModelFile =
            serde_json::from_str(&text).map_err(|e| Error::Persistence(e.to_string()))?;
        if file.format != MODEL_FORMAT {
            return Err(Error::Persistence(format!(
                "unsupported model format {:?}",
                file.format
            )));
        }
        Ok(file)
    }
}

/// Training report written by `cmd_train`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub config: RunConfig,
    pub config_hash: String,
    pub metric_name: String,
    pub train_metric: f64,
    pub wall_time_s: f64,
    pub kkt_residual: Option<f64>,
    pub condition_estimate: Option<f64>,
}

pub fn cmd_train(args: &TrainArgs) -> Result<TrainReport> {
    let started = Instant::now();
    let learner = args.learner.to_config()?;
    let loaded = load_for_learner(&args.data, &learner, true)?;
    let dataset = &loaded.dataset;

    let (model, diagnostics) = fit_model(dataset, &learner)?;
    let condition_estimate = match (&model, &diagnostics) {
        (_, Some(d)) => Some(d.condition_estimate),
        (FittedModel::KrvflPlus(m), _) => Some(m.condition_estimate()),
        _ => None,
    };
    if let Some(cond) = condition_estimate {
        if cond > CONDITION_WARN_THRESHOLD {
            eprintln!("warning: solve conditioning estimate {cond:.3e} exceeds {CONDITION_WARN_THRESHOLD:.0e}");
        }
    }

    let raw = model.predict(dataset.x())?;
    let prediction = Prediction::from_raw(raw, dataset.task())?;
    let train_metric = metrics(&prediction, dataset)?;

    let config = RunConfig {
        subcommand: "train".into(),
        dataset: args.data.data.display().to_string(),
        task: loaded.config_task,
        label: args.data.label.clone(),
        has_header: args.data.has_header,
        normal_count: loaded.normal_count,
        one_vs_all: args.data.one_vs_all,
        normalization: parse_normalization(&args.data.l1)?,
        learner,
        folds: None,
        output: Some(args.model_out.display().to_string()),
    };
    let echoed = config.echo_json()?;

    let file = ModelFile {
        format: MODEL_FORMAT.into(),
        task: dataset.task(),
        class_labels: dataset.class_labels().map(<[String]>::to_vec),
        feature_scales: loaded.feature_scales,
        normal_count: loaded.normal_count,
        model,
    };
    file.save(&args.model_out)?;

    let report = TrainReport {
        config_hash: config_hash(&echoed),
        config,
        metric_name: train_metric.name().into(),
        train_metric: train_metric.value(),
        wall_time_s: started.elapsed().as_secs_f64(),
        kkt_residual: diagnostics.as_ref().map(|d| d.kkt_residual),
        condition_estimate,
    };
    if let Some(path) = &args.report_out {
        let json =
            serde_json::to_string_pretty(&report).map_err(|e| Error::Persistence(e.to_string()))?;
        fs::write(path, json).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    println!(
        "trained {} on {} ({} rows): train {} {:.4}; model -> {}",
        report.config.learner.kind,
        report.config.dataset,
        dataset.n_rows(),
        report.metric_name,
        report.train_metric,
        args.model_out.display()
    );
    Ok(report)
}

pub fn cmd_predict(args: &PredictArgs) -> Result<Option<f64>> {
    let file = ModelFile::load(&args.model)?;
    let mut dataset = data::load_csv(
        &args.data,
        &parse_label(&args.label),
        match file.task {
            Task::Multiclass if file.class_labels.as_deref().map(<[String]>::len) == Some(2) => {
                // Binary model trained through the one-vs-all route.
                Task::Binary
            }
            task => task,
        },
        args.has_header,
    )?;
    if dataset.task() != file.task {
        dataset = dataset.to_one_vs_all()?;
    }
    if let Some(count) = file.normal_count {
        if dataset.x_priv().is_none() && dataset.n_features() > count {
            dataset = data::split_privileged(&dataset, count)?;
        }
    }
    let mut x = dataset.x().clone();
    if let Some(scales) = &file.feature_scales {
        if scales.len() != x.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "model expects {} feature columns, got {}",
                scales.len(),
                x.ncols()
            )));
        }
        let scales = nalgebra::DVector::from_vec(scales.clone());
        x = apply_column_scales(&x, &scales);
    }

    let raw = file.model.predict(&x)?;
    let prediction = Prediction::from_raw(raw, file.task)?;
    write_predictions(&args.out, &prediction, file.class_labels.as_deref())?;

    let metric = metrics(&prediction, &dataset).ok();
    match &metric {
        Some(m) => println!(
            "predicted {} rows -> {}; {}",
            x.nrows(),
            args.out.display(),
            m
        ),
        None => println!("predicted {} rows -> {}", x.nrows(), args.out.display()),
    }
    Ok(metric.map(|m| m.value()))
}

fn write_predictions(
    path: &Path,
    prediction: &Prediction,
    class_labels: Option<&[String]>,
) -> Result<()> {
    let raw = prediction.raw();
    let mut out = String::new();
    for k in 0..raw.ncols() {
        let _ = write!(out, "raw_{k},");
    }
    out.push_str("decided\n");
    for i in 0..raw.nrows() {
        for k in 0..raw.ncols() {
            let _ = write!(out, "{},", raw[(i, k)]);
        }
        let decided = match prediction.decided() {
            Decided::Binary(signs) => {
                let idx = if signs[i] < 0.0 { 0 } else { 1 };
                class_labels
                    .map(|l| l[idx].clone())
                    .unwrap_or_else(|| format!("{}", signs[i]))
            }
            Decided::Class(classes) => class_labels
                .map(|l| l[classes[i]].clone())
                .unwrap_or_else(|| format!("{}", classes[i])),
            Decided::Real(values) => format!("{}", values[(i, 0)]),
        };
        out.push_str(&decided);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// One CSV row per report: learner, dataset, metric, mean, std, time_s,
/// seed, config_hash.
pub fn write_report_csv(path: &Path, dataset_name: &str, reports: &[RunReport]) -> Result<()> {
    let mut out = String::from("learner,dataset,metric,mean,std,time_s,seed,config_hash\n");
    for report in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            report.learner,
            dataset_name,
            report.metric_name,
            report.mean,
            report.std,
            report.wall_time_s,
            report.seeds.first().copied().unwrap_or(0),
            config_hash(&report.config),
        );
    }
    fs::write(path, out).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn render_report_table(reports: &[RunReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:<10} {:>10} {:>10} {:>10}",
        "learner", "metric", "mean", "std", "time_s"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<12} {:<10} {:>10.4} {:>10.4} {:>10.3}",
            r.learner, r.metric_name, r.mean, r.std, r.wall_time_s
        );
    }
    out
}

pub fn cmd_cv(args: &CvArgs) -> Result<Vec<RunReport>> {
    let learner = args.learner.to_config()?;
    let mut learners = vec![learner];
    for name in &args.also {
        let kind: LearnerKind = name.parse()?;
        let mut alt = args.learner.to_config()?;
        alt.kind = kind;
        if kind == LearnerKind::KrvflPlus && args.learner.gamma.is_none() {
            alt.gamma = LearnerConfig::new(kind).gamma;
        }
        learners.push(alt);
    }
    let loaded = load_for_learner(&args.data, pick_most_demanding(&learners), false)?;
    let normalization = parse_normalization(&args.data.l1)?;
    let folds = data::make_folds(loaded.dataset.n_rows(), args.folds, learner.seed)?;

    let mut reports = Vec::new();
    for learner in &learners {
        reports.push(harness::run_cv_with(
            &loaded.dataset,
            learner,
            &folds,
            normalization,
        )?);
    }
    print!("{}", render_report_table(&reports));
    if let Some(path) = &args.report_out {
        write_report_csv(path, &args.data.data.display().to_string(), &reports)?;
    }
    Ok(reports)
}

/// Privileged learners force the privileged split for everyone in a mixed
/// benchmark, so all learners see the same normal features.
fn pick_most_demanding(learners: &[LearnerConfig]) -> &LearnerConfig {
    learners
        .iter()
        .find(|l| matches!(l.kind, LearnerKind::RvflPlus | LearnerKind::KrvflPlus))
        .unwrap_or(&learners[0])
}

fn parse_validation(s: &str, seed: u64) -> Result<Validation> {
    if let Some(k) = s.strip_prefix("cv:") {
        let k: usize = k
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad fold count in {s:?}")))?;
        return Ok(Validation::CrossVal { k, fold_seed: seed });
    }
    if let Some(fraction) = s.strip_prefix("holdout:") {
        let test_fraction: f64 = fraction
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad holdout fraction in {s:?}")))?;
        return Ok(Validation::Holdout {
            test_fraction,
            split_seed: seed,
        });
    }
    Err(Error::InvalidParameter(format!(
        "unknown validation {s:?} (expected cv:<k> or holdout:<fraction>)"
    )))
}

pub fn cmd_search(args: &SearchArgs) -> Result<harness::SearchOutcome> {
    let kind: LearnerKind = args.learner.parse()?;
    let mut space = SearchSpace::new(kind, args.budget);
    space.c = parse_param_space(&args.c)?;
    space.gamma = parse_param_space(&args.gamma)?;
    if let Some(u) = &args.u {
        space.u = parse_param_space(u)?;
    }
    space.tau = parse_param_space(&args.tau)?;
    space.nodes = args.nodes;
    if !args.activations.is_empty() {
        space.activations = args
            .activations
            .iter()
            .map(|a| a.parse::<Activation>())
            .collect::<Result<Vec<_>>>()?;
    }

    let probe = LearnerConfig::new(kind);
    let loaded = load_for_learner(&args.data, &probe, false)?;
    let normalization = parse_normalization(&args.data.l1)?;
    let validation = parse_validation(&args.validation, args.seed)?;

    let outcome = harness::random_search_with(
        &loaded.dataset,
        &space,
        &validation,
        args.seed,
        normalization,
    )?;
    println!(
        "best of {} draws: {} (score {:.4} {})",
        outcome.evaluated.len(),
        summarize_config(&outcome.best),
        outcome.best_score,
        outcome.best_report.metric_name
    );
    if let Some(path) = &args.report_out {
        let mut out = String::from("draw,c,gamma,u,tau,activation,score\n");
        for (i, (config, score)) in outcome.evaluated.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                i, config.c, config.gamma, config.u, config.tau, config.activation, score
            );
        }
        fs::write(path, out).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    Ok(outcome)
}

fn summarize_config(config: &LearnerConfig) -> String {
    format!(
        "{} C={:.4e} gamma={:.4e} u={:.3} tau={:.3} act={} P={}",
        config.kind, config.c, config.gamma, config.u, config.tau, config.activation, config.nodes
    )
}

pub fn cmd_bench_noise(args: &BenchNoiseArgs) -> Result<Vec<RunReport>> {
    let learner = args.learner.to_config()?;
    let mut learners = vec![learner];
    for name in &args.also {
        let kind: LearnerKind = name.parse()?;
        let mut alt = args.learner.to_config()?;
        alt.kind = kind;
        if kind == LearnerKind::KrvflPlus && args.learner.gamma.is_none() {
            alt.gamma = LearnerConfig::new(kind).gamma;
        }
        learners.push(alt);
    }
    // The noise protocol attaches clean features as privileged itself, so
    // the dataset is loaded without a privileged split.
    let task = parse_task(&args.data.task)?;
    let mut dataset = data::load_csv(
        &args.data.data,
        &parse_label(&args.data.label),
        task,
        args.data.has_header,
    )?;
    if args.data.one_vs_all {
        dataset = dataset.to_one_vs_all()?;
    }
    if parse_normalization(&args.data.l1)? != Normalization::Off {
        dataset = data::normalize_l1(&dataset);
    }
    let seeds: Vec<u64> = (0..args.trials as u64).collect();
    let reports =
        harness::run_noise_experiment(&dataset, args.power_dbw, &learners, &seeds, args.folds)?;
    println!(
        "noise power: {} dBW (variance {:.4})",
        args.power_dbw,
        10f64.powf(args.power_dbw / 10.0)
    );
    print!("{}", render_report_table(&reports));
    if let Some(path) = &args.report_out {
        write_report_csv(path, &args.data.data.display().to_string(), &reports)?;
    }
    Ok(reports)
}

/// Result of the closed-form-vs-oracle equivalence run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub instances: usize,
    pub flip_sign: bool,
    pub max_weight_err: f64,
    pub max_correcting_err: f64,
    pub max_lambda_err: f64,
    pub max_kkt_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerifyReport {
    pub fn render(&self) -> String {
        format!(
            "checked {} randomized instances{}\n\
             max relative error: w {:.3e}, w_corr {:.3e}, lambda {:.3e}\n\
             max KKT residual: {:.3e}\n\
             tolerance {:.1e}: {}",
            self.instances,
            if self.flip_sign {
                " (flipped right-hand-side sign)"
            } else {
                ""
            },
            self.max_weight_err,
            self.max_correcting_err,
            self.max_lambda_err,
            self.max_kkt_residual,
            self.tolerance,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Trains the closed form and the KKT oracle on `instances` random
/// problems and compares them. With `flip_sign` the closed form uses the
/// minus-sign right-hand side, demonstrating that the two routes disagree
/// under the transcription error.
pub fn cmd_verify(instances: usize, seed: u64, flip_sign: bool) -> Result<VerifyReport> {
    if instances == 0 {
        return Err(Error::InvalidParameter(
            "instance count must be >= 1".into(),
        ));
    }
    let tolerance = 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport {
        instances,
        flip_sign,
        max_weight_err: 0.0,
        max_correcting_err: 0.0,
        max_lambda_err: 0.0,
        max_kkt_residual: 0.0,
        tolerance,
        pass: true,
    };
    let rel = |a: &DMatrix<f64>, b: &DMatrix<f64>| (a - b).norm() / b.norm().max(1.0);
    for _ in 0..instances {
        let inst = oracle::sample_instance(&mut rng);
        let h = EnhancedOutput::from_matrix(inst.h.clone(), 0)?;
        let h_priv = EnhancedOutput::from_matrix(inst.h_priv.clone(), 0)?;
        let form = if flip_sign {
            RhsForm::FlippedSign
        } else {
            RhsForm::Consistent
        };
        let (solution, diag) =
            solvers::train_rvfl_plus_with_rhs(&h, &h_priv, &inst.y, inst.c, inst.gamma, form)?;
        let truth = oracle::solve_primal_kkt(&inst.h, &inst.h_priv, &inst.y, inst.c, inst.gamma)?;
        report.max_weight_err = report.max_weight_err.max(rel(&solution.weights, &truth.w));
        report.max_correcting_err = report
            .max_correcting_err
            .max(rel(&solution.correcting_weights, &truth.w_corr));
        report.max_lambda_err = report.max_lambda_err.max(rel(&diag.lambda, &truth.lambda));
        report.max_kkt_residual = report.max_kkt_residual.max(diag.kkt_residual);
    }
    report.pass = report.max_weight_err <= tolerance
        && report.max_correcting_err <= tolerance
        && report.max_lambda_err <= tolerance
        && report.max_kkt_residual <= tolerance;
    Ok(report)
}

pub fn cmd_bound(args: &BoundArgs) -> Result<f64> {
    let inputs = BoundInputs {
        lipschitz: args.lipschitz,
        feature_norm_bound: args.feature_bound,
        weight_norm_bound: args.weight_bound,
        samples: args.samples,
        delta: args.delta,
        empirical_loss: args.empirical_loss,
    };
    let terms = generalization_bound_terms(&inputs)?;
    println!("empirical loss:   {:.6}", terms.empirical_loss);
    println!(
        "complexity term:  {:.6}  (2 K Z B / sqrt(M))",
        terms.complexity_term
    );
    println!(
        "confidence term:  {:.6}  (K Z B sqrt(ln(1/delta) / (2M)))",
        terms.confidence_term
    );
    println!("bound:            {:.6}", terms.total());
    println!(
        "note: valid when the loss is bounded by K*Z*B = {:.6} on the evaluation domain",
        args.lipschitz * args.feature_bound * args.weight_bound
    );
    Ok(terms.total())
}
