//! Randomized feedforward networks with a direct input-output link, trained
//! in closed form, plus the privileged-information variants that accept an
//! extra training-only feature block and their kernelized counterpart.
//!
//! The crate is organized around the training pipeline:
//!
//! - [`data`]: CSV loading, L1 normalization, normal/privileged feature
//!   splits, white-noise injection, fold plans.
//! - [`enhance`]: the frozen random enhancement layer and its activations.
//! - [`solvers`]: closed-form output-weight solvers (pseudo-inverse, ridge,
//!   and the privileged-information ridge with a correcting function).
//! - [`kernel`]: the kernelized privileged-information machine built on
//!   linear-plus-Mercer Gram matrices.
//! - [`oracle`]: an independent KKT saddle-point solver used to validate the
//!   closed forms.
//! - [`predict`]: decision rules (sign, one-vs-all argmax, regression) and
//!   metrics.
//! - [`bound`]: Rademacher-complexity generalization bound evaluation.
//! - [`harness`]: cross-validation, random hyperparameter search, and noise
//!   benchmarks with seed-replicated reporting.
//! - [`cli`]: the command surface behind the `rvfl` binary.
//!
//! See the crate examples for one runnable program per capability.

pub mod bound;
pub mod cli;
pub mod data;
pub mod enhance;
pub mod error;
pub mod harness;
pub mod kernel;
pub mod oracle;
pub mod predict;
pub mod solvers;

pub use data::{Dataset, FoldPlan, Task};
pub use enhance::{Activation, EnhancedOutput, EnhancementLayer};
pub use error::{Error, Result};
