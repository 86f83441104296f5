//! Rademacher-complexity generalization bound.
//!
//! For a K-Lipschitz loss, enhanced vectors bounded by `|h|_2 <= Z`, and
//! output weights bounded by `|w|_2 <= B`, the complexity of the predictor
//! class over M samples is at most `Z B sqrt(1/M)`, and with probability at
//! least `1 - delta` the population loss is bounded by
//!
//! ```text
//! L(f) <= L_hat(f) + 2 K Z B sqrt(1/M) + K Z B sqrt(ln(1/delta) / (2M))
//! ```
//!
//! The last term uses `K Z B` as the bounded-loss constant; callers should
//! treat the result as conditional on the loss actually being bounded by
//! that product on the evaluation domain (true for the absolute loss on
//! `|f| <= Z B` with targets in `[-1, 1]` up to the +1 shift absorbed in K).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::enhance::EnhancedOutput;
use crate::error::{Error, Result};
use crate::solvers::RvflPlusModel;

/// Inputs to [`generalization_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Lipschitz constant of the loss (defaults to 1, the absolute loss).
    pub lipschitz: f64,
    /// Bound on the enhanced-vector 2-norm.
    pub feature_norm_bound: f64,
    /// Bound on the output-weight 2-norm.
    pub weight_norm_bound: f64,
    /// Sample count the bound is evaluated at.
    pub samples: usize,
    /// Confidence parameter in (0, 1).
    pub delta: f64,
    /// Measured empirical loss.
    pub empirical_loss: f64,
}

impl BoundInputs {
    fn validate(&self) -> Result<()> {
        if !(self.lipschitz > 0.0 && self.lipschitz.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Lipschitz constant must be positive, got {}",
                self.lipschitz
            )));
        }
        for (name, v) in [
            ("feature norm bound", self.feature_norm_bound),
            ("weight norm bound", self.weight_norm_bound),
            ("empirical loss", self.empirical_loss),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        if self.samples == 0 {
            return Err(Error::InvalidParameter("sample count must be >= 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// Complexity term `Z B sqrt(1/M)`.
pub fn rademacher_term(
    feature_norm_bound: f64,
    weight_norm_bound: f64,
    samples: usize,
) -> Result<f64> {
    if !(feature_norm_bound >= 0.0 && feature_norm_bound.is_finite())
        || !(weight_norm_bound >= 0.0 && weight_norm_bound.is_finite())
    {
        return Err(Error::InvalidParameter(
            "norm bounds must be nonnegative and finite".into(),
        ));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    Ok(feature_norm_bound * weight_norm_bound * (1.0 / samples as f64).sqrt())
}

/// The three bound terms, reported separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    pub empirical_loss: f64,
    pub complexity_term: f64,
    pub confidence_term: f64,
}

impl BoundBreakdown {
    pub fn total(&self) -> f64 {
        self.empirical_loss + self.complexity_term + self.confidence_term
    }
}

/// Evaluates the generalization bound, returning its terms.
pub fn generalization_bound_terms(inputs: &BoundInputs) -> Result<BoundBreakdown> {
    inputs.validate()?;
    let m = inputs.samples as f64;
    let kzb = inputs.lipschitz * inputs.feature_norm_bound * inputs.weight_norm_bound;
    Ok(BoundBreakdown {
        empirical_loss: inputs.empirical_loss,
        complexity_term: 2.0
            * inputs.lipschitz
            * rademacher_term(
                inputs.feature_norm_bound,
                inputs.weight_norm_bound,
                inputs.samples,
            )?,
        confidence_term: kzb * ((1.0 / inputs.delta).ln() / (2.0 * m)).sqrt(),
    })
}

/// Evaluates the generalization bound as a single number.
pub fn generalization_bound(inputs: &BoundInputs) -> Result<f64> {
    Ok(generalization_bound_terms(inputs)?.total())
}

/// Measures `(Z, B)` from a trained model and its training enhanced output:
/// `Z` is the largest row 2-norm of `H`; `B` is the largest output-column
/// 2-norm of `w` (for a single output this is `|w|_2`; the per-column view
/// for multiple outputs is an extension beyond the single-output theory).
pub fn measure_zb(model: &RvflPlusModel, h: &EnhancedOutput) -> (f64, f64) {
    measure_zb_weights(model.weights(), h)
}

/// [`measure_zb`] on bare output weights, usable with any trained variant.
pub fn measure_zb_weights(weights: &DMatrix<f64>, h: &EnhancedOutput) -> (f64, f64) {
    let z = (0..h.n_rows())
        .map(|i| h.matrix().row(i).norm())
        .fold(0.0f64, f64::max);
    let b = per_column_weight_norms(weights)
        .into_iter()
        .fold(0.0f64, f64::max);
    (z, b)
}

/// Output-weight 2-norms per output column.
pub fn per_column_weight_norms(weights: &DMatrix<f64>) -> Vec<f64> {
    (0..weights.ncols())
        .map(|k| weights.column(k).norm())
        .collect()
}
