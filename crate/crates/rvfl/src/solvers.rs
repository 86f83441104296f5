//! Closed-form output-weight solvers.
//!
//! Three training routes share the enhanced layer output `H`:
//!
//! - pseudo-inverse: `w = pinv(H) Y`, the minimum-norm least-squares fit;
//! - ridge: `w = (H'H + I/C)^{-1} H'Y`;
//! - privileged ridge: the dual solve
//!   `lambda = (HH' + (1/gamma) H~H~' + I/C)^{-1} (Y + (C/gamma) H~H~' 1)`
//!   with `w = H' lambda` and the correcting-function weights
//!   `w_corr = (1/gamma)(H~' lambda - C H~' 1)`.
//!
//! The privileged right-hand side deserves a note: expanding the
//! stationarity conditions gives `(HH' + (1/gamma) H~H~') lambda =
//! Y + (C/gamma) H~H~' 1`, i.e. the correction term enters with a plus
//! sign and multiplies an all-ones N x m matrix. Transcriptions of this
//! solve sometimes carry a minus sign and a reversed product; the
//! [`crate::oracle`] saddle-point solver pins the consistent form, and the
//! `verify` command demonstrates the mismatch of the flipped variant.

use nalgebra::{Cholesky, DMatrix};
use serde::{Deserialize, Serialize};

use crate::enhance::{EnhancedOutput, EnhancementLayer};
use crate::error::{Error, Result};
use crate::oracle;

/// Which closed form produced a plain (non-privileged) model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RvflVariant {
    Pinv,
    Ridge { c: f64 },
}

/// A trained network without privileged information: output weights plus
/// the frozen enhancement layer needed at test time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RvflModel {
    weights: DMatrix<f64>,
    layer: EnhancementLayer,
    variant: RvflVariant,
}

impl RvflModel {
    /// Composes layer application and the pseudo-inverse solve.
    pub fn fit_pinv(layer: EnhancementLayer, x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<Self> {
        let h = layer.apply(x)?;
        let weights = train_rvfl_pinv(&h, y)?;
        Ok(Self {
            weights,
            layer,
            variant: RvflVariant::Pinv,
        })
    }

    /// Composes layer application and the ridge solve.
    pub fn fit_ridge(
        layer: EnhancementLayer,
        x: &DMatrix<f64>,
        y: &DMatrix<f64>,
        c: f64,
    ) -> Result<Self> {
        let h = layer.apply(x)?;
        let weights = train_rvfl_ridge(&h, y, c)?;
        Ok(Self {
            weights,
            layer,
            variant: RvflVariant::Ridge { c },
        })
    }

    /// Raw output-function values `h(x) w` for new inputs.
    pub fn predict(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(self.layer.apply(x)?.matrix() * &self.weights)
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn layer(&self) -> &EnhancementLayer {
        &self.layer
    }

    pub fn variant(&self) -> RvflVariant {
        self.variant
    }

    pub fn n_outputs(&self) -> usize {
        self.weights.ncols()
    }
}

/// A trained privileged-information network. The privileged layer and the
/// correcting-function weights are retained for inspection and persistence
/// only; prediction uses the normal-feature path exclusively.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RvflPlusModel {
    weights: DMatrix<f64>,
    correcting_weights: DMatrix<f64>,
    layer: EnhancementLayer,
    layer_priv: EnhancementLayer,
    c: f64,
    gamma: f64,
}

impl RvflPlusModel {
    /// Trains from raw feature blocks: applies both layers, then solves the
    /// privileged ridge system.
    pub fn fit(
        layer: EnhancementLayer,
        layer_priv: EnhancementLayer,
        x: &DMatrix<f64>,
        x_priv: &DMatrix<f64>,
        y: &DMatrix<f64>,
        c: f64,
        gamma: f64,
    ) -> Result<(Self, TrainDiagnostics)> {
        let h = layer.apply(x)?;
        let h_priv = layer_priv.apply(x_priv)?;
        let (solution, diagnostics) = train_rvfl_plus(&h, &h_priv, y, c, gamma)?;
        Ok((
            Self {
                weights: solution.weights,
                correcting_weights: solution.correcting_weights,
                layer,
                layer_priv,
                c,
                gamma,
            },
            diagnostics,
        ))
    }

    /// Raw output-function values for new inputs; privileged features are
    /// not accepted here by construction.
    pub fn predict(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(self.layer.apply(x)?.matrix() * &self.weights)
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn correcting_weights(&self) -> &DMatrix<f64> {
        &self.correcting_weights
    }

    pub fn layer(&self) -> &EnhancementLayer {
        &self.layer
    }

    pub fn layer_priv(&self) -> &EnhancementLayer {
        &self.layer_priv
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_outputs(&self) -> usize {
        self.weights.ncols()
    }
}

/// Output and correcting weights from the privileged ridge solve.
#[derive(Debug, Clone)]
pub struct PlusSolution {
    pub weights: DMatrix<f64>,
    pub correcting_weights: DMatrix<f64>,
}

/// Training-time evidence: first-order residual, mean squared training
/// error of the output function, the dual variables, and a cheap condition
/// estimate of the solved system (Cholesky diagonal ratio squared; a lower
/// bound on the true 2-norm condition number).
#[derive(Debug, Clone)]
pub struct TrainDiagnostics {
    pub kkt_residual: f64,
    pub train_loss: f64,
    pub lambda: DMatrix<f64>,
    pub condition_estimate: f64,
}

/// Condition estimate above which callers should warn about the solve.
pub const CONDITION_WARN_THRESHOLD: f64 = 1e14;

fn check_finite(name: &str, m: &DMatrix<f64>) -> Result<()> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "{name} contains non-finite values"
        )));
    }
    Ok(())
}

fn check_rows(h: &EnhancedOutput, y: &DMatrix<f64>) -> Result<()> {
    if h.n_rows() != y.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "H has {} rows but Y has {}",
            h.n_rows(),
            y.nrows()
        )));
    }
    Ok(())
}

/// Minimum-norm least-squares output weights `w = pinv(H) Y`.
pub fn train_rvfl_pinv(h: &EnhancedOutput, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_rows(h, y)?;
    check_finite("H", h.matrix())?;
    check_finite("Y", y)?;
    let svd = h.matrix().clone().svd(true, true);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let eps = max_sv * f64::EPSILON * h.matrix().nrows().max(h.matrix().ncols()) as f64;
    svd.solve(y, eps)
        .map_err(|e| Error::SingularSystem(format!("pseudo-inverse solve failed: {e}")))
}

/// Ridge output weights `w = (H'H + I/C)^{-1} H'Y`.
pub fn train_rvfl_ridge(h: &EnhancedOutput, y: &DMatrix<f64>, c: f64) -> Result<DMatrix<f64>> {
    check_rows(h, y)?;
    check_finite("H", h.matrix())?;
    check_finite("Y", y)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "C must be positive, got {c}"
        )));
    }
    let hm = h.matrix();
    let width = hm.ncols();
    let mut gram = hm.transpose() * hm;
    for i in 0..width {
        gram[(i, i)] += 1.0 / c;
    }
    let rhs = hm.transpose() * y;
    let (solution, _) = solve_spd(gram, &rhs)?;
    Ok(solution)
}

/// Privileged-information ridge training (the closed form validated against
/// [`crate::oracle::solve_primal_kkt`]).
pub fn train_rvfl_plus(
    h: &EnhancedOutput,
    h_priv: &EnhancedOutput,
    y: &DMatrix<f64>,
    c: f64,
    gamma: f64,
) -> Result<(PlusSolution, TrainDiagnostics)> {
    train_rvfl_plus_with_rhs(h, h_priv, y, c, gamma, RhsForm::Consistent)
}

/// Which right-hand side the privileged solve uses. `FlippedSign` exists
/// only so the `verify` command can demonstrate that the minus-sign variant
/// disagrees with the KKT oracle; it is never used for training.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsForm {
    Consistent,
    FlippedSign,
}

pub(crate) fn train_rvfl_plus_with_rhs(
    h: &EnhancedOutput,
    h_priv: &EnhancedOutput,
    y: &DMatrix<f64>,
    c: f64,
    gamma: f64,
    rhs_form: RhsForm,
) -> Result<(PlusSolution, TrainDiagnostics)> {
    check_rows(h, y)?;
    check_rows(h_priv, y)?;
    check_finite("H", h.matrix())?;
    check_finite("H~", h_priv.matrix())?;
    check_finite("Y", y)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "C must be positive, got {c}"
        )));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be positive, got {gamma}"
        )));
    }

    let hm = h.matrix();
    let hp = h_priv.matrix();
    let n = hm.nrows();
    let m = y.ncols();

    let mut lhs = hm * hm.transpose() + (hp * hp.transpose()) / gamma;
    for i in 0..n {
        lhs[(i, i)] += 1.0 / c;
    }

    // H~' 1 (column sums) and H~ H~' 1, shared across output columns.
    let priv_col_sums = nalgebra::DVector::from_fn(hp.ncols(), |j, _| hp.column(j).sum());
    let correction = hp * &priv_col_sums;
    let sign = match rhs_form {
        RhsForm::Consistent => 1.0,
        RhsForm::FlippedSign => -1.0,
    };
    let mut rhs = y.clone();
    for k in 0..m {
        for i in 0..n {
            rhs[(i, k)] += sign * (c / gamma) * correction[i];
        }
    }

    let (lambda, condition_estimate) = solve_spd(lhs, &rhs)?;

    let weights = hm.transpose() * &lambda;
    let mut correcting_weights = (hp.transpose() * &lambda) / gamma;
    for k in 0..m {
        for j in 0..hp.ncols() {
            correcting_weights[(j, k)] -= (c / gamma) * priv_col_sums[j];
        }
    }

    let kkt_residual =
        oracle::kkt_residual(hm, hp, y, c, gamma, &weights, &correcting_weights, &lambda);
    let train_loss = (hm * &weights - y).norm_squared() / n as f64;

    Ok((
        PlusSolution {
            weights,
            correcting_weights,
        },
        TrainDiagnostics {
            kkt_residual,
            train_loss,
            lambda,
            condition_estimate,
        },
    ))
}

/// Solves `A X = B` for symmetric positive-definite `A` via Cholesky,
/// falling back to a fully pivoted LU if the factorization fails. Returns
/// the solution and a condition estimate.
fn solve_spd(a: DMatrix<f64>, b: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let size = a.nrows();
    match Cholesky::new(a.clone()) {
        Some(chol) => {
            let l = chol.l_dirty();
            let mut dmin = f64::INFINITY;
            let mut dmax = 0.0f64;
            for i in 0..size {
                let d = l[(i, i)].abs();
                dmin = dmin.min(d);
                dmax = dmax.max(d);
            }
            let cond = if dmin > 0.0 {
                (dmax / dmin).powi(2)
            } else {
                f64::INFINITY
            };
            Ok((chol.solve(b), cond))
        }
        None => {
            let lu = a.full_piv_lu();
            let sol = lu
                .solve(b)
                .ok_or_else(|| Error::SingularSystem("pivoted fallback solve failed".into()))?;
            Ok((sol, f64::INFINITY))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn wrap(m: DMatrix<f64>) -> EnhancedOutput {
        let cols = m.ncols();
        EnhancedOutput::from_matrix(m, cols.min(1)).unwrap()
    }

    fn randn(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| {
            let u1: f64 = rng.random::<f64>().max(1e-12);
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        })
    }

    fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).norm() / b.norm().max(1.0)
    }

    #[test]
    fn pinv_identity_design_returns_targets() {
        let h = wrap(DMatrix::identity(3, 3));
        let y = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let w = train_rvfl_pinv(&h, &y).unwrap();
        assert!(rel_err(&w, &y) < 1e-12);
    }

    #[test]
    fn pinv_orthonormal_columns_reduce_to_transpose() {
        // Columns e1, e3 of R^4 scaled by 1 are orthonormal.
        let mut h = DMatrix::zeros(4, 2);
        h[(0, 0)] = 1.0;
        h[(2, 1)] = 1.0;
        let y = DMatrix::from_fn(4, 2, |i, j| (i + 2 * j) as f64);
        let w = train_rvfl_pinv(&wrap(h.clone()), &y).unwrap();
        let expected = h.transpose() * &y;
        assert!(rel_err(&w, &expected) < 1e-12);
    }

    #[test]
    fn pinv_matches_normal_equations_on_full_rank_tall_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = randn(&mut rng, 6, 4);
        let y = randn(&mut rng, 6, 2);
        let w = train_rvfl_pinv(&wrap(h.clone()), &y).unwrap();
        let gram = h.transpose() * &h;
        let expected = gram.full_piv_lu().solve(&(h.transpose() * &y)).unwrap();
        assert!(rel_err(&w, &expected) < 1e-8);
    }

    #[test]
    fn pinv_residual_orthogonal_to_column_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = randn(&mut rng, 10, 4);
        let y = randn(&mut rng, 10, 3);
        let w = train_rvfl_pinv(&wrap(h.clone()), &y).unwrap();
        let residual = &h * &w - &y;
        let against = h.transpose() * residual;
        assert!(against.norm() <= 1e-8 * y.norm().max(1.0));
    }

    #[test]
    fn ridge_identity_halves_targets_at_unit_c() {
        let h = wrap(DMatrix::identity(3, 3));
        let y = DMatrix::from_fn(3, 1, |i, _| (i + 1) as f64);
        let w = train_rvfl_ridge(&h, &y, 1.0).unwrap();
        assert!(rel_err(&w, &(y / 2.0)) < 1e-12);
    }

    #[test]
    fn ridge_approaches_pinv_as_c_grows() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = randn(&mut rng, 12, 5);
        let y = randn(&mut rng, 12, 2);
        let wide = wrap(h);
        let ridge = train_rvfl_ridge(&wide, &y, 1e12).unwrap();
        let pinv = train_rvfl_pinv(&wide, &y).unwrap();
        assert!(rel_err(&ridge, &pinv) < 1e-6);
    }

    #[test]
    fn ridge_matches_gradient_descent_oracle() {
        // Independent route: minimize 1/2 |w|^2 + C/2 |Y - Hw|^2 by descent.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = randn(&mut rng, 8, 3);
        let y = randn(&mut rng, 8, 2);
        let c = 10.0;
        let w = train_rvfl_ridge(&wrap(h.clone()), &y, c).unwrap();

        let mut w_gd: DMatrix<f64> = DMatrix::zeros(3, 2);
        let lipschitz = 1.0 + c * (h.transpose() * &h).norm();
        let step = 1.0 / lipschitz;
        for _ in 0..200_000 {
            let grad = &w_gd - h.transpose() * (&y - &h * &w_gd) * c;
            if grad.norm() <= 1e-12 {
                break;
            }
            w_gd -= step * grad;
        }
        assert!(rel_err(&w, &w_gd) < 1e-8, "err {}", rel_err(&w, &w_gd));
    }

    #[test]
    fn ridge_rejects_nonpositive_c() {
        let h = wrap(DMatrix::identity(2, 2));
        let y = DMatrix::zeros(2, 1);
        assert!(train_rvfl_ridge(&h, &y, 0.0).is_err());
        assert!(train_rvfl_ridge(&h, &y, -1.0).is_err());
        assert!(train_rvfl_ridge(&h, &y, f64::INFINITY).is_err());
    }

    #[test]
    fn ridge_norm_monotone_in_c() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = wrap(randn(&mut rng, 10, 6));
        let y = randn(&mut rng, 10, 2);
        let mut last = f64::INFINITY;
        for c in [100.0, 10.0, 1.0, 0.1, 0.01] {
            let w = train_rvfl_ridge(&h, &y, c).unwrap();
            let norm = w.norm();
            assert!(
                norm <= last + 1e-12,
                "norm {norm} grew when C shrank (prev {last})"
            );
            last = norm;
        }
    }

    #[test]
    fn plus_with_zero_privileged_block_is_dual_ridge() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let h = randn(&mut rng, 7, 4);
        let y = randn(&mut rng, 7, 2);
        let zeros = wrap(DMatrix::zeros(7, 3));
        let (sol, diag) = train_rvfl_plus(&wrap(h.clone()), &zeros, &y, 2.5, 3.0).unwrap();

        let a = &h * h.transpose() + DMatrix::identity(7, 7) / 2.5;
        let lambda = a.full_piv_lu().solve(&y).unwrap();
        let expected = h.transpose() * lambda;
        assert!(rel_err(&sol.weights, &expected) < 1e-8);
        assert!(sol.correcting_weights.norm() < 1e-12);
        assert!(diag.kkt_residual < 1e-10);
    }

    #[test]
    fn plus_large_gamma_suppresses_privileged_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = wrap(randn(&mut rng, 9, 5));
        let hp = wrap(randn(&mut rng, 9, 4));
        let zeros = wrap(DMatrix::zeros(9, 4));
        let y = randn(&mut rng, 9, 2);
        let (with_priv, _) = train_rvfl_plus(&h, &hp, &y, 2.0, 1e12).unwrap();
        let (without, _) = train_rvfl_plus(&h, &zeros, &y, 2.0, 1e12).unwrap();
        assert!(rel_err(&with_priv.weights, &without.weights) < 1e-6);
    }

    #[test]
    fn plus_matches_kkt_oracle_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for i in 0..100 {
            let inst = oracle::sample_instance(&mut rng);
            let (sol, diag) = train_rvfl_plus(
                &wrap(inst.h.clone()),
                &wrap(inst.h_priv.clone()),
                &inst.y,
                inst.c,
                inst.gamma,
            )
            .unwrap();
            let truth =
                oracle::solve_primal_kkt(&inst.h, &inst.h_priv, &inst.y, inst.c, inst.gamma)
                    .unwrap();
            assert!(
                rel_err(&sol.weights, &truth.w) < 1e-8,
                "instance {i}: w mismatch"
            );
            assert!(
                rel_err(&sol.correcting_weights, &truth.w_corr) < 1e-8,
                "instance {i}: w_corr mismatch"
            );
            assert!(
                rel_err(&diag.lambda, &truth.lambda) < 1e-8,
                "instance {i}: lambda"
            );
            assert!(
                diag.kkt_residual <= 1e-8,
                "instance {i}: residual {}",
                diag.kkt_residual
            );
        }
    }

    #[test]
    fn plus_stationarity_and_feasibility_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let inst = oracle::sample_instance(&mut rng);
        let (sol, diag) = train_rvfl_plus(
            &wrap(inst.h.clone()),
            &wrap(inst.h_priv.clone()),
            &inst.y,
            inst.c,
            inst.gamma,
        )
        .unwrap();

        let w_stat = (&sol.weights - inst.h.transpose() * &diag.lambda).norm();
        assert!(w_stat <= 1e-8 * sol.weights.norm().max(1.0));

        let priv_sums = DVector::from_fn(inst.h_priv.ncols(), |j, _| inst.h_priv.column(j).sum());
        let mut corr_stat =
            inst.gamma * &sol.correcting_weights - inst.h_priv.transpose() * &diag.lambda;
        for k in 0..corr_stat.ncols() {
            for j in 0..corr_stat.nrows() {
                corr_stat[(j, k)] += inst.c * priv_sums[j];
            }
        }
        assert!(corr_stat.norm() <= 1e-8 * (inst.gamma * &sol.correcting_weights).norm().max(1.0));

        let feas = (&inst.h * &sol.weights
            + &inst.h_priv * &sol.correcting_weights
            + &diag.lambda / inst.c
            - &inst.y)
            .norm();
        assert!(feas <= 1e-8 * inst.y.norm().max(1.0));
    }

    #[test]
    fn plus_objective_beats_random_feasible_perturbations() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let inst = oracle::sample_instance(&mut rng);
        let (sol, _) = train_rvfl_plus(
            &wrap(inst.h.clone()),
            &wrap(inst.h_priv.clone()),
            &inst.y,
            inst.c,
            inst.gamma,
        )
        .unwrap();
        let best = oracle::primal_objective(
            &inst.h,
            &inst.h_priv,
            &inst.y,
            inst.c,
            inst.gamma,
            &sol.weights,
            &sol.correcting_weights,
        );
        for _ in 0..1000 {
            let dw = DMatrix::from_fn(sol.weights.nrows(), sol.weights.ncols(), |_, _| {
                rng.random_range(-1.0..1.0)
            });
            let dc = DMatrix::from_fn(
                sol.correcting_weights.nrows(),
                sol.correcting_weights.ncols(),
                |_, _| rng.random_range(-1.0..1.0),
            );
            let other = oracle::primal_objective(
                &inst.h,
                &inst.h_priv,
                &inst.y,
                inst.c,
                inst.gamma,
                &(&sol.weights + dw),
                &(&sol.correcting_weights + dc),
            );
            assert!(other >= best - 1e-10 * best.abs().max(1.0));
        }
    }

    #[test]
    fn flipped_rhs_disagrees_with_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let inst = oracle::sample_instance(&mut rng);
        let (sol, _) = train_rvfl_plus_with_rhs(
            &wrap(inst.h.clone()),
            &wrap(inst.h_priv.clone()),
            &inst.y,
            inst.c,
            inst.gamma,
            RhsForm::FlippedSign,
        )
        .unwrap();
        let truth =
            oracle::solve_primal_kkt(&inst.h, &inst.h_priv, &inst.y, inst.c, inst.gamma).unwrap();
        assert!(rel_err(&sol.weights, &truth.w) > 1e-6);
    }

    #[test]
    fn model_fit_predict_and_persist_round_trip() {
        use crate::enhance::{Activation, EnhancementLayer};
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let x = randn(&mut rng, 10, 3);
        let xp = randn(&mut rng, 10, 2);
        let y = randn(&mut rng, 10, 2);
        let layer = EnhancementLayer::init(3, 6, Activation::Sigmoid, 1.0, 100).unwrap();
        let layer_priv = EnhancementLayer::init(2, 6, Activation::Sigmoid, 1.0, 101).unwrap();
        let (model, _) = RvflPlusModel::fit(layer, layer_priv, &x, &xp, &y, 2.0, 8.0).unwrap();

        let json = serde_json::to_string(&model).unwrap();
        let back: RvflPlusModel = serde_json::from_str(&json).unwrap();
        assert_eq!(model, back);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);

        let pred = model.predict(&x).unwrap();
        let pred_back = back.predict(&x).unwrap();
        assert_eq!(pred, pred_back);
        assert_eq!(pred.ncols(), 2);
    }
}
