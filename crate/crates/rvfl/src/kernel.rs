//! Kernelized privileged-information machine.
//!
//! Random enhancement features are replaced by a linear-plus-Mercer kernel
//! pair on each side: `Omega = Omega_1 + Omega_2` on normal inputs and
//! `Omega~ = Omega~_1 + Omega~_2` on privileged inputs. Training solves
//!
//! ```text
//! w_kernel = (Omega + (1/gamma) Omega~ + I/C)^{-1} (Y + (C/gamma) Omega~ 1)
//! ```
//!
//! and prediction evaluates `f(z) = [K(z, x_1) .. K(z, x_N)] w_kernel`, so
//! the trained inputs are retained in the model (size O(N (n + m))).

use nalgebra::{Cholesky, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mercer kernels available for the nonlinear part of a [`KernelSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MercerKernel {
    /// `exp(-|u - v|^2 / tau)` with a direct user-facing `tau > 0`.
    Gaussian { tau: f64 },
    /// `(<u, v> + coef)^degree` with integer `degree >= 1`.
    Polynomial { degree: u32, coef: f64 },
}

impl MercerKernel {
    fn validate(&self) -> Result<()> {
        match *self {
            MercerKernel::Gaussian { tau } => {
                if !(tau > 0.0 && tau.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "Gaussian kernel parameter tau must be positive, got {tau}"
                    )));
                }
            }
            MercerKernel::Polynomial { degree, coef } => {
                if degree == 0 {
                    return Err(Error::InvalidParameter(
                        "polynomial kernel degree must be >= 1".into(),
                    ));
                }
                if !coef.is_finite() {
                    return Err(Error::InvalidParameter(
                        "polynomial kernel coefficient must be finite".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn eval(&self, a: &DMatrix<f64>, i: usize, b: &DMatrix<f64>, j: usize) -> f64 {
        match *self {
            MercerKernel::Gaussian { tau } => {
                let mut dist2 = 0.0;
                for k in 0..a.ncols() {
                    let d = a[(i, k)] - b[(j, k)];
                    dist2 += d * d;
                }
                (-dist2 / tau).exp()
            }
            MercerKernel::Polynomial { degree, coef } => {
                let mut dot = 0.0;
                for k in 0..a.ncols() {
                    dot += a[(i, k)] * b[(j, k)];
                }
                (dot + coef).powi(degree as i32)
            }
        }
    }

    /// Explicit finite feature map `phi` with `K(u, v) = <phi(u), phi(v)>`,
    /// available for polynomial kernels of degree 1 and 2. Used to check
    /// the kernel route against the explicit-feature route.
    pub fn explicit_feature_map(&self, x: &DMatrix<f64>) -> Option<DMatrix<f64>> {
        match *self {
            MercerKernel::Polynomial { degree: 1, coef } if coef >= 0.0 => {
                let mut phi = DMatrix::zeros(x.nrows(), x.ncols() + 1);
                phi.view_mut((0, 0), (x.nrows(), x.ncols())).copy_from(x);
                for i in 0..x.nrows() {
                    phi[(i, x.ncols())] = coef.sqrt();
                }
                Some(phi)
            }
            MercerKernel::Polynomial { degree: 2, coef } if coef >= 0.0 => {
                let n = x.ncols();
                // Ordered pairs u_i u_j, then sqrt(2 coef) u, then coef.
                let mut phi = DMatrix::zeros(x.nrows(), n * n + n + 1);
                for r in 0..x.nrows() {
                    for i in 0..n {
                        for j in 0..n {
                            phi[(r, i * n + j)] = x[(r, i)] * x[(r, j)];
                        }
                    }
                    for i in 0..n {
                        phi[(r, n * n + i)] = (2.0 * coef).sqrt() * x[(r, i)];
                    }
                    phi[(r, n * n + n)] = coef;
                }
                Some(phi)
            }
            _ => None,
        }
    }
}

/// A kernel specification: an optional linear part (on by default) plus an
/// optional Mercer part. At least one part must be present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    mercer: Option<MercerKernel>,
    includes_linear: bool,
}

impl KernelSpec {
    /// Linear plus Gaussian, the default pairing.
    pub fn gaussian(tau: f64) -> Result<Self> {
        Self::new(Some(MercerKernel::Gaussian { tau }), true)
    }

    /// Linear plus polynomial.
    pub fn polynomial(degree: u32, coef: f64) -> Result<Self> {
        Self::new(Some(MercerKernel::Polynomial { degree, coef }), true)
    }

    /// Linear kernel only.
    pub fn linear() -> Self {
        Self {
            mercer: None,
            includes_linear: true,
        }
    }

    pub fn new(mercer: Option<MercerKernel>, includes_linear: bool) -> Result<Self> {
        if mercer.is_none() && !includes_linear {
            return Err(Error::InvalidParameter(
                "kernel spec needs a linear part, a Mercer part, or both".into(),
            ));
        }
        if let Some(k) = &mercer {
            k.validate()?;
        }
        Ok(Self {
            mercer,
            includes_linear,
        })
    }

    /// Drops the linear part, keeping only the Mercer kernel.
    pub fn without_linear(mut self) -> Result<Self> {
        self.includes_linear = false;
        if self.mercer.is_none() {
            return Err(Error::InvalidParameter(
                "cannot drop the linear part of a linear-only spec".into(),
            ));
        }
        Ok(self)
    }

    pub fn mercer(&self) -> Option<&MercerKernel> {
        self.mercer.as_ref()
    }

    pub fn includes_linear(&self) -> bool {
        self.includes_linear
    }
}

/// Pairwise kernel evaluations: entry `(i, j)` is
/// `[linear] <a_i, b_j> + K2(a_i, b_j)` for rows `a_i` of `x_a` and `b_j`
/// of `x_b`.
pub fn gram_matrix(
    x_a: &DMatrix<f64>,
    x_b: &DMatrix<f64>,
    spec: &KernelSpec,
) -> Result<DMatrix<f64>> {
    if x_a.ncols() != x_b.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "feature counts differ: {} vs {}",
            x_a.ncols(),
            x_b.ncols()
        )));
    }
    let mut gram = if spec.includes_linear {
        x_a * x_b.transpose()
    } else {
        DMatrix::zeros(x_a.nrows(), x_b.nrows())
    };
    if let Some(kernel) = &spec.mercer {
        for i in 0..x_a.nrows() {
            for j in 0..x_b.nrows() {
                gram[(i, j)] += kernel.eval(x_a, i, x_b, j);
            }
        }
    }
    Ok(gram)
}

/// A trained kernel machine: dual weights plus the training inputs and
/// kernel parameters needed to evaluate test-time kernel rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrvflPlusModel {
    dual_weights: DMatrix<f64>,
    x_train: DMatrix<f64>,
    spec: KernelSpec,
    spec_priv: KernelSpec,
    c: f64,
    gamma: f64,
    condition_estimate: f64,
}

impl KrvflPlusModel {
    pub fn dual_weights(&self) -> &DMatrix<f64> {
        &self.dual_weights
    }

    pub fn x_train(&self) -> &DMatrix<f64> {
        &self.x_train
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn spec_priv(&self) -> &KernelSpec {
        &self.spec_priv
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Cholesky diagonal-ratio estimate of the solved system's conditioning
    /// (lower bound on the 2-norm condition number).
    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    pub fn n_outputs(&self) -> usize {
        self.dual_weights.ncols()
    }

    /// Raw output-function values `gram(z, x_train) w_kernel`; privileged
    /// features are not part of the prediction path.
    pub fn predict(&self, z: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let rows = gram_matrix(z, &self.x_train, &self.spec)?;
        Ok(rows * &self.dual_weights)
    }
}

/// Trains the kernel machine on normal inputs `x`, privileged inputs
/// `x_priv`, and targets `y`.
pub fn train_krvfl_plus(
    x: &DMatrix<f64>,
    x_priv: &DMatrix<f64>,
    y: &DMatrix<f64>,
    spec: &KernelSpec,
    spec_priv: &KernelSpec,
    c: f64,
    gamma: f64,
) -> Result<KrvflPlusModel> {
    if x.nrows() != y.nrows() || x_priv.nrows() != y.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "row counts differ: x {}, x_priv {}, y {}",
            x.nrows(),
            x_priv.nrows(),
            y.nrows()
        )));
    }
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
    let n = x.nrows();
    let omega = gram_matrix(x, x, spec)?;
    let omega_priv = gram_matrix(x_priv, x_priv, spec_priv)?;

    let mut lhs = omega;
    lhs += &omega_priv / gamma;
    for i in 0..n {
        lhs[(i, i)] += 1.0 / c;
    }

    // Omega~ 1: identical columns, each the row sums of Omega~.
    let priv_row_sums = omega_priv.column_sum();
    let mut rhs = y.clone();
    for k in 0..y.ncols() {
        for i in 0..n {
            rhs[(i, k)] += (c / gamma) * priv_row_sums[i];
        }
    }

    let (dual_weights, condition_estimate) = match Cholesky::new(lhs.clone()) {
        Some(chol) => {
            let l = chol.l_dirty();
            let mut dmin = f64::INFINITY;
            let mut dmax = 0.0f64;
            for i in 0..n {
                let d = l[(i, i)].abs();
                dmin = dmin.min(d);
                dmax = dmax.max(d);
            }
            let cond = if dmin > 0.0 {
                (dmax / dmin).powi(2)
            } else {
                f64::INFINITY
            };
            (chol.solve(&rhs), cond)
        }
        None => {
            let sol = lhs
                .full_piv_lu()
                .solve(&rhs)
                .ok_or_else(|| Error::SingularSystem("kernel system solve failed".into()))?;
            (sol, f64::INFINITY)
        }
    };

    Ok(KrvflPlusModel {
        dual_weights,
        x_train: x.clone(),
        spec: *spec,
        spec_priv: *spec_priv,
        c,
        gamma,
        condition_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn randn(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn linear_only_gram_of_identity_rows_is_identity() {
        let x = DMatrix::identity(2, 2);
        let gram = gram_matrix(&x, &x, &KernelSpec::linear()).unwrap();
        assert_eq!(gram, DMatrix::identity(2, 2));
    }

    #[test]
    fn gaussian_diagonal_is_norm_squared_plus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = randn(&mut rng, 5, 3);
        let spec = KernelSpec::gaussian(0.5).unwrap();
        let gram = gram_matrix(&x, &x, &spec).unwrap();
        for i in 0..5 {
            let expected = x.row(i).norm_squared() + 1.0;
            assert_eq!(gram[(i, i)], expected);
        }
    }

    #[test]
    fn combined_gram_equals_sum_of_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = randn(&mut rng, 3, 2);
        let combined = gram_matrix(&x, &x, &KernelSpec::gaussian(0.7).unwrap()).unwrap();
        let linear = gram_matrix(&x, &x, &KernelSpec::linear()).unwrap();
        let gaussian_only = gram_matrix(
            &x,
            &x,
            &KernelSpec::gaussian(0.7).unwrap().without_linear().unwrap(),
        )
        .unwrap();
        assert!(((&linear + &gaussian_only) - combined).norm() < 1e-14);
    }

    #[test]
    fn gaussian_entries_lie_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = randn(&mut rng, 10, 4);
        let spec = KernelSpec::gaussian(0.025)
            .unwrap()
            .without_linear()
            .unwrap();
        let gram = gram_matrix(&x, &x, &spec).unwrap();
        assert!(gram.iter().all(|&v| v > 0.0 && v <= 1.0));
    }

    #[test]
    fn zero_privileged_inputs_reduce_to_kernel_ridge() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = randn(&mut rng, 6, 3);
        let xp = DMatrix::zeros(6, 2);
        let y = randn(&mut rng, 6, 2);
        let spec = KernelSpec::gaussian(1.0).unwrap();
        let model = train_krvfl_plus(&x, &xp, &y, &spec, &KernelSpec::linear(), 2.0, 7.0).unwrap();

        let omega = gram_matrix(&x, &x, &spec).unwrap();
        let a = &omega + DMatrix::identity(6, 6) / 2.0;
        let expected = a.full_piv_lu().solve(&y).unwrap();
        assert!((model.dual_weights() - &expected).norm() < 1e-10 * expected.norm().max(1.0));
    }

    #[test]
    fn large_gamma_approaches_kernel_ridge() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = randn(&mut rng, 8, 3);
        let xp = randn(&mut rng, 8, 2);
        let y = randn(&mut rng, 8, 1);
        let spec = KernelSpec::gaussian(0.8).unwrap();
        let model = train_krvfl_plus(&x, &xp, &y, &spec, &spec, 3.0, 1e12).unwrap();

        let omega = gram_matrix(&x, &x, &spec).unwrap();
        let a = &omega + DMatrix::identity(8, 8) / 3.0;
        let ridge = a.full_piv_lu().solve(&y).unwrap();
        assert!((model.dual_weights() - &ridge).norm() < 1e-6 * ridge.norm().max(1.0));
    }

    #[test]
    fn predictions_on_training_rows_match_fitted_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = randn(&mut rng, 7, 3);
        let xp = randn(&mut rng, 7, 3);
        let y = randn(&mut rng, 7, 2);
        let spec = KernelSpec::gaussian(0.6).unwrap();
        let model = train_krvfl_plus(&x, &xp, &y, &spec, &spec, 1.5, 40.0).unwrap();

        let fitted = gram_matrix(&x, &x, &spec).unwrap() * model.dual_weights();
        let predicted = model.predict(&x).unwrap();
        assert!((&fitted - &predicted).norm() < 1e-10 * fitted.norm().max(1.0));
    }

    #[test]
    fn single_row_prediction_matches_scalar_expansion() {
        let x = DMatrix::from_row_slice(2, 2, &[0.2, -0.4, 0.9, 0.1]);
        let xp = DMatrix::from_row_slice(2, 1, &[1.0, -1.0]);
        let y = DMatrix::from_row_slice(2, 1, &[1.0, -1.0]);
        let spec = KernelSpec::gaussian(0.5).unwrap();
        let model = train_krvfl_plus(&x, &xp, &y, &spec, &KernelSpec::linear(), 2.0, 5.0).unwrap();

        let z = DMatrix::from_row_slice(1, 2, &[0.3, 0.3]);
        let pred = model.predict(&z).unwrap();
        let mut by_hand = 0.0;
        for i in 0..2 {
            let dot = z[(0, 0)] * x[(i, 0)] + z[(0, 1)] * x[(i, 1)];
            let d0 = z[(0, 0)] - x[(i, 0)];
            let d1 = z[(0, 1)] - x[(i, 1)];
            let k = dot + (-(d0 * d0 + d1 * d1) / 0.5).exp();
            by_hand += k * model.dual_weights()[(i, 0)];
        }
        assert!((pred[(0, 0)] - by_hand).abs() < 1e-12);
    }

    #[test]
    fn empty_batch_predicts_empty_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = randn(&mut rng, 4, 2);
        let xp = randn(&mut rng, 4, 2);
        let y = randn(&mut rng, 4, 3);
        let spec = KernelSpec::gaussian(1.0).unwrap();
        let model = train_krvfl_plus(&x, &xp, &y, &spec, &spec, 1.0, 5000.0).unwrap();
        let z = DMatrix::zeros(0, 2);
        let pred = model.predict(&z).unwrap();
        assert_eq!((pred.nrows(), pred.ncols()), (0, 3));
    }

    #[test]
    fn explicit_degree_two_map_reproduces_polynomial_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = randn(&mut rng, 5, 3);
        let kernel = MercerKernel::Polynomial {
            degree: 2,
            coef: 0.7,
        };
        let phi = kernel.explicit_feature_map(&x).unwrap();
        let via_map = &phi * phi.transpose();
        let spec = KernelSpec::new(Some(kernel), false).unwrap();
        let direct = gram_matrix(&x, &x, &spec).unwrap();
        assert!((via_map - direct).norm() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        assert!(KernelSpec::gaussian(0.0).is_err());
        assert!(KernelSpec::gaussian(-1.0).is_err());
        assert!(KernelSpec::polynomial(0, 1.0).is_err());
        assert!(KernelSpec::new(None, false).is_err());
        let x = DMatrix::zeros(2, 2);
        let z = DMatrix::zeros(2, 3);
        assert!(gram_matrix(&x, &z, &KernelSpec::linear()).is_err());
    }

    #[test]
    fn model_serialization_keeps_training_inputs_verbatim() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = randn(&mut rng, 5, 2);
        let xp = randn(&mut rng, 5, 2);
        let y = randn(&mut rng, 5, 1);
        let spec = KernelSpec::gaussian(0.025).unwrap();
        let model = train_krvfl_plus(&x, &xp, &y, &spec, &spec, 1.0, 5000.0).unwrap();
        let json = serde_json::to_string(&model).unwrap();
        let back: KrvflPlusModel = serde_json::from_str(&json).unwrap();
        assert_eq!(model, back);
        assert_eq!(back.x_train(), &x);
    }
}
