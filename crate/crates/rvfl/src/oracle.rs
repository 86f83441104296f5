//! Ground-truth solver for the privileged-information training problem.
//!
//! Instead of the algebraically eliminated closed form used by
//! [`crate::solvers`], this module assembles the full first-order (KKT)
//! system of the ridge-stabilized primal
//!
//! ```text
//! min  1/2 |w|^2 + gamma/2 |w~|^2 + C <1, H~ w~> + C/2 |e|^2
//! s.t. H w + H~ w~ + e = Y
//! ```
//!
//! as one symmetric indefinite linear system in (w, w~, lambda) and solves
//! it with a fully pivoted factorization. Eliminating the slack `e` gives
//! the stationarity conditions
//!
//! ```text
//! w = H' lambda
//! gamma w~ = H~' lambda - C H~' 1
//! H w + H~ w~ + lambda / C = Y
//! ```
//!
//! so the two routes share no linear algebra beyond the input matrices; a
//! transcription error in either cannot cancel out in both.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngExt};

use crate::error::{Error, Result};

/// Exact stationary point of the stabilized primal.
#[derive(Debug, Clone)]
pub struct KktSolution {
    pub w: DMatrix<f64>,
    pub w_corr: DMatrix<f64>,
    pub lambda: DMatrix<f64>,
}

/// The assembled saddle-point system with its block layout.
#[derive(Debug, Clone)]
pub struct KktSystem {
    lhs: DMatrix<f64>,
    rhs: DVector<f64>,
    w_len: usize,
    w_corr_len: usize,
    lambda_len: usize,
    outputs: usize,
}

impl KktSystem {
    /// Assembles the symmetric KKT system for the given problem data.
    ///
    /// Unknowns are stacked `[vec(w); vec(w_corr); vec(lambda)]`
    /// (column-major), giving a square system of size
    /// `(n+P)m + (d+P)m + Nm`.
    pub fn assemble(
        h: &DMatrix<f64>,
        h_priv: &DMatrix<f64>,
        y: &DMatrix<f64>,
        c: f64,
        gamma: f64,
    ) -> Result<Self> {
        check_problem(h, h_priv, y, c, gamma)?;
        let n_rows = h.nrows();
        let q = h.ncols();
        let r = h_priv.ncols();
        let m = y.ncols();
        let (w_len, w_corr_len, lambda_len) = (q * m, r * m, n_rows * m);
        let size = w_len + w_corr_len + lambda_len;

        let mut lhs = DMatrix::zeros(size, size);
        let mut rhs = DVector::zeros(size);

        // Per-output blocks are independent; the assembled matrix is block
        // diagonal over outputs with identical coupling structure.
        for k in 0..m {
            let wo = k * q;
            let co = w_len + k * r;
            let lo = w_len + w_corr_len + k * n_rows;

            for i in 0..q {
                lhs[(wo + i, wo + i)] = 1.0;
            }
            for i in 0..r {
                lhs[(co + i, co + i)] = gamma;
            }
            for i in 0..n_rows {
                lhs[(lo + i, lo + i)] = -1.0 / c;
            }
            for i in 0..n_rows {
                for j in 0..q {
                    lhs[(wo + j, lo + i)] = -h[(i, j)];
                    lhs[(lo + i, wo + j)] = -h[(i, j)];
                }
                for j in 0..r {
                    lhs[(co + j, lo + i)] = -h_priv[(i, j)];
                    lhs[(lo + i, co + j)] = -h_priv[(i, j)];
                }
            }
            // gamma w~ - H~' lambda = -C H~' 1
            for j in 0..r {
                let col_sum: f64 = h_priv.column(j).sum();
                rhs[co + j] = -c * col_sum;
            }
            // -(H w + H~ w~ + lambda / C) = -y
            for i in 0..n_rows {
                rhs[lo + i] = -y[(i, k)];
            }
        }

        Ok(Self {
            lhs,
            rhs,
            w_len,
            w_corr_len,
            lambda_len,
            outputs: m,
        })
    }

    pub fn lhs(&self) -> &DMatrix<f64> {
        &self.lhs
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    /// `(w, w_corr, lambda)` block lengths in the stacked unknown vector.
    pub fn block_lengths(&self) -> (usize, usize, usize) {
        (self.w_len, self.w_corr_len, self.lambda_len)
    }

    /// Solves the assembled system with a full-pivot LU factorization.
    pub fn solve(&self) -> Result<KktSolution> {
        let lu = self.lhs.clone().full_piv_lu();
        let sol = lu
            .solve(&self.rhs)
            .ok_or_else(|| Error::SingularSystem("KKT saddle-point matrix is singular".into()))?;
        if sol.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem(
                "KKT solve produced non-finite values".into(),
            ));
        }
        let m = self.outputs;
        let q = self.w_len / m;
        let r = self.w_corr_len / m;
        let n_rows = self.lambda_len / m;
        let unstack = |offset: usize, rows: usize| {
            DMatrix::from_fn(rows, m, |i, k| sol[offset + k * rows + i])
        };
        Ok(KktSolution {
            w: unstack(0, q),
            w_corr: unstack(self.w_len, r),
            lambda: unstack(self.w_len + self.w_corr_len, n_rows),
        })
    }
}

fn check_problem(
    h: &DMatrix<f64>,
    h_priv: &DMatrix<f64>,
    y: &DMatrix<f64>,
    c: f64,
    gamma: f64,
) -> Result<()> {
    if h.nrows() != h_priv.nrows() || h.nrows() != y.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "row counts differ: H {}x{}, H~ {}x{}, Y {}x{}",
            h.nrows(),
            h.ncols(),
            h_priv.nrows(),
            h_priv.ncols(),
            y.nrows(),
            y.ncols()
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
    if h.iter().any(|v| !v.is_finite())
        || h_priv.iter().any(|v| !v.is_finite())
        || y.iter().any(|v| !v.is_finite())
    {
        return Err(Error::InvalidParameter("non-finite problem data".into()));
    }
    Ok(())
}

/// Solves the stabilized primal by direct KKT assembly, returning
/// `(w, w_corr, lambda)`.
pub fn solve_primal_kkt(
    h: &DMatrix<f64>,
    h_priv: &DMatrix<f64>,
    y: &DMatrix<f64>,
    c: f64,
    gamma: f64,
) -> Result<KktSolution> {
    KktSystem::assemble(h, h_priv, y, c, gamma)?.solve()
}

/// Maximum of the three scale-relative first-order residuals at
/// `(w, w_corr, lambda)`:
///
/// 1. output-weight stationarity `w - H' lambda`,
/// 2. correcting-weight stationarity `gamma w_corr - H~' lambda + C H~' 1`,
/// 3. constraint feasibility `H w + H~ w_corr + lambda/C - Y` (the ridge
///    term `I/C` in the closed form corresponds to the `lambda/C` slack).
#[allow(clippy::too_many_arguments)]
pub fn kkt_residual(
    h: &DMatrix<f64>,
    h_priv: &DMatrix<f64>,
    y: &DMatrix<f64>,
    c: f64,
    gamma: f64,
    w: &DMatrix<f64>,
    w_corr: &DMatrix<f64>,
    lambda: &DMatrix<f64>,
) -> f64 {
    let ht_lambda = h.transpose() * lambda;
    let r1 = (w - &ht_lambda).norm() / 1f64.max(w.norm()).max(ht_lambda.norm());

    let hpt_lambda = h_priv.transpose() * lambda;
    let hpt_ones = priv_column_sums(h_priv, y.ncols());
    let r2_num = (gamma * w_corr - &hpt_lambda + c * &hpt_ones).norm();
    let r2 = r2_num
        / 1f64
            .max((gamma * w_corr).norm())
            .max(hpt_lambda.norm())
            .max((c * hpt_ones).norm());

    let fit = h * w + h_priv * w_corr;
    let slack = lambda / c;
    let r3_num = (&fit + &slack - y).norm();
    let r3 = r3_num / 1f64.max(y.norm()).max(fit.norm()).max(slack.norm());

    r1.max(r2).max(r3)
}

/// The stabilized primal objective at `(w, w_corr)` with the slack set to
/// the constraint residual `e = Y - H w - H~ w_corr`.
pub fn primal_objective(
    h: &DMatrix<f64>,
    h_priv: &DMatrix<f64>,
    y: &DMatrix<f64>,
    c: f64,
    gamma: f64,
    w: &DMatrix<f64>,
    w_corr: &DMatrix<f64>,
) -> f64 {
    let correction = h_priv * w_corr;
    let slack = y - h * w - &correction;
    0.5 * w.norm_squared()
        + 0.5 * gamma * w_corr.norm_squared()
        + c * correction.sum()
        + 0.5 * c * slack.norm_squared()
}

/// `H~' 1` replicated across output columns ((d+P) x m).
fn priv_column_sums(h_priv: &DMatrix<f64>, outputs: usize) -> DMatrix<f64> {
    DMatrix::from_fn(h_priv.ncols(), outputs, |j, _| h_priv.column(j).sum())
}

/// A randomly sized small training instance for equivalence checks.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub h: DMatrix<f64>,
    pub h_priv: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub c: f64,
    pub gamma: f64,
}

/// Draws an instance with N in [2,20], n,d in [1,4], P in [0,5],
/// m in [1,3], and C, gamma log-uniform in [0.1, 100].
pub fn sample_instance<R: Rng>(rng: &mut R) -> RandomInstance {
    let n_rows = rng.random_range(2..=20);
    let n = rng.random_range(1..=4);
    let d = rng.random_range(1..=4);
    let p = rng.random_range(0..=5);
    let m = rng.random_range(1..=3);
    let gauss = |rng: &mut R, rows: usize, cols: usize| {
        DMatrix::from_fn(rows, cols, |_, _| {
            // Box-Muller keeps this free of distribution dependencies.
            let u1: f64 = rng.random::<f64>().max(1e-12);
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        })
    };
    RandomInstance {
        h: gauss(rng, n_rows, n + p),
        h_priv: gauss(rng, n_rows, d + p),
        y: gauss(rng, n_rows, m),
        c: crate::data::log_uniform(rng, 0.1, 100.0),
        gamma: crate::data::log_uniform(rng, 0.1, 100.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scalar_instance_matches_hand_algebra() {
        // N = 1, n = 1, d = 1, P = 0, m = 1 with h = g = y = C = gamma = 1:
        // lambda = (y + C g^2/gamma) / (h^2 + g^2/gamma + 1/C) = 2/3,
        // w = 2/3, w_corr = (lambda - C)/gamma = -1/3.
        let h = DMatrix::from_element(1, 1, 1.0);
        let hp = DMatrix::from_element(1, 1, 1.0);
        let y = DMatrix::from_element(1, 1, 1.0);
        let sol = solve_primal_kkt(&h, &hp, &y, 1.0, 1.0).unwrap();
        assert!((sol.lambda[(0, 0)] - 2.0 / 3.0).abs() < 1e-14);
        assert!((sol.w[(0, 0)] - 2.0 / 3.0).abs() < 1e-14);
        assert!((sol.w_corr[(0, 0)] + 1.0 / 3.0).abs() < 1e-14);
        let res = kkt_residual(&h, &hp, &y, 1.0, 1.0, &sol.w, &sol.w_corr, &sol.lambda);
        assert!(res < 1e-14, "residual {res}");
    }

    #[test]
    fn zero_privileged_block_reduces_to_ridge_dual() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let inst = sample_instance(&mut rng);
        let hp = DMatrix::zeros(inst.h.nrows(), 2);
        let sol = solve_primal_kkt(&inst.h, &hp, &inst.y, inst.c, inst.gamma).unwrap();
        // lambda = (H H' + I/C)^{-1} Y, w = H' lambda.
        let n = inst.h.nrows();
        let a = &inst.h * inst.h.transpose() + DMatrix::identity(n, n) / inst.c;
        let lambda = a.full_piv_lu().solve(&inst.y).unwrap();
        let w = inst.h.transpose() * &lambda;
        assert!((&sol.lambda - &lambda).norm() < 1e-10 * lambda.norm().max(1.0));
        assert!((&sol.w - &w).norm() < 1e-10 * w.norm().max(1.0));
        assert!(sol.w_corr.norm() < 1e-12);
    }

    #[test]
    fn own_solution_has_tiny_residual_and_perturbation_is_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let inst = sample_instance(&mut rng);
            let sol = solve_primal_kkt(&inst.h, &inst.h_priv, &inst.y, inst.c, inst.gamma).unwrap();
            let res = kkt_residual(
                &inst.h,
                &inst.h_priv,
                &inst.y,
                inst.c,
                inst.gamma,
                &sol.w,
                &sol.w_corr,
                &sol.lambda,
            );
            assert!(res <= 1e-10, "self residual {res}");

            let mut w_bad = sol.w.clone();
            w_bad[(0, 0)] += 1e-3;
            let res_bad = kkt_residual(
                &inst.h,
                &inst.h_priv,
                &inst.y,
                inst.c,
                inst.gamma,
                &w_bad,
                &sol.w_corr,
                &sol.lambda,
            );
            assert!(res_bad >= 1e-4, "perturbed residual {res_bad}");
        }
    }

    #[test]
    fn solution_minimizes_objective_over_random_feasible_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let inst = sample_instance(&mut rng);
        let sol = solve_primal_kkt(&inst.h, &inst.h_priv, &inst.y, inst.c, inst.gamma).unwrap();
        let best = primal_objective(
            &inst.h,
            &inst.h_priv,
            &inst.y,
            inst.c,
            inst.gamma,
            &sol.w,
            &sol.w_corr,
        );
        for _ in 0..100 {
            let dw = DMatrix::from_fn(sol.w.nrows(), sol.w.ncols(), |_, _| {
                rng.random_range(-0.5..0.5)
            });
            let dc = DMatrix::from_fn(sol.w_corr.nrows(), sol.w_corr.ncols(), |_, _| {
                rng.random_range(-0.5..0.5)
            });
            let obj = primal_objective(
                &inst.h,
                &inst.h_priv,
                &inst.y,
                inst.c,
                inst.gamma,
                &(&sol.w + dw),
                &(&sol.w_corr + dc),
            );
            assert!(obj >= best - 1e-10, "found lower objective {obj} < {best}");
        }
    }

    #[test]
    fn objective_is_invariant_under_row_reordering() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let inst = sample_instance(&mut rng);
        let sol = solve_primal_kkt(&inst.h, &inst.h_priv, &inst.y, inst.c, inst.gamma).unwrap();
        let base = primal_objective(
            &inst.h,
            &inst.h_priv,
            &inst.y,
            inst.c,
            inst.gamma,
            &sol.w,
            &sol.w_corr,
        );

        let n = inst.h.nrows();
        let perm: Vec<usize> = (0..n).rev().collect();
        let shuffle = |m: &DMatrix<f64>| DMatrix::from_fn(n, m.ncols(), |i, j| m[(perm[i], j)]);
        let (h2, hp2, y2) = (shuffle(&inst.h), shuffle(&inst.h_priv), shuffle(&inst.y));
        let sol2 = solve_primal_kkt(&h2, &hp2, &y2, inst.c, inst.gamma).unwrap();
        let reordered = primal_objective(&h2, &hp2, &y2, inst.c, inst.gamma, &sol2.w, &sol2.w_corr);
        assert!(
            (base - reordered).abs() <= 1e-10 * base.abs().max(1.0),
            "{base} vs {reordered}"
        );
    }

    #[test]
    fn assembled_lhs_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let inst = sample_instance(&mut rng);
        let sys = KktSystem::assemble(&inst.h, &inst.h_priv, &inst.y, inst.c, inst.gamma).unwrap();
        let asym = (sys.lhs() - sys.lhs().transpose()).norm();
        assert_eq!(asym, 0.0);
        let (a, b, c) = sys.block_lengths();
        assert_eq!(a + b + c, sys.lhs().nrows());
    }

    #[test]
    fn rejects_invalid_parameters() {
        let h = DMatrix::zeros(2, 2);
        let y = DMatrix::zeros(2, 1);
        assert!(solve_primal_kkt(&h, &h, &y, 0.0, 1.0).is_err());
        assert!(solve_primal_kkt(&h, &h, &y, 1.0, -1.0).is_err());
        let y_bad = DMatrix::zeros(3, 1);
        assert!(solve_primal_kkt(&h, &h, &y_bad, 1.0, 1.0).is_err());
    }
}
