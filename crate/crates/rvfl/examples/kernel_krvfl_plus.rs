//! The kernel variant: linear-plus-Gaussian Gram matrices replace random
//! enhancement features on both the normal and privileged side.
//!
//! ```bash
//! cargo run -p rvfl --example kernel_krvfl_plus
//! ```

use nalgebra::DMatrix;
use rvfl::harness::{synthetic_lupi, SyntheticLupiSpec};
use rvfl::kernel::{gram_matrix, train_krvfl_plus, KernelSpec};
use rvfl::predict::{metrics, Prediction};

fn main() -> rvfl::Result<()> {
    let spec = SyntheticLupiSpec::default();
    let train = synthetic_lupi(&spec, 5)?.to_one_vs_all()?;
    let test = synthetic_lupi(&spec, 6)?.to_one_vs_all()?;

    let kernel = KernelSpec::gaussian(2.0)?;
    let gram = gram_matrix(train.x(), train.x(), &kernel)?;
    println!(
        "training Gram: {}x{}, diagonal = |x_i|^2 + 1 (linear part plus Gaussian at zero distance)",
        gram.nrows(),
        gram.ncols()
    );

    let model = train_krvfl_plus(
        train.x(),
        train.x_priv().expect("privileged block"),
        train.y(),
        &kernel,
        &kernel,
        1.0,
        5000.0,
    )?;
    println!(
        "dual weights: {}x{} (one coefficient per training row and output)",
        model.dual_weights().nrows(),
        model.dual_weights().ncols()
    );
    println!("conditioning estimate: {:.3e}", model.condition_estimate());

    let raw = model.predict(test.x())?;
    let prediction = Prediction::from_raw(raw, test.task())?;
    println!("held-out {}", metrics(&prediction, &test)?);

    // With a zero privileged block and a linear-only privileged kernel the
    // trainer reduces to kernel ridge regression.
    let zeros = DMatrix::zeros(train.n_rows(), 3);
    let reduced = train_krvfl_plus(
        train.x(),
        &zeros,
        train.y(),
        &kernel,
        &KernelSpec::linear(),
        1.0,
        5000.0,
    )?;
    let ridge_system = &gram + DMatrix::identity(train.n_rows(), train.n_rows());
    let ridge_dual = ridge_system.full_piv_lu().solve(train.y()).expect("solve");
    let gap = (reduced.dual_weights() - &ridge_dual).norm() / ridge_dual.norm();
    println!("zero-privileged reduction vs kernel ridge: relative gap {gap:.3e}");
    Ok(())
}
