//! Basics: train the plain network with both closed forms (pseudo-inverse
//! and ridge) on a small regression problem and compare fits.
//!
//! ```bash
//! cargo run -p rvfl --example train_rvfl
//! ```

use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rvfl::solvers::RvflModel;
use rvfl::{Activation, EnhancementLayer};

fn main() -> rvfl::Result<()> {
    // y = sin(2 x0) + 0.5 x1 with a little observation noise.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 120;
    let x = DMatrix::from_fn(n, 2, |_, _| rng.random_range(-2.0..2.0f64));
    let y = DMatrix::from_fn(n, 1, |i, _| {
        (2.0 * x[(i, 0)]).sin() + 0.5 * x[(i, 1)] + 0.05 * rng.random_range(-1.0..1.0f64)
    });
    let (x_test, x_train) = (x.rows(0, 40).into_owned(), x.rows(40, 80).into_owned());
    let (y_test, y_train) = (y.rows(0, 40).into_owned(), y.rows(40, 80).into_owned());

    let rmse = |pred: &DMatrix<f64>, truth: &DMatrix<f64>| {
        ((pred - truth).norm_squared() / truth.nrows() as f64).sqrt()
    };

    for nodes in [10, 50, 200] {
        let layer = EnhancementLayer::init(2, nodes, Activation::Sigmoid, 2f64.powf(2.5), 7)?;
        let pinv = RvflModel::fit_pinv(layer.clone(), &x_train, &y_train)?;
        let ridge = RvflModel::fit_ridge(layer, &x_train, &y_train, 100.0)?;
        println!(
            "P = {nodes:>3}: pseudo-inverse test rmse {:.4}, ridge (C = 100) test rmse {:.4}",
            rmse(&pinv.predict(&x_test)?, &y_test),
            rmse(&ridge.predict(&x_test)?, &y_test),
        );
    }
    println!("the direct link keeps the model linear-capable even at P = 10");
    Ok(())
}
