//! Evaluate the Rademacher-complexity generalization bound at quantities
//! measured from a trained model, and compare it with held-out loss.
//!
//! ```bash
//! cargo run -p rvfl --example generalization_bound
//! ```

use nalgebra::DMatrix;
use rvfl::bound::{generalization_bound_terms, measure_zb, per_column_weight_norms, BoundInputs};
use rvfl::harness::{synthetic_lupi, SyntheticLupiSpec};
use rvfl::solvers::RvflPlusModel;
use rvfl::{Activation, EnhancementLayer};

fn main() -> rvfl::Result<()> {
    let spec = SyntheticLupiSpec {
        samples: 100,
        unreliable_rate: 0.2,
        sketch_scale: 3.0,
        ..SyntheticLupiSpec::default()
    };
    let train = synthetic_lupi(&spec, 8)?;
    let test = synthetic_lupi(&spec, 9)?;

    let layer = EnhancementLayer::init(train.n_features(), 20, Activation::Sigmoid, 1.0, 21)?;
    let layer_priv =
        EnhancementLayer::init(train.n_priv_features(), 20, Activation::Sigmoid, 1.0, 22)?;
    let (model, _) = RvflPlusModel::fit(
        layer,
        layer_priv,
        train.x(),
        train.x_priv().expect("privileged block"),
        train.y(),
        1.0,
        5000.0,
    )?;

    let h = model.layer().apply(train.x())?;
    let (z_bound, b_bound) = measure_zb(&model, &h);
    println!("measured from the trained model:");
    println!("  Z (max enhanced-row norm) = {z_bound:.4}");
    println!("  B (max weight-column norm) = {b_bound:.4}");
    println!(
        "  per-column weight norms: {:?}",
        per_column_weight_norms(model.weights())
    );

    let abs_loss = |raw: &DMatrix<f64>, y: &DMatrix<f64>| {
        (raw - y).iter().map(|v| v.abs()).sum::<f64>() / y.nrows() as f64
    };
    let train_loss = abs_loss(&model.predict(train.x())?, train.y());
    let test_loss = abs_loss(&model.predict(test.x())?, test.y());

    let terms = generalization_bound_terms(&BoundInputs {
        lipschitz: 1.0,
        feature_norm_bound: z_bound,
        weight_norm_bound: b_bound,
        samples: train.n_rows(),
        delta: 0.05,
        empirical_loss: train_loss,
    })?;
    println!(
        "\nabsolute-loss bound at delta = 0.05, M = {}:",
        train.n_rows()
    );
    println!("  empirical loss    {:.4}", terms.empirical_loss);
    println!("  complexity term   {:.4}", terms.complexity_term);
    println!("  confidence term   {:.4}", terms.confidence_term);
    println!("  total             {:.4}", terms.total());
    println!(
        "held-out loss       {test_loss:.4}  (bound holds: {})",
        terms.total() >= test_loss
    );

    println!("\nscaling: quadrupling M halves the complexity term");
    for m in [100, 400, 1600] {
        let scaled = generalization_bound_terms(&BoundInputs {
            samples: m,
            ..BoundInputs {
                lipschitz: 1.0,
                feature_norm_bound: z_bound,
                weight_norm_bound: b_bound,
                samples: m,
                delta: 0.05,
                empirical_loss: train_loss,
            }
        })?;
        println!(
            "  M = {m:>5}: complexity {:.4}, total {:.4}",
            scaled.complexity_term,
            scaled.total()
        );
    }
    Ok(())
}
