//! Paired-seed demonstration that training-only side information pays off:
//! on data whose labels are partly unreliable, a model whose correcting
//! function sees per-sample reliability marks beats the same model without
//! them, seed for seed.
//!
//! ```bash
//! cargo run -p rvfl --example lupi_benefit
//! ```

use rvfl::data::make_folds;
use rvfl::harness::{
    run_cv_with, synthetic_lupi, trial_seed, LearnerConfig, LearnerKind, Normalization,
    SyntheticLupiSpec,
};

fn main() -> rvfl::Result<()> {
    let spec = SyntheticLupiSpec::default();
    println!(
        "{} samples, {} features, {:.0}% of labels re-drawn at random;",
        spec.samples,
        spec.feature_dim,
        100.0 * spec.unreliable_rate
    );
    println!("privileged features mark the unreliable rows (training only)\n");

    let ridge = LearnerConfig {
        c: 30.0,
        nodes: 20,
        u: 1.0,
        ..LearnerConfig::new(LearnerKind::RvflRidge)
    };
    let plus = LearnerConfig {
        c: 30.0,
        gamma: 1000.0,
        nodes: 20,
        u: 1.0,
        ..LearnerConfig::new(LearnerKind::RvflPlus)
    };

    let layer_reps = 3usize;
    let mut diffs = Vec::new();
    println!("seed   plain   privileged   gain");
    for seed in 0..10u64 {
        let dataset = synthetic_lupi(&spec, seed)?.to_one_vs_all()?;
        let folds = make_folds(dataset.n_rows(), 2, seed)?;
        let (mut acc_plain, mut acc_priv) = (0.0, 0.0);
        for rep in 0..layer_reps {
            let layer_seed = trial_seed(seed, 1000 + rep);
            acc_plain += run_cv_with(
                &dataset,
                &ridge.with_seed(layer_seed),
                &folds,
                Normalization::Off,
            )?
            .mean;
            acc_priv += run_cv_with(
                &dataset,
                &plus.with_seed(layer_seed),
                &folds,
                Normalization::Off,
            )?
            .mean;
        }
        acc_plain /= layer_reps as f64;
        acc_priv /= layer_reps as f64;
        println!(
            "{seed:>4} {acc_plain:>7.2} {acc_priv:>12.2} {:>+6.2}",
            acc_priv - acc_plain
        );
        diffs.push(acc_priv - acc_plain);
    }
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let wins = diffs.iter().filter(|&&d| d > 0.0).count();
    println!(
        "\nmean gain {mean:+.2} accuracy points, positive in {wins}/{} seeds",
        diffs.len()
    );
    Ok(())
}
