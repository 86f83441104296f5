//! k-fold cross-validation comparing all four learners on one dataset.
//! Privileged features are used during training only; every held-out
//! prediction comes from normal features alone.
//!
//! ```bash
//! cargo run -p rvfl --example cross_validation
//! ```

use rvfl::data::make_folds;
use rvfl::harness::{
    run_cv_with, synthetic_lupi, LearnerConfig, LearnerKind, Normalization, SyntheticLupiSpec,
};

fn main() -> rvfl::Result<()> {
    let dataset = synthetic_lupi(&SyntheticLupiSpec::default(), 3)?.to_one_vs_all()?;
    let folds = make_folds(dataset.n_rows(), 5, 3)?;
    println!(
        "{} rows, {} normal + {} privileged features, 5 folds\n",
        dataset.n_rows(),
        dataset.n_features(),
        dataset.n_priv_features()
    );

    println!(
        "{:<12} {:>10} {:>8} {:>9}",
        "learner", "accuracy", "std", "time_s"
    );
    for kind in [
        LearnerKind::RvflPinv,
        LearnerKind::RvflRidge,
        LearnerKind::RvflPlus,
        LearnerKind::KrvflPlus,
    ] {
        let mut learner = LearnerConfig {
            c: 30.0,
            nodes: 20,
            u: 1.0,
            tau: 2.0,
            ..LearnerConfig::new(kind)
        };
        if kind == LearnerKind::RvflPlus {
            learner.gamma = 1000.0;
        }
        let report = run_cv_with(&dataset, &learner.with_seed(9), &folds, Normalization::Off)?;
        println!(
            "{:<12} {:>10.2} {:>8.2} {:>9.3}",
            report.learner, report.mean, report.std, report.wall_time_s
        );
    }
    Ok(())
}
