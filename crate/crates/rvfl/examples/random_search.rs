//! Random hyperparameter search: log-uniform ranges for C and gamma, the
//! power-of-two grid for u, and activation selection, scored by
//! cross-validation.
//!
//! ```bash
//! cargo run -p rvfl --example random_search
//! ```

use rvfl::harness::{
    random_search_with, select_activation, synthetic_lupi, LearnerConfig, LearnerKind,
    Normalization, ParamSpace, SearchSpace, SyntheticLupiSpec, Validation,
};

fn main() -> rvfl::Result<()> {
    let dataset = synthetic_lupi(
        &SyntheticLupiSpec {
            samples: 160,
            ..SyntheticLupiSpec::default()
        },
        11,
    )?
    .to_one_vs_all()?;
    let validation = Validation::CrossVal {
        k: 2,
        fold_seed: 11,
    };

    let space = SearchSpace {
        c: ParamSpace::LogUniform { lo: 1e-2, hi: 1e3 },
        gamma: ParamSpace::LogUniform { lo: 1e1, hi: 1e5 },
        u: ParamSpace::Fixed(1.0),
        nodes: 20,
        budget: 30,
        ..SearchSpace::new(LearnerKind::RvflPlus, 30)
    };
    let outcome = random_search_with(&dataset, &space, &validation, 99, Normalization::Off)?;
    println!(
        "best of {} draws: C = {:.4}, gamma = {:.1}, activation = {} -> {:.2}% validation accuracy",
        outcome.evaluated.len(),
        outcome.best.c,
        outcome.best.gamma,
        outcome.best.activation,
        outcome.best_score
    );

    let mut ranked = outcome.evaluated.clone();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("\ntop five draws:");
    for (config, score) in ranked.iter().take(5) {
        println!(
            "  C = {:>10.4}, gamma = {:>10.1}, {}: {:.2}%",
            config.c, config.gamma, config.activation, score
        );
    }

    // Activation sweep at a fixed configuration.
    let base = LearnerConfig {
        c: 30.0,
        gamma: 1000.0,
        nodes: 20,
        u: 1.0,
        ..LearnerConfig::new(LearnerKind::RvflPlus)
    }
    .with_seed(11);
    let (best, scores) = select_activation(&dataset, &base, &validation, Normalization::Off)?;
    println!("\nactivation sweep:");
    for (activation, report) in &scores {
        println!("  {activation:<8} {:.2}%", report.mean);
    }
    println!("selected: {best}");
    Ok(())
}
