//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with the measured margin. Run with
//! `cargo test --test acceptance -- --nocapture` to see every line.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rvfl::bound::{generalization_bound, measure_zb, BoundInputs};
use rvfl::cli;
use rvfl::data::{make_folds, normalize_l1, Dataset, Task};
use rvfl::enhance::EnhancedOutput;
use rvfl::harness::{
    run_cv_with, synthetic_lupi, LearnerConfig, LearnerKind, Normalization, SyntheticLupiSpec,
};
use rvfl::kernel::{gram_matrix, train_krvfl_plus, KernelSpec, MercerKernel};
use rvfl::solvers::{train_rvfl_pinv, train_rvfl_plus, train_rvfl_ridge};
use rvfl::{Activation, EnhancementLayer};

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "[{}] {criterion} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
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
fn criterion_1_closed_form_matches_kkt_oracle() {
    let started = Instant::now();
    let verdict = cli::cmd_verify(100, 20_260_808, false).expect("verification run");
    let elapsed = started.elapsed().as_secs_f64();
    let worst = verdict
        .max_weight_err
        .max(verdict.max_correcting_err)
        .max(verdict.max_lambda_err);
    report(
        "criterion 1: closed form vs KKT oracle (100 instances, tol 1e-8)",
        verdict.pass && elapsed < 10.0,
        &format!(
            "max rel err {:.3e}, max KKT residual {:.3e}, {:.2}s",
            worst, verdict.max_kkt_residual, elapsed
        ),
    );
}

#[test]
fn criterion_2_kernel_route_equals_explicit_feature_route() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let kernel = MercerKernel::Polynomial {
        degree: 2,
        coef: 0.5,
    };
    let spec = KernelSpec::new(Some(kernel), true).expect("kernel spec");
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(3..=10);
        let n_feat = rng.random_range(1..=3);
        let d_feat = rng.random_range(1..=3);
        let m = rng.random_range(1..=3);
        let c = rvfl_log_uniform(&mut rng, 0.1, 100.0);
        let gamma = rvfl_log_uniform(&mut rng, 0.1, 100.0);
        let x = randn(&mut rng, n, n_feat);
        let xp = randn(&mut rng, n, d_feat);
        let y = randn(&mut rng, n, m);
        let z = randn(&mut rng, 5, n_feat);

        // Explicit-feature route: H2 is the polynomial kernel's finite map.
        let h = EnhancedOutput::from_blocks(&x, &kernel.explicit_feature_map(&x).unwrap()).unwrap();
        let hp =
            EnhancedOutput::from_blocks(&xp, &kernel.explicit_feature_map(&xp).unwrap()).unwrap();
        let (solution, _) = train_rvfl_plus(&h, &hp, &y, c, gamma).expect("explicit route");
        let z_features =
            EnhancedOutput::from_blocks(&z, &kernel.explicit_feature_map(&z).unwrap()).unwrap();
        let explicit_pred = z_features.matrix() * &solution.weights;

        // Kernel route on the same data.
        let model = train_krvfl_plus(&x, &xp, &y, &spec, &spec, c, gamma).expect("kernel route");
        let kernel_pred = model.predict(&z).expect("kernel prediction");

        worst = worst.max(rel_err(&kernel_pred, &explicit_pred));
    }
    let elapsed = started.elapsed().as_secs_f64();
    report(
        "criterion 2: kernel/explicit-feature consistency (20 instances, tol 1e-8)",
        worst <= 1e-8 && elapsed < 5.0,
        &format!("max rel err {worst:.3e}, {elapsed:.2}s"),
    );
}

fn rvfl_log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp()
}

#[test]
fn criterion_3_reduction_limits() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let h_mat = randn(&mut rng, 9, 5);
    let y = randn(&mut rng, 9, 2);
    let h = EnhancedOutput::from_matrix(h_mat.clone(), 0).unwrap();
    let c = 2.5;

    // (a) zeroed privileged block reduces to the dual-form ridge.
    let zeros = EnhancedOutput::from_matrix(DMatrix::zeros(9, 4), 0).unwrap();
    let (no_priv, _) = train_rvfl_plus(&h, &zeros, &y, c, 7.0).unwrap();
    let a_sys = &h_mat * h_mat.transpose() + DMatrix::identity(9, 9) / c;
    let dual_ridge = h_mat.transpose() * a_sys.full_piv_lu().solve(&y).unwrap();
    let err_a = rel_err(&no_priv.weights, &dual_ridge);

    // (b) gamma -> infinity suppresses a real privileged block.
    let hp = EnhancedOutput::from_matrix(randn(&mut rng, 9, 4), 0).unwrap();
    let (suppressed, _) = train_rvfl_plus(&h, &hp, &y, c, 1e12).unwrap();
    let err_b = rel_err(&suppressed.weights, &no_priv.weights);

    // (c) C -> infinity on a full-rank tall system recovers the
    // pseudo-inverse solution.
    let tall = EnhancedOutput::from_matrix(randn(&mut rng, 20, 6), 0).unwrap();
    let y_tall = randn(&mut rng, 20, 2);
    let ridge = train_rvfl_ridge(&tall, &y_tall, 1e12).unwrap();
    let pinv = train_rvfl_pinv(&tall, &y_tall).unwrap();
    let err_c = rel_err(&ridge, &pinv);

    report(
        "criterion 3: reduction limits (a: tol 1e-8, b/c: tol 1e-6)",
        err_a <= 1e-8 && err_b <= 1e-6 && err_c <= 1e-6,
        &format!("zeroed-privileged {err_a:.3e}, large-gamma {err_b:.3e}, large-C {err_c:.3e}"),
    );
}

#[test]
fn criterion_4_privileged_information_benefit() {
    let started = Instant::now();
    let spec = SyntheticLupiSpec::default();
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
    // Per generator seed: two-fold CV, same folds and same five layer
    // draws for both learners (paired), accuracy difference averaged over
    // the layer draws.
    let layer_reps = 5usize;
    let mut diffs = Vec::with_capacity(20);
    for seed in 0..20u64 {
        let dataset = synthetic_lupi(&spec, seed)
            .expect("generator")
            .to_one_vs_all()
            .expect("one-vs-all route");
        let folds = make_folds(dataset.n_rows(), 2, seed).unwrap();
        let mut diff = 0.0;
        for rep in 0..layer_reps {
            let layer_seed = rvfl::harness::trial_seed(seed, 1000 + rep);
            let without = run_cv_with(
                &dataset,
                &ridge.with_seed(layer_seed),
                &folds,
                Normalization::Off,
            )
            .expect("ridge run");
            let with_priv = run_cv_with(
                &dataset,
                &plus.with_seed(layer_seed),
                &folds,
                Normalization::Off,
            )
            .expect("privileged run");
            diff += with_priv.mean - without.mean;
        }
        diffs.push(diff / layer_reps as f64);
    }
    let elapsed = started.elapsed().as_secs_f64();
    let mean_diff = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let wins = diffs.iter().filter(|&&d| d > 0.0).count();
    report(
        "criterion 4: privileged-information benefit (20 paired seeds)",
        mean_diff > 0.0 && wins >= 15 && elapsed < 60.0,
        &format!(
            "mean accuracy gain {mean_diff:+.3} points, positive in {wins}/20 seeds, {elapsed:.2}s"
        ),
    );
}

#[test]
fn criterion_5_generalization_bound_sanity() {
    let started = Instant::now();

    // (a) monotone decreasing in the sample count.
    let bound_at = |m: usize| {
        generalization_bound(&BoundInputs {
            lipschitz: 1.0,
            feature_norm_bound: 2.0,
            weight_norm_bound: 1.5,
            samples: m,
            delta: 0.05,
            empirical_loss: 0.2,
        })
        .unwrap()
    };
    let monotone = bound_at(100) > bound_at(1_000) && bound_at(1_000) > bound_at(10_000);

    // (b) measured-bound validity on resampled desk-scale binary tasks.
    let spec = SyntheticLupiSpec {
        samples: 80,
        unreliable_rate: 0.2,
        sketch_scale: 3.0,
        ..SyntheticLupiSpec::default()
    };
    let mut holds = 0usize;
    for seed in 0..100u64 {
        let train = synthetic_lupi(&spec, seed).unwrap();
        let test = synthetic_lupi(&spec, seed + 10_000).unwrap();
        let layer =
            EnhancementLayer::init(train.n_features(), 20, Activation::Sigmoid, 1.0, seed).unwrap();
        let layer_priv = EnhancementLayer::init(
            train.n_priv_features(),
            20,
            Activation::Sigmoid,
            1.0,
            seed + 1,
        )
        .unwrap();
        let (model, _) = rvfl::solvers::RvflPlusModel::fit(
            layer,
            layer_priv,
            train.x(),
            train.x_priv().unwrap(),
            train.y(),
            1.0,
            5000.0,
        )
        .unwrap();

        let h = model.layer().apply(train.x()).unwrap();
        let (z_bound, b_bound) = measure_zb(&model, &h);
        let abs_loss = |raw: &DMatrix<f64>, y: &DMatrix<f64>| {
            (raw - y).iter().map(|v| v.abs()).sum::<f64>() / y.nrows() as f64
        };
        let train_loss = abs_loss(&model.predict(train.x()).unwrap(), train.y());
        let test_loss = abs_loss(&model.predict(test.x()).unwrap(), test.y());
        let bound = generalization_bound(&BoundInputs {
            lipschitz: 1.0,
            feature_norm_bound: z_bound,
            weight_norm_bound: b_bound,
            samples: train.n_rows(),
            delta: 0.05,
            empirical_loss: train_loss,
        })
        .unwrap();
        if bound >= test_loss {
            holds += 1;
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    report(
        "criterion 5: bound monotonicity and Monte-Carlo validity",
        monotone && holds >= 95 && elapsed < 30.0,
        &format!("monotone in M: {monotone}, bound held in {holds}/100 resamples, {elapsed:.2}s"),
    );
}

#[test]
fn criterion_6_pipeline_invariants() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut pass = true;
    let mut notes = Vec::new();

    // L1 idempotence (zero column included).
    let mut x = randn(&mut rng, 12, 4);
    for i in 0..12 {
        x[(i, 2)] = 0.0;
    }
    let y = randn(&mut rng, 12, 1);
    let d = Dataset::new(x, None, y, Task::Regression, None).unwrap();
    let once = normalize_l1(&d);
    let twice = normalize_l1(&once);
    let idem = (twice.x() - once.x()).norm();
    if idem > 1e-12 {
        pass = false;
        notes.push(format!("idempotence residual {idem:.3e}"));
    }

    // Split then horizontal re-concatenation is exact.
    let wide = Dataset::new(
        randn(&mut rng, 8, 7),
        None,
        randn(&mut rng, 8, 1),
        Task::Regression,
        None,
    )
    .unwrap();
    let split = rvfl::data::split_privileged(&wide, 4).unwrap();
    let mut rejoined = DMatrix::zeros(8, 7);
    rejoined.view_mut((0, 0), (8, 4)).copy_from(split.x());
    rejoined
        .view_mut((0, 4), (8, 3))
        .copy_from(split.x_priv().unwrap());
    if &rejoined != wide.x() {
        pass = false;
        notes.push("split/concat mismatch".into());
    }

    // Fold accounting and determinism.
    let plan = make_folds(23, 4, 9).unwrap();
    let mut counts = vec![0usize; 4];
    for &f in plan.assignments() {
        counts[f] += 1;
    }
    let (min_count, max_count) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
    if plan.assignments().len() != 23 || max_count - min_count > 1 {
        pass = false;
        notes.push(format!("fold sizes {counts:?}"));
    }
    if make_folds(23, 4, 9).unwrap() != plan {
        pass = false;
        notes.push("fold plan not deterministic".into());
    }

    // Seeded determinism of noise injection and layer init.
    let noisy_a = rvfl::data::add_white_noise(&d, 10.0, 5).unwrap();
    let noisy_b = rvfl::data::add_white_noise(&d, 10.0, 5).unwrap();
    if noisy_a.x() != noisy_b.x() {
        pass = false;
        notes.push("noise not deterministic".into());
    }
    let quiet = rvfl::data::add_white_noise(&d, -300.0, 5).unwrap();
    let drift = (quiet.x() - d.x()).norm();
    if drift > 1e-12 {
        pass = false;
        notes.push(format!("-300 dBW drift {drift:.3e}"));
    }
    let layer_a = EnhancementLayer::init(3, 5, Activation::Tribas, 1.0, 11).unwrap();
    let layer_b = EnhancementLayer::init(3, 5, Activation::Tribas, 1.0, 11).unwrap();
    if layer_a != layer_b {
        pass = false;
        notes.push("layer init not deterministic".into());
    }

    let elapsed = started.elapsed().as_secs_f64();
    report(
        "criterion 6: pipeline invariants",
        pass && elapsed < 10.0,
        &if notes.is_empty() {
            format!("idempotence, split/concat, folds, determinism all hold, {elapsed:.2}s")
        } else {
            notes.join("; ")
        },
    );
}

#[test]
fn criterion_7_gram_symmetry_and_positive_semidefiniteness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_asym = 0.0f64;
    let mut worst_eig = f64::INFINITY;
    for &(n, tau) in &[(50usize, 0.025), (120, 0.7), (200, 2.0)] {
        let x = randn(&mut rng, n, 5) * 0.6;
        let spec = KernelSpec::gaussian(tau).unwrap();
        let gram = gram_matrix(&x, &x, &spec).unwrap();
        worst_asym = worst_asym.max((&gram - gram.transpose()).norm());
        let eigen = nalgebra::SymmetricEigen::new(gram);
        worst_eig = worst_eig.min(eigen.eigenvalues.min());
    }
    // Ridge-shifted system floor: min eig >= 1/C - 1e-10.
    let x = randn(&mut rng, 60, 4);
    let xp = randn(&mut rng, 60, 3);
    let spec = KernelSpec::gaussian(0.5).unwrap();
    let c = 2.0;
    let gamma = 50.0;
    let mut shifted =
        gram_matrix(&x, &x, &spec).unwrap() + gram_matrix(&xp, &xp, &spec).unwrap() / gamma;
    for i in 0..60 {
        shifted[(i, i)] += 1.0 / c;
    }
    let shifted_min = nalgebra::SymmetricEigen::new(shifted).eigenvalues.min();

    let elapsed = started.elapsed().as_secs_f64();
    report(
        "criterion 7: Gram symmetry and PSD up to N=200",
        worst_asym <= 1e-12 && worst_eig >= -1e-10 && shifted_min >= 1.0 / c - 1e-10,
        &format!(
            "max asymmetry {worst_asym:.3e}, min eigenvalue {worst_eig:.3e}, ridge-shifted floor {shifted_min:.6} (>= {:.6}), {elapsed:.2}s",
            1.0 / c - 1e-10
        ),
    );
}
