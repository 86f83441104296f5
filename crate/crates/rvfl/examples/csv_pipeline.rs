//! The tabular pipeline end to end: generate (once) and load the bundled
//! demo CSV, one-hot the labels, L1-normalize, and split the attributes
//! into normal and privileged halves.
//!
//! ```bash
//! cargo run -p rvfl --example csv_pipeline
//! ```

use std::path::Path;

use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rvfl::data::{
    default_normal_count, load_csv, normalize_l1, save_csv, split_privileged, Dataset, LabelColumn,
    Task,
};

fn main() -> rvfl::Result<()> {
    let path = Path::new(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/data/demo_multiclass.csv"
    ));
    if !path.exists() {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).expect("create data directory");
        }
        let dataset = three_blobs(120, 17)?;
        save_csv(&dataset, path)?;
        println!("wrote {}", path.display());
    }

    let dataset = load_csv(
        path,
        &LabelColumn::Name("label".into()),
        Task::Multiclass,
        true,
    )?;
    println!(
        "loaded {}: {} rows, {} features, {} classes {:?}",
        path.display(),
        dataset.n_rows(),
        dataset.n_features(),
        dataset.n_outputs(),
        dataset.class_labels().unwrap_or(&[])
    );
    let row0: Vec<f64> = dataset.y().row(0).iter().copied().collect();
    println!("first target row (one-hot, sorted label order): {row0:?}");

    let normalized = normalize_l1(&dataset);
    let column_sum: f64 = normalized.x().column(0).iter().map(|v| v.abs()).sum();
    println!("after L1 normalization, |column 0| sums to {column_sum:.12}");

    let at = default_normal_count(dataset.n_features());
    let split = split_privileged(&normalized, at)?;
    println!(
        "half split at {at}: {} normal features, {} privileged (training-only) features",
        split.n_features(),
        split.n_priv_features()
    );
    Ok(())
}

fn three_blobs(n: usize, seed: u64) -> rvfl::Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = [
        [2.0, 0.0, -1.0, 0.5, 0.0, 1.0],
        [-1.5, 1.5, 1.0, -0.5, 0.8, -1.0],
        [0.0, -2.0, 0.5, 1.5, -1.2, 0.0],
    ];
    let labels = ["a", "b", "c"];
    let x = DMatrix::from_fn(n, 6, |i, j| centers[i % 3][j] + rng.random_range(-1.0..1.0));
    let y = DMatrix::from_fn(n, 3, |i, k| if i % 3 == k { 1.0 } else { 0.0 });
    Dataset::new(
        x,
        None,
        y,
        Task::Multiclass,
        Some(labels.iter().map(|s| s.to_string()).collect()),
    )
}
