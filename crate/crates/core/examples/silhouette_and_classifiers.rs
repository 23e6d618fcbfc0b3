//! Scores a hand-made embedding: silhouette plus the three classifiers.
//!
//! cargo run --release --example silhouette_and_classifiers

use manifold_embed::eval::{evaluate_embedding, silhouette_score, ClassifierConfig};
use manifold_embed::numcore::{Matrix, SeededRng};

fn noisy_square(
    per_class: usize,
    noise: f64,
    seed: u64,
) -> manifold_embed::Result<(Matrix, Vec<usize>)> {
    let corners = [[0.0, 0.0], [4.0, 0.0], [0.0, 4.0], [4.0, 4.0]];
    let mut rng = SeededRng::new(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..4 * per_class {
        let [x, y] = corners[i % 4];
        rows.push([
            x + rng.uniform_in(-noise, noise),
            y + rng.uniform_in(-noise, noise),
        ]);
        labels.push(i % 4);
    }
    Ok((Matrix::from_rows(&rows)?, labels))
}

fn main() -> manifold_embed::Result<()> {
    let two = Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [10.0, 10.0], [10.0, 11.0]])?;
    println!(
        "two clusters: {:.6}",
        silhouette_score(&two, &[0, 0, 1, 1])?
    );

    let (train_x, train_y) = noisy_square(50, 1.5, 1)?;
    let (test_x, test_y) = noisy_square(20, 1.5, 2)?;
    let report = evaluate_embedding(
        &train_x,
        &train_y,
        &test_x,
        &test_y,
        &ClassifierConfig::default(),
    )?;
    println!("silhouette {:.4}", report.silhouette.unwrap_or(f64::NAN));
    for (name, acc) in &report.accuracies {
        println!("{name:<20} {acc:.4}");
    }
    Ok(())
}
