//! Trains a sphere model on a generated four-topic corpus and prints the
//! loss curve and held-out silhouette.
//!
//! cargo run --release --example train_toy_sphere

use manifold_embed::corpus::synthetic::{topic_corpus, TopicCorpusSpec};
use manifold_embed::corpus::{build_vocabulary, encode, stratified_split};
use manifold_embed::eval::silhouette_score;
use manifold_embed::manifolds::ManifoldKind;
use manifold_embed::model::{embed_corpus, EmbeddingModel, ModelConfig, Trainer};
use manifold_embed::numcore::SeededRng;

fn main() -> manifold_embed::Result<()> {
    let corpus = topic_corpus(&TopicCorpusSpec::default(), 1);
    let (train, test) = stratified_split(&corpus, 0.25, &mut SeededRng::new(42))?;
    let vocab = build_vocabulary(&train, 20_000, 1);

    let mut config = ModelConfig::new(vocab.len(), ManifoldKind::sphere(3));
    config.epochs = 10;
    let mut model = EmbeddingModel::new(config)?;
    let untrained = silhouette_score(&embed_corpus(&model, &test, &vocab)?.0, &test.labels())?;

    let docs: Vec<_> = train
        .documents()
        .iter()
        .map(|d| encode(d, &vocab, 64))
        .collect();
    let stats = Trainer::new(&model).check_membership(true).fit(
        &mut model,
        &docs,
        &train.labels(),
        |e| {
            println!(
                "epoch {:>2}  loss {:.4}  active {:.2}",
                e.epoch + 1,
                e.mean_loss,
                e.active_fraction
            )
        },
    )?;
    println!(
        "{} points checked, {} off the sphere",
        stats.points_checked, stats.membership_violations
    );

    let (points, labels) = embed_corpus(&model, &test, &vocab)?;
    let trained = silhouette_score(&points, &labels)?;
    println!("held-out silhouette: {untrained:.3} untrained -> {trained:.3} trained");
    Ok(())
}
