//! Trains a flat-torus model, reduces its 4-D points to 3 principal
//! components and writes the `x,y,z,label_name` CSV.
//!
//! cargo run --release --example export_point_cloud -- points.csv

use manifold_embed::cli::points_csv;
use manifold_embed::corpus::build_vocabulary;
use manifold_embed::corpus::synthetic::{topic_corpus, TopicCorpusSpec};
use manifold_embed::fsutil::write_atomic;
use manifold_embed::manifolds::ManifoldKind;
use manifold_embed::model::{embed_corpus, train, EmbeddingModel, ModelConfig};
use manifold_embed::numcore::principal_components;

fn main() -> manifold_embed::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "torus_points.csv".into());
    let corpus = topic_corpus(&TopicCorpusSpec::default(), 3);
    let vocab = build_vocabulary(&corpus, 20_000, 1);
    let mut config = ModelConfig::new(vocab.len(), ManifoldKind::TorusFlat);
    config.epochs = 5;
    let mut model = EmbeddingModel::new(config)?;
    train(&mut model, &corpus, &vocab)?;

    let (points, labels) = embed_corpus(&model, &corpus, &vocab)?;
    let reduced = principal_components(&points, 3)?;
    write_atomic(&out, &points_csv(&reduced, &labels, corpus.label_names())?)?;
    println!("wrote {} rows to {out}", reduced.rows());
    Ok(())
}
