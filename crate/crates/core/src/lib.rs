//! Sentence embeddings trained with a triplet objective and constrained to
//! a sphere, torus or Möbius strip, together with the classical baselines
//! (TF-IDF, averaged word vectors, an unconstrained embedding layer) and the
//! evaluation used to compare them: silhouette score over class labels and
//! held-out accuracy of three classifiers.
//!
//! The pipeline, end to end:
//!
//! ```no_run
//! use manifold_embed::corpus::{build_vocabulary, load_ag_news_csv, stratified_split, LoadOptions};
//! use manifold_embed::manifolds::ManifoldKind;
//! use manifold_embed::model::{embed_corpus, train, EmbeddingModel, ModelConfig};
//! use manifold_embed::numcore::SeededRng;
//!
//! # fn main() -> manifold_embed::Result<()> {
//! let corpus = load_ag_news_csv("train.csv", &LoadOptions::balanced(2800))?;
//! let (train_set, test_set) = stratified_split(&corpus, 800.0 / 2800.0, &mut SeededRng::new(42))?;
//! let vocab = build_vocabulary(&train_set, 20_000, 2);
//! let config = ModelConfig::new(vocab.len(), ManifoldKind::sphere(3));
//! let mut model = EmbeddingModel::new(config)?;
//! let stats = train(&mut model, &train_set, &vocab)?;
//! let (points, labels) = embed_corpus(&model, &test_set, &vocab)?;
//! # Ok(())
//! # }
//! ```

pub mod baselines;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod fsutil;
pub mod manifolds;
pub mod model;
pub mod numcore;

pub use error::{Error, Result};
