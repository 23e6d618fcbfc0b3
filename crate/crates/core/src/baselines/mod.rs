//! Comparison embeddings: TF-IDF vectors, averaged word vectors and the
//! unconstrained embedding layer.

mod tfidf;
mod unconstrained;
mod wordvec;

pub use tfidf::{fit_tfidf, transform_tfidf, TfidfModel};
pub use unconstrained::{unconstrained_embed, unconstrained_model, UnconstrainedMode};
pub use wordvec::{
    average_word_vectors, embed_word_vectors, hash_fallback_vectors, load_word_vectors,
    WordVectorTable,
};
