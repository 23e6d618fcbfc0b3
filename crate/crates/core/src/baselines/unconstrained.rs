use serde::{Deserialize, Serialize};

use crate::corpus::{LabeledCorpus, Vocabulary};
use crate::error::Result;
use crate::model::{embed_corpus, train, EmbeddingModel, ModelConfig, Projection};
use crate::numcore::Matrix;

/// How the unconstrained embedding layer is prepared.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnconstrainedMode {
    /// Random initialization only.
    #[default]
    Untrained,
    /// The triplet training loop with no projection after the head.
    TripletTrained,
}

impl UnconstrainedMode {
    pub fn name(self) -> &'static str {
        match self {
            UnconstrainedMode::Untrained => "untrained",
            UnconstrainedMode::TripletTrained => "triplet_trained",
        }
    }
}

/// Builds the baseline network from `config` with its projection replaced
/// by the identity of the same head width. In triplet mode it is trained on
/// `corpus`.
pub fn unconstrained_model(
    corpus: &LabeledCorpus,
    vocab: &Vocabulary,
    config: &ModelConfig,
    mode: UnconstrainedMode,
) -> Result<EmbeddingModel> {
    let mut config = config.clone();
    config.projection = Projection::Identity {
        dim: config.projection.head_dim(),
    };
    let mut model = EmbeddingModel::new(config)?;
    if mode == UnconstrainedMode::TripletTrained {
        train(&mut model, corpus, vocab)?;
    }
    Ok(model)
}

/// Prepares the baseline on `corpus` and embeds the same corpus.
pub fn unconstrained_embed(
    corpus: &LabeledCorpus,
    vocab: &Vocabulary,
    config: &ModelConfig,
    mode: UnconstrainedMode,
) -> Result<(Matrix, Vec<usize>)> {
    let model = unconstrained_model(corpus, vocab, config, mode)?;
    embed_corpus(&model, corpus, vocab)
}
