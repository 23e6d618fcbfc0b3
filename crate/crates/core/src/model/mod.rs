//! The trainable network: embedding table → mean pooling → dense head →
//! projection, trained with a hinge triplet objective.

mod loss;
mod persist;
mod train;

pub use loss::{triplet_loss, triplet_loss_backward, TripletGrads};
pub use persist::{load_model, save_model, SavedModel, FORMAT_VERSION};
pub use train::{train, AdamState, EpochStats, Gradients, TrainStats, Trainer};

use serde::{Deserialize, Serialize};

use crate::corpus::{encode, LabeledCorpus, TokenizedDoc, Vocabulary, PAD_ID};
use crate::error::{Error, Result};
use crate::manifolds::{self, ManifoldKind};
use crate::numcore::{Matrix, SeededRng};

/// Stream ids carved out of `ModelConfig::seed`.
pub(crate) const STREAM_INIT: u64 = 1;
pub(crate) const STREAM_TRIPLETS: u64 = 2;

/// The map applied after the dense head.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Projection {
    Manifold(ManifoldKind),
    /// No constraint: the head output is the embedding.
    Identity {
        dim: usize,
    },
}

impl Projection {
    pub fn head_dim(&self) -> usize {
        match self {
            Projection::Manifold(kind) => kind.input_arity(),
            Projection::Identity { dim } => *dim,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Projection::Manifold(kind) => kind.ambient_dim(),
            Projection::Identity { dim } => *dim,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Projection::Manifold(kind) => kind.name(),
            Projection::Identity { .. } => "unconstrained",
        }
    }

    pub fn manifold(&self) -> Option<&ManifoldKind> {
        match self {
            Projection::Manifold(kind) => Some(kind),
            Projection::Identity { .. } => None,
        }
    }

    pub fn apply(&self, head: &[f64]) -> Result<Vec<f64>> {
        match self {
            Projection::Manifold(kind) => manifolds::project(kind, head),
            Projection::Identity { .. } => Ok(head.to_vec()),
        }
    }

    pub fn backward(&self, head: &[f64], upstream: &[f64]) -> Result<Vec<f64>> {
        match self {
            Projection::Manifold(kind) => manifolds::project_backward(kind, head, upstream),
            Projection::Identity { .. } => Ok(upstream.to_vec()),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Projection::Manifold(kind) => kind.validate(),
            Projection::Identity { dim: 0 } => Err(Error::Config(
                "unconstrained head dimension must be positive".into(),
            )),
            Projection::Identity { .. } => Ok(()),
        }
    }
}

impl From<ManifoldKind> for Projection {
    fn from(kind: ManifoldKind) -> Self {
        Projection::Manifold(kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub vocab_size: usize,
    pub d_embed: usize,
    pub projection: Projection,
    /// Triplet margin α.
    pub margin: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Triplets per optimizer step (N).
    pub batch_size: usize,
    /// `None` means 20 × the number of training documents.
    pub triplets_per_epoch: Option<usize>,
    pub seed: u64,
    pub max_len: usize,
}

impl ModelConfig {
    pub const DEFAULT_D_EMBED: usize = 64;
    pub const DEFAULT_MARGIN: f64 = 0.2;
    pub const DEFAULT_LEARNING_RATE: f64 = 1e-3;
    pub const DEFAULT_EPOCHS: usize = 20;
    pub const DEFAULT_BATCH_SIZE: usize = 128;
    pub const DEFAULT_TRIPLETS_PER_DOC: usize = 20;
    pub const DEFAULT_MAX_LEN: usize = 64;

    pub fn new(vocab_size: usize, projection: impl Into<Projection>) -> Self {
        ModelConfig {
            vocab_size,
            d_embed: Self::DEFAULT_D_EMBED,
            projection: projection.into(),
            margin: Self::DEFAULT_MARGIN,
            learning_rate: Self::DEFAULT_LEARNING_RATE,
            epochs: Self::DEFAULT_EPOCHS,
            batch_size: Self::DEFAULT_BATCH_SIZE,
            triplets_per_epoch: None,
            seed: 42,
            max_len: Self::DEFAULT_MAX_LEN,
        }
    }

    pub fn d_head(&self) -> usize {
        self.projection.head_dim()
    }

    pub fn triplets_for(&self, corpus_size: usize) -> usize {
        self.triplets_per_epoch
            .unwrap_or(Self::DEFAULT_TRIPLETS_PER_DOC * corpus_size)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.vocab_size < 3 {
            return fail(format!(
                "vocabulary size must be at least 3, got {}",
                self.vocab_size
            ));
        }
        if self.d_embed == 0 {
            return fail("embedding width must be positive".into());
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return fail(format!("margin must be non-negative, got {}", self.margin));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if self.batch_size == 0 {
            return fail("batch size must be positive".into());
        }
        if self.max_len == 0 {
            return fail("max_len must be positive".into());
        }
        self.projection.validate()
    }
}

/// Intermediate values of one forward pass, kept for backpropagation.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub pooled: Vec<f64>,
    pub head: Vec<f64>,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    embeddings: Matrix,
    weights: Matrix,
    bias: Matrix,
    config: ModelConfig,
}

impl EmbeddingModel {
    /// Random initialization from `config.seed`: embedding entries uniform
    /// in ±0.05 (PAD row zero), head weights uniform in ±√(3 / d_embed),
    /// bias zero.
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = SeededRng::with_stream(config.seed, STREAM_INIT);
        let (v, d, k) = (config.vocab_size, config.d_embed, config.d_head());
        let mut embeddings = Matrix::zeros(v, d);
        for x in &mut embeddings.as_mut_slice()[d..] {
            *x = rng.uniform_in(-0.05, 0.05);
        }
        let limit = (3.0 / d as f64).sqrt();
        let mut weights = Matrix::zeros(d, k);
        for x in weights.as_mut_slice() {
            *x = rng.uniform_in(-limit, limit);
        }
        Ok(EmbeddingModel {
            embeddings,
            weights,
            bias: Matrix::zeros(1, k),
            config,
        })
    }

    /// Assembles a model from explicit parameters, checking shapes against
    /// the config.
    pub fn from_parts(
        config: ModelConfig,
        embeddings: Matrix,
        weights: Matrix,
        bias: Matrix,
    ) -> Result<Self> {
        config.validate()?;
        let (v, d, k) = (config.vocab_size, config.d_embed, config.d_head());
        for (found, expected) in [
            (embeddings.shape(), (v, d)),
            (weights.shape(), (d, k)),
            (bias.shape(), (1, k)),
        ] {
            if found != expected {
                return Err(Error::Shape {
                    op: "EmbeddingModel::from_parts",
                    left: found,
                    right: expected,
                });
            }
        }
        for m in [&embeddings, &weights, &bias] {
            m.ensure_finite("EmbeddingModel::from_parts")?;
        }
        Ok(EmbeddingModel {
            embeddings,
            weights,
            bias,
            config,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn embeddings(&self) -> &Matrix {
        &self.embeddings
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn bias(&self) -> &Matrix {
        &self.bias
    }

    pub fn into_parts(self) -> (ModelConfig, Matrix, Matrix, Matrix) {
        (self.config, self.embeddings, self.weights, self.bias)
    }

    pub(crate) fn params_mut(&mut self) -> [&mut Matrix; 3] {
        [&mut self.embeddings, &mut self.weights, &mut self.bias]
    }

    pub(crate) fn zero_pad_row(&mut self) {
        self.embeddings.row_mut(PAD_ID).fill(0.0);
    }

    pub fn forward_trace(&self, doc: &TokenizedDoc) -> Result<ForwardTrace> {
        let d = self.config.d_embed;
        let mut pooled = vec![0.0; d];
        for &id in doc.ids() {
            if id >= self.config.vocab_size {
                return Err(Error::Config(format!(
                    "token id {id} outside vocabulary of size {}",
                    self.config.vocab_size
                )));
            }
            for (p, e) in pooled.iter_mut().zip(self.embeddings.row(id)) {
                *p += e;
            }
        }
        let inv = 1.0 / doc.len().max(1) as f64;
        pooled.iter_mut().for_each(|p| *p *= inv);

        let k = self.config.d_head();
        let mut head = self.bias.as_slice().to_vec();
        for (i, &p) in pooled.iter().enumerate() {
            for (h, w) in head.iter_mut().zip(self.weights.row(i)) {
                *h += p * w;
            }
        }
        debug_assert_eq!(head.len(), k);
        let point = self.config.projection.apply(&head)?;
        Ok(ForwardTrace {
            pooled,
            head,
            point,
        })
    }

    pub fn forward(&self, doc: &TokenizedDoc) -> Result<Vec<f64>> {
        Ok(self.forward_trace(doc)?.point)
    }
}

/// Embeds every document; row `i` is the forward pass of document `i`.
pub fn embed_corpus(
    model: &EmbeddingModel,
    corpus: &LabeledCorpus,
    vocab: &Vocabulary,
) -> Result<(Matrix, Vec<usize>)> {
    use rayon::prelude::*;
    let max_len = model.config.max_len;
    let rows = corpus
        .documents()
        .par_iter()
        .map(|doc| model.forward(&encode(doc, vocab, max_len)))
        .collect::<Result<Vec<_>>>()?;
    let points = if rows.is_empty() {
        Matrix::zeros(0, model.config.projection.ambient_dim())
    } else {
        Matrix::from_rows(&rows)?
    };
    Ok((points, corpus.labels()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_vocabulary, Document};
    use crate::manifolds::on_manifold;

    fn tiny_config() -> ModelConfig {
        let mut c = ModelConfig::new(6, ManifoldKind::sphere(3));
        c.d_embed = 3;
        c
    }

    fn doc(ids: &[usize]) -> TokenizedDoc {
        // build through encode so the type's invariants hold
        let vocab = Vocabulary::from_tokens(
            ["<pad>", "<unk>", "a", "b", "c", "d"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        )
        .unwrap();
        let text: Vec<&str> = ids.iter().map(|&i| vocab.token(i).unwrap()).collect();
        let text = if ids == [PAD_ID] {
            String::new()
        } else {
            text.join(" ")
        };
        encode(
            &Document {
                id: 0,
                text,
                label: 0,
            },
            &vocab,
            16,
        )
    }

    #[test]
    fn single_token_with_identity_head_is_normalized_row() {
        let base = EmbeddingModel::new(tiny_config()).unwrap();
        let (config, e, _, b) = base.into_parts();
        let model = EmbeddingModel::from_parts(config, e.clone(), Matrix::identity(3), b).unwrap();
        let out = model.forward(&doc(&[3])).unwrap();
        let expected = crate::numcore::l2_normalize(e.row(3)).unwrap();
        for (a, b) in out.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let repeated = model.forward(&doc(&[3, 3, 3, 3])).unwrap();
        for (a, b) in out.iter().zip(&repeated) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn pad_only_doc_with_bias() {
        let base = EmbeddingModel::new(tiny_config()).unwrap();
        let (config, e, w, _) = base.into_parts();
        let bias = Matrix::row_vector(&[1.0, 0.0, 0.0]).unwrap();
        let model = EmbeddingModel::from_parts(config, e, w, bias).unwrap();
        assert_eq!(model.forward(&doc(&[PAD_ID])).unwrap(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn init_is_seeded_and_pad_row_zero() {
        let a = EmbeddingModel::new(tiny_config()).unwrap();
        let b = EmbeddingModel::new(tiny_config()).unwrap();
        assert_eq!(a, b);
        assert!(a.embeddings().row(PAD_ID).iter().all(|&x| x == 0.0));
        assert!(a.embeddings().as_slice()[3..]
            .iter()
            .all(|x| x.abs() <= 0.05));
        let mut other = tiny_config();
        other.seed = 7;
        assert_ne!(EmbeddingModel::new(other).unwrap(), a);
    }

    #[test]
    fn config_validation() {
        let mut c = tiny_config();
        c.margin = -0.1;
        assert!(c.validate().is_err());
        let mut c = tiny_config();
        c.learning_rate = 0.0;
        assert!(c.validate().is_err());
        let c = ModelConfig::new(
            10,
            ManifoldKind::TorusEmbedded {
                major: 1.0,
                minor: 1.0,
            },
        );
        assert!(matches!(c.validate(), Err(Error::Geometry(_))));
        assert_eq!(ModelConfig::new(10, ManifoldKind::MobiusFlat).d_head(), 3);
        assert_eq!(
            ModelConfig::new(10, ManifoldKind::MobiusEmbedded).d_head(),
            2
        );
    }

    #[test]
    fn out_of_range_token_is_rejected() {
        let model = EmbeddingModel::new(tiny_config()).unwrap();
        let big = ModelConfig::new(50, ManifoldKind::sphere(3));
        let other = EmbeddingModel::new(big).unwrap();
        let vocab = build_vocabulary(
            &LabeledCorpus::from_texts((0..40).map(|i| (format!("w{i}"), 0)), vec!["x".into()])
                .unwrap(),
            50,
            1,
        );
        let d = encode(
            &Document {
                id: 0,
                text: "w39".into(),
                label: 0,
            },
            &vocab,
            4,
        );
        assert!(other.forward(&d).is_ok());
        assert!(model.forward(&d).is_err());
    }

    #[test]
    fn embed_corpus_rows_are_on_manifold_and_permute() {
        let corpus = LabeledCorpus::from_texts(
            [("a b", 0), ("c d", 1), ("a zz", 0), ("zz", 1)],
            vec!["x".into(), "y".into()],
        )
        .unwrap();
        let vocab = build_vocabulary(&corpus, 10, 1);
        for kind in [
            ManifoldKind::sphere(3),
            ManifoldKind::torus_embedded(),
            ManifoldKind::MobiusEmbedded,
        ] {
            let mut config = ModelConfig::new(vocab.len(), kind);
            config.d_embed = 8;
            let model = EmbeddingModel::new(config).unwrap();
            let (points, labels) = embed_corpus(&model, &corpus, &vocab).unwrap();
            assert_eq!(points.rows(), 4);
            assert_eq!(labels, vec![0, 1, 0, 1]);
            for r in points.row_iter() {
                assert!(on_manifold(&kind, r, 1e-9).unwrap());
            }
            let reversed = corpus.subset(&[3, 2, 1, 0]);
            let (rev, _) = embed_corpus(&model, &reversed, &vocab).unwrap();
            for i in 0..4 {
                assert_eq!(rev.row(i), points.row(3 - i));
            }
            let single = corpus.subset(&[1]);
            let (one, _) = embed_corpus(&model, &single, &vocab).unwrap();
            assert_eq!(one.row(0), points.row(1));
        }
    }
}
