use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{triplet_loss, triplet_loss_backward, EmbeddingModel, ForwardTrace, STREAM_TRIPLETS};
use crate::corpus::{encode, LabeledCorpus, TokenizedDoc, Triplet, TripletSampler, Vocabulary};
use crate::error::{Error, Result};
use crate::manifolds::on_manifold;
use crate::numcore::{Matrix, SeededRng};

const MEMBERSHIP_TOL: f64 = 1e-9;

/// Parameter-shaped gradient buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub embeddings: Matrix,
    pub weights: Matrix,
    pub bias: Matrix,
    touched_rows: Vec<usize>,
}

impl Gradients {
    pub fn zeros_like(model: &EmbeddingModel) -> Self {
        Gradients {
            embeddings: Matrix::zeros(model.embeddings.rows(), model.embeddings.cols()),
            weights: Matrix::zeros(model.weights.rows(), model.weights.cols()),
            bias: Matrix::zeros(1, model.bias.cols()),
            touched_rows: Vec::new(),
        }
    }

    fn clear(&mut self) {
        for &r in &self.touched_rows {
            self.embeddings.row_mut(r).fill(0.0);
        }
        self.touched_rows.clear();
        self.weights.as_mut_slice().fill(0.0);
        self.bias.as_mut_slice().fill(0.0);
    }

    fn scale(&mut self, factor: f64) {
        // touched_rows may repeat; scale each distinct row once
        self.touched_rows.sort_unstable();
        self.touched_rows.dedup();
        for &r in &self.touched_rows {
            self.embeddings
                .row_mut(r)
                .iter_mut()
                .for_each(|x| *x *= factor);
        }
        self.weights
            .as_mut_slice()
            .iter_mut()
            .for_each(|x| *x *= factor);
        self.bias
            .as_mut_slice()
            .iter_mut()
            .for_each(|x| *x *= factor);
    }

    fn is_finite(&self) -> bool {
        self.weights.is_finite()
            && self.bias.is_finite()
            && self
                .touched_rows
                .iter()
                .all(|&r| self.embeddings.row(r).iter().all(|x| x.is_finite()))
    }

    /// Accumulates the gradient of one branch given `∂L/∂point`.
    fn accumulate(
        &mut self,
        model: &EmbeddingModel,
        doc: &TokenizedDoc,
        trace: &ForwardTrace,
        upstream: &[f64],
    ) -> Result<()> {
        let g_head = model.config.projection.backward(&trace.head, upstream)?;
        for (b, g) in self.bias.as_mut_slice().iter_mut().zip(&g_head) {
            *b += g;
        }
        let k = g_head.len();
        let d = model.config.d_embed;
        let mut g_pooled = vec![0.0; d];
        for (i, g) in g_pooled.iter_mut().enumerate() {
            let w_row = model.weights.row(i);
            let dw_row = self.weights.row_mut(i);
            let mut acc = 0.0;
            for j in 0..k {
                dw_row[j] += trace.pooled[i] * g_head[j];
                acc += w_row[j] * g_head[j];
            }
            *g = acc;
        }
        let inv = 1.0 / doc.len() as f64;
        for &id in doc.ids() {
            for (e, g) in self.embeddings.row_mut(id).iter_mut().zip(&g_pooled) {
                *e += g * inv;
            }
            self.touched_rows.push(id);
        }
        Ok(())
    }
}

impl EmbeddingModel {
    /// Loss and parameter gradients for a single triplet of documents.
    pub fn triplet_gradients(
        &self,
        anchor: &TokenizedDoc,
        positive: &TokenizedDoc,
        negative: &TokenizedDoc,
    ) -> Result<(f64, Gradients)> {
        let mut grads = Gradients::zeros_like(self);
        let loss = self
            .accumulate_triplet(&mut grads, [anchor, positive, negative])?
            .0;
        Ok((loss, grads))
    }

    fn accumulate_triplet(
        &self,
        grads: &mut Gradients,
        docs: [&TokenizedDoc; 3],
    ) -> Result<(f64, bool, [ForwardTrace; 3])> {
        let traces = [
            self.forward_trace(docs[0])?,
            self.forward_trace(docs[1])?,
            self.forward_trace(docs[2])?,
        ];
        let margin = self.config.margin;
        let (a, p, n) = (&traces[0].point, &traces[1].point, &traces[2].point);
        let loss = triplet_loss(a, p, n, margin)?;
        let g = triplet_loss_backward(a, p, n, margin)?;
        if g.active {
            grads.accumulate(self, docs[0], &traces[0], &g.anchor)?;
            grads.accumulate(self, docs[1], &traces[1], &g.positive)?;
            grads.accumulate(self, docs[2], &traces[2], &g.negative)?;
        }
        Ok((loss, g.active, traces))
    }
}

/// Adaptive-moment optimizer state, one moment pair per parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub step: u64,
    first: [Matrix; 3],
    second: [Matrix; 3],
}

impl AdamState {
    pub fn new(model: &EmbeddingModel) -> Self {
        let zeros = || {
            [
                Matrix::zeros(model.embeddings.rows(), model.embeddings.cols()),
                Matrix::zeros(model.weights.rows(), model.weights.cols()),
                Matrix::zeros(1, model.bias.cols()),
            ]
        };
        AdamState {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            first: zeros(),
            second: zeros(),
        }
    }

    pub fn moment_shapes(&self) -> [(usize, usize); 3] {
        [
            self.first[0].shape(),
            self.first[1].shape(),
            self.first[2].shape(),
        ]
    }

    fn update(&mut self, model: &mut EmbeddingModel, grads: &Gradients, lr: f64) {
        self.step += 1;
        let t = self.step as i32;
        let correction1 = 1.0 - self.beta1.powi(t);
        let correction2 = 1.0 - self.beta2.powi(t);
        let (b1, b2, eps) = (self.beta1, self.beta2, self.epsilon);
        let grad_tensors = [&grads.embeddings, &grads.weights, &grads.bias];
        for (((param, g), m), v) in model
            .params_mut()
            .into_iter()
            .zip(grad_tensors)
            .zip(self.first.iter_mut())
            .zip(self.second.iter_mut())
        {
            let slices = param
                .as_mut_slice()
                .iter_mut()
                .zip(g.as_slice())
                .zip(m.as_mut_slice().iter_mut().zip(v.as_mut_slice().iter_mut()));
            for ((p, &gi), (mi, vi)) in slices {
                *mi = b1 * *mi + (1.0 - b1) * gi;
                *vi = b2 * *vi + (1.0 - b2) * gi * gi;
                let m_hat = *mi / correction1;
                let v_hat = *vi / correction2;
                *p -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub mean_loss: f64,
    /// Fraction of triplets with a strictly positive hinge.
    pub active_fraction: f64,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainStats {
    pub epochs: Vec<EpochStats>,
    /// Forward outputs checked against the manifold during training.
    pub points_checked: u64,
    pub membership_violations: u64,
}

/// Runs the triplet training loop.
///
/// Each epoch draws `triplets_for(n)` triplets in batches of `batch_size`;
/// per batch the gradients are summed in triplet order, scaled by
/// `1 / batch`, applied with one Adam step, and the PAD row is re-zeroed.
#[derive(Debug, Clone)]
pub struct Trainer {
    state: AdamState,
    check_membership: bool,
}

impl Trainer {
    pub fn new(model: &EmbeddingModel) -> Self {
        Trainer {
            state: AdamState::new(model),
            check_membership: false,
        }
    }

    /// Verify every forward output lies on the manifold (tolerance 1e-9),
    /// counting violations in [`TrainStats`].
    pub fn check_membership(mut self, on: bool) -> Self {
        self.check_membership = on;
        self
    }

    pub fn state(&self) -> &AdamState {
        &self.state
    }

    pub fn fit(
        &mut self,
        model: &mut EmbeddingModel,
        docs: &[TokenizedDoc],
        labels: &[usize],
        mut on_epoch: impl FnMut(&EpochStats),
    ) -> Result<TrainStats> {
        if docs.len() != labels.len() {
            return Err(Error::Shape {
                op: "Trainer::fit",
                left: (docs.len(), 1),
                right: (labels.len(), 1),
            });
        }
        let config = model.config.clone();
        let sampler = TripletSampler::new(labels)?;
        let mut rng = SeededRng::with_stream(config.seed, STREAM_TRIPLETS);
        let per_epoch = config.triplets_for(docs.len());
        let mut grads = Gradients::zeros_like(model);
        let mut stats = TrainStats::default();

        for epoch in 0..config.epochs {
            let started = Instant::now();
            let mut loss_sum = 0.0;
            let mut active = 0usize;
            let mut drawn = 0usize;
            let mut batch_index = 0;
            while drawn < per_epoch {
                let size = config.batch_size.min(per_epoch - drawn);
                let batch = sampler.sample(size, &mut rng);
                grads.clear();
                for t in &batch {
                    let (loss, was_active, traces) = model
                        .accumulate_triplet(
                            &mut grads,
                            [&docs[t.anchor], &docs[t.positive], &docs[t.negative]],
                        )
                        .map_err(|e| diverged(epoch, batch_index, t, e.to_string()))?;
                    if !loss.is_finite() {
                        return Err(diverged(epoch, batch_index, t, format!("loss {loss}")));
                    }
                    if self.check_membership {
                        self.count_membership(model, &traces, &mut stats)?;
                    }
                    loss_sum += loss;
                    active += was_active as usize;
                }
                grads.scale(1.0 / size as f64);
                if !grads.is_finite() {
                    return Err(diverged(
                        epoch,
                        batch_index,
                        &batch[0],
                        "non-finite gradient".into(),
                    ));
                }
                self.state.update(model, &grads, config.learning_rate);
                model.zero_pad_row();
                drawn += size;
                batch_index += 1;
            }
            let entry = EpochStats {
                epoch,
                mean_loss: if drawn == 0 {
                    0.0
                } else {
                    loss_sum / drawn as f64
                },
                active_fraction: if drawn == 0 {
                    0.0
                } else {
                    active as f64 / drawn as f64
                },
                wall_time_secs: started.elapsed().as_secs_f64(),
            };
            on_epoch(&entry);
            stats.epochs.push(entry);
        }
        Ok(stats)
    }

    fn count_membership(
        &self,
        model: &EmbeddingModel,
        traces: &[ForwardTrace; 3],
        stats: &mut TrainStats,
    ) -> Result<()> {
        if let Some(kind) = model.config.projection.manifold() {
            for t in traces {
                stats.points_checked += 1;
                if !on_manifold(kind, &t.point, MEMBERSHIP_TOL)? {
                    stats.membership_violations += 1;
                }
            }
        }
        Ok(())
    }
}

fn diverged(epoch: usize, batch: usize, t: &Triplet, message: String) -> Error {
    Error::Diverged {
        epoch,
        batch,
        triplet: (t.anchor, t.positive, t.negative),
        message,
    }
}

/// Encodes the corpus with the model's `max_len` and trains with default
/// trainer settings.
pub fn train(
    model: &mut EmbeddingModel,
    corpus: &LabeledCorpus,
    vocab: &Vocabulary,
) -> Result<TrainStats> {
    let max_len = model.config.max_len;
    let docs: Vec<TokenizedDoc> = corpus
        .documents()
        .iter()
        .map(|d| encode(d, vocab, max_len))
        .collect();
    Trainer::new(model).fit(model, &docs, &corpus.labels(), |_| {})
}
