use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{argmax, check_fit, check_predict};
use crate::error::{Error, Result};
use crate::numcore::Matrix;

/// Rows per parallel work unit. Fixed so partial sums are always combined
/// in the same order, whatever the thread count.
const CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2_strength: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            learning_rate: 0.1,
            epochs: 300,
            l2_strength: 1e-4,
        }
    }
}

impl LogisticConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "logistic learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.l2_strength >= 0.0 && self.l2_strength.is_finite()) {
            return Err(Error::Config(format!(
                "logistic l2 strength must be non-negative, got {}",
                self.l2_strength
            )));
        }
        Ok(())
    }
}

/// Rows stored as (column, value) pairs with zeros dropped. Dense
/// embeddings simply keep every entry; TF-IDF rows shrink to their support.
struct SparseRows {
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseRows {
    fn new(x: &Matrix) -> Self {
        SparseRows {
            rows: x
                .row_iter()
                .map(|r| {
                    r.iter()
                        .copied()
                        .enumerate()
                        .filter(|&(_, v)| v != 0.0)
                        .collect()
                })
                .collect(),
        }
    }
}

/// Multinomial softmax regression on standardized features.
///
/// Standardization is folded into the parameters: `scaled_weights` holds
/// `W / σ` per feature row and `offset` holds `b − μ·(W / σ)`, so raw rows
/// are scored directly and sparse inputs stay sparse.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticRegression {
    mean: Vec<f64>,
    inv_std: Vec<f64>,
    weights: Matrix,
    bias: Vec<f64>,
    scaled_weights: Matrix,
    offset: Vec<f64>,
}

impl LogisticRegression {
    pub fn num_classes(&self) -> usize {
        self.bias.len()
    }

    /// Weights acting on standardized features (`d × classes`).
    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    fn logits_row(&self, row: &[(usize, f64)]) -> Vec<f64> {
        logits(&self.scaled_weights, &self.offset, row)
    }

    pub fn predict_proba(&self, x: &Matrix) -> Result<Matrix> {
        check_predict(x, self.mean.len(), "predict_proba")?;
        let sparse = SparseRows::new(x);
        let k = self.num_classes();
        let data: Vec<f64> = sparse
            .rows
            .par_iter()
            .flat_map_iter(|r| softmax(&self.logits_row(r)))
            .collect();
        Matrix::from_vec(x.rows(), k, data)
    }
}

fn logits(scaled_weights: &Matrix, offset: &[f64], row: &[(usize, f64)]) -> Vec<f64> {
    let mut z = offset.to_vec();
    for &(j, v) in row {
        for (zc, w) in z.iter_mut().zip(scaled_weights.row(j)) {
            *zc += v * w;
        }
    }
    z
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}

fn moments(x: &Matrix) -> (Vec<f64>, Vec<f64>) {
    let (n, d) = x.shape();
    let mut mean = vec![0.0; d];
    for r in x.row_iter() {
        mean.iter_mut().zip(r).for_each(|(m, v)| *m += v);
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut var = vec![0.0; d];
    for r in x.row_iter() {
        for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    // constant features are switched off rather than divided by zero
    let inv_std = var
        .iter()
        .map(|s| {
            let sd = (s / n as f64).sqrt();
            if sd > 0.0 {
                1.0 / sd
            } else {
                0.0
            }
        })
        .collect();
    (mean, inv_std)
}

fn fold_parameters(
    weights: &Matrix,
    bias: &[f64],
    mean: &[f64],
    inv_std: &[f64],
) -> (Matrix, Vec<f64>) {
    let mut scaled = weights.clone();
    let mut offset = bias.to_vec();
    for j in 0..weights.rows() {
        let row = scaled.row_mut(j);
        for (o, w) in offset.iter_mut().zip(row.iter_mut()) {
            *w *= inv_std[j];
            *o -= mean[j] * *w;
        }
    }
    (scaled, offset)
}

/// Full-batch gradient descent on mean cross-entropy plus
/// `l2_strength / 2 · ‖W‖²` (bias unpenalized), starting from zero.
pub fn fit_logistic(
    x: &Matrix,
    y: &[usize],
    config: &LogisticConfig,
) -> Result<LogisticRegression> {
    config.validate()?;
    let k = check_fit(x, y, "fit_logistic")?;
    let (n, d) = x.shape();
    let (mean, inv_std) = moments(x);
    let sparse = SparseRows::new(x);
    let mut weights = Matrix::zeros(d, k);
    let mut bias = vec![0.0; k];
    let inv_n = 1.0 / n as f64;

    for _ in 0..config.epochs {
        let (scaled, offset) = fold_parameters(&weights, &bias, &mean, &inv_std);
        // per chunk: (Σ xᵢ ⊗ gᵢ over raw features, Σ gᵢ)
        let partials: Vec<(Vec<f64>, Vec<f64>)> = sparse
            .rows
            .par_chunks(CHUNK)
            .zip(y.par_chunks(CHUNK))
            .map(|(rows, labels)| {
                let mut xg = vec![0.0; d * k];
                let mut gsum = vec![0.0; k];
                for (r, &label) in rows.iter().zip(labels) {
                    let mut g = softmax(&logits(&scaled, &offset, r));
                    g[label] -= 1.0;
                    for (s, gc) in gsum.iter_mut().zip(&g) {
                        *s += gc;
                    }
                    for &(j, v) in r {
                        for (acc, gc) in xg[j * k..(j + 1) * k].iter_mut().zip(&g) {
                            *acc += v * gc;
                        }
                    }
                }
                (xg, gsum)
            })
            .collect();
        let mut xg = vec![0.0; d * k];
        let mut gsum = vec![0.0; k];
        for (pxg, pg) in &partials {
            xg.iter_mut().zip(pxg).for_each(|(a, b)| *a += b);
            gsum.iter_mut().zip(pg).for_each(|(a, b)| *a += b);
        }
        // ∂/∂W on standardized features: diag(1/σ)(XᵀG − μ ⊗ ΣG) / n
        for j in 0..d {
            let w = weights.row_mut(j);
            for c in 0..k {
                let grad = inv_std[j] * (xg[j * k + c] - mean[j] * gsum[c]) * inv_n
                    + config.l2_strength * w[c];
                w[c] -= config.learning_rate * grad;
            }
        }
        for (b, g) in bias.iter_mut().zip(&gsum) {
            *b -= config.learning_rate * g * inv_n;
        }
        if !weights.is_finite() || bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite { op: "fit_logistic" });
        }
    }
    let (scaled_weights, offset) = fold_parameters(&weights, &bias, &mean, &inv_std);
    Ok(LogisticRegression {
        mean,
        inv_std,
        weights,
        bias,
        scaled_weights,
        offset,
    })
}

/// Argmax of the logits; ties go to the lowest class index.
pub fn predict_logistic(model: &LogisticRegression, x: &Matrix) -> Result<Vec<usize>> {
    check_predict(x, model.mean.len(), "predict_logistic")?;
    let sparse = SparseRows::new(x);
    Ok(sparse
        .rows
        .par_iter()
        .map(|r| argmax(&model.logits_row(r)))
        .collect())
}
