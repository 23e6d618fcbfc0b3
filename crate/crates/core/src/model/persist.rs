use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EmbeddingModel, ModelConfig};
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::numcore::Matrix;

pub const FORMAT_VERSION: u64 = 1;

/// Everything needed to embed new text: parameters, vocabulary and the
/// label table of the training corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedModel {
    pub model: EmbeddingModel,
    pub vocab: Vocabulary,
    pub label_names: Vec<String>,
}

// Floats are written by serde_json in shortest round-trip form and parsed
// back with the `float_roundtrip` feature, so parameters survive bit-exact.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u64,
    config: ModelConfig,
    label_names: Vec<String>,
    vocab: Vec<String>,
    #[serde(rename = "E")]
    embeddings: Vec<Vec<f64>>,
    #[serde(rename = "W")]
    weights: Vec<Vec<f64>>,
    #[serde(rename = "b")]
    bias: Vec<Vec<f64>>,
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(<[f64]>::to_vec).collect()
}

pub fn save_model(saved: &SavedModel, path: impl AsRef<Path>) -> Result<()> {
    let model = &saved.model;
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        config: model.config().clone(),
        label_names: saved.label_names.clone(),
        vocab: saved.vocab.tokens().to_vec(),
        embeddings: rows_of(model.embeddings()),
        weights: rows_of(model.weights()),
        bias: rows_of(model.bias()),
    };
    let bytes = serde_json::to_vec(&file).expect("model file serializes");
    write_atomic(path, &bytes)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SavedModel> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let malformed = |message: String| Error::MalformedModel {
        path: path.to_path_buf(),
        message,
    };
    let value: serde_json::Value =
        serde_json::from_slice(&bytes).map_err(|e| malformed(e.to_string()))?;
    let version = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| malformed("missing integer field `format_version`".into()))?;
    if version != FORMAT_VERSION {
        return Err(Error::ModelVersion {
            path: path.to_path_buf(),
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let file: ModelFile = serde_json::from_value(value).map_err(|e| malformed(e.to_string()))?;
    let config = file.config;
    config.validate()?;

    let vocab = Vocabulary::from_tokens(file.vocab).ok_or_else(|| {
        malformed("vocabulary must start with <pad>, <unk> and have unique tokens".into())
    })?;
    if vocab.len() != config.vocab_size {
        return Err(malformed(format!(
            "vocabulary has {} tokens, config says {}",
            vocab.len(),
            config.vocab_size
        )));
    }

    let (v, d, k) = (config.vocab_size, config.d_embed, config.d_head());
    let to_matrix = |tensor: &'static str, rows: Vec<Vec<f64>>, expected: (usize, usize)| {
        let found = (rows.len(), rows.first().map_or(0, Vec::len));
        if found != expected || rows.iter().any(|r| r.len() != expected.1) {
            return Err(Error::ModelShape {
                path: path.to_path_buf(),
                tensor,
                found,
                expected,
            });
        }
        Matrix::from_rows(&rows)
    };
    let embeddings = to_matrix("E", file.embeddings, (v, d))?;
    let weights = to_matrix("W", file.weights, (d, k))?;
    let bias = to_matrix("b", file.bias, (1, k))?;
    let model = EmbeddingModel::from_parts(config, embeddings, weights, bias)?;
    Ok(SavedModel {
        model,
        vocab,
        label_names: file.label_names,
    })
}
