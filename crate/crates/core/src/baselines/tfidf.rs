use rayon::prelude::*;

use crate::corpus::{tokenize, Document, LabeledCorpus, Vocabulary};
use crate::error::Result;
use crate::numcore::Matrix;

/// Number of non-special vocabulary entries; TF-IDF column `j` is token id
/// `j + 2`.
const SPECIALS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct TfidfModel {
    vocab: Vocabulary,
    /// Indexed by token id; the two special entries are unused.
    idf: Vec<f64>,
}

impl TfidfModel {
    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Output width: one column per non-special vocabulary token.
    pub fn width(&self) -> usize {
        self.vocab.len().saturating_sub(SPECIALS)
    }

    pub fn idf(&self, token: &str) -> Option<f64> {
        self.vocab
            .id(token)
            .filter(|&id| id >= SPECIALS)
            .map(|id| self.idf[id])
    }

    pub fn transform(&self, doc: &Document) -> Vec<f64> {
        let mut row = vec![0.0; self.width()];
        for t in tokenize(&doc.text) {
            if let Some(id) = self.vocab.id(&t).filter(|&id| id >= SPECIALS) {
                row[id - SPECIALS] += 1.0;
            }
        }
        let mut norm_sq = 0.0;
        for (j, x) in row.iter_mut().enumerate() {
            *x *= self.idf[j + SPECIALS];
            norm_sq += *x * *x;
        }
        if norm_sq > 0.0 {
            let inv = 1.0 / norm_sq.sqrt();
            row.iter_mut().for_each(|x| *x *= inv);
        }
        row
    }

    /// Dense `documents × width` matrix, rows in corpus order.
    pub fn transform_corpus(&self, corpus: &LabeledCorpus) -> Result<Matrix> {
        let width = self.width();
        let rows: Vec<Vec<f64>> = corpus
            .documents()
            .par_iter()
            .map(|d| self.transform(d))
            .collect();
        Matrix::from_vec(rows.len(), width, rows.concat())
    }
}

/// `idf(t) = ln((1 + N) / (1 + df(t))) + 1` with `df` the number of
/// documents of `corpus` containing `t`.
pub fn fit_tfidf(corpus: &LabeledCorpus, vocab: &Vocabulary) -> TfidfModel {
    let mut df = vec![0usize; vocab.len()];
    let mut seen = vec![usize::MAX; vocab.len()];
    for (i, doc) in corpus.documents().iter().enumerate() {
        for t in tokenize(&doc.text) {
            if let Some(id) = vocab.id(&t) {
                if seen[id] != i {
                    seen[id] = i;
                    df[id] += 1;
                }
            }
        }
    }
    let n = corpus.len() as f64;
    let idf = df
        .iter()
        .enumerate()
        .map(|(id, &d)| {
            if id < SPECIALS {
                0.0
            } else {
                ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0
            }
        })
        .collect();
    TfidfModel {
        vocab: vocab.clone(),
        idf,
    }
}

pub fn transform_tfidf(model: &TfidfModel, doc: &Document) -> Vec<f64> {
    model.transform(doc)
}
