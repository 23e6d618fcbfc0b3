//! Labeled text corpora: loading, tokenization, vocabulary, splitting and
//! class-aware triplet sampling.

mod loaders;
mod split;
pub mod synthetic;
mod text;
mod triplets;

pub(crate) use loaders::open as open_input;
pub use loaders::{load_ag_news_csv, load_mbti_csv, LoadOptions, AG_NEWS_LABELS, MBTI_TYPES};
pub use split::stratified_split;
pub use text::{build_vocabulary, encode, tokenize, TokenizedDoc, Vocabulary, PAD_ID, UNK_ID};
pub use triplets::{sample_triplets, Triplet, TripletSampler};

use crate::error::{Error, Result};

/// One labeled document. `id` is its ordinal in the corpus it was loaded
/// into; subsets keep the parent's ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: usize,
    pub text: String,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCorpus {
    documents: Vec<Document>,
    label_names: Vec<String>,
}

impl LabeledCorpus {
    pub fn new(documents: Vec<Document>, label_names: Vec<String>) -> Result<Self> {
        if let Some(doc) = documents.iter().find(|d| d.label >= label_names.len()) {
            return Err(Error::Config(format!(
                "document {} has label {} but only {} classes are named",
                doc.id,
                doc.label,
                label_names.len()
            )));
        }
        Ok(LabeledCorpus {
            documents,
            label_names,
        })
    }

    /// Builds a corpus from `(text, label)` pairs, assigning ordinal ids.
    pub fn from_texts<S: Into<String>>(
        texts: impl IntoIterator<Item = (S, usize)>,
        label_names: Vec<String>,
    ) -> Result<Self> {
        let documents = texts
            .into_iter()
            .enumerate()
            .map(|(id, (text, label))| Document {
                id,
                text: text.into(),
                label,
            })
            .collect();
        LabeledCorpus::new(documents, label_names)
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.label_names.len()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.documents.iter().map(|d| d.label).collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.label_names.len()];
        for d in &self.documents {
            counts[d.label] += 1;
        }
        counts
    }

    /// Documents at the given positions, in that order; ids and label table
    /// are preserved.
    pub fn subset(&self, positions: &[usize]) -> LabeledCorpus {
        LabeledCorpus {
            documents: positions
                .iter()
                .map(|&i| self.documents[i].clone())
                .collect(),
            label_names: self.label_names.clone(),
        }
    }
}
