use std::collections::HashMap;

use super::{Document, LabeledCorpus};

pub const PAD_ID: usize = 0;
pub const UNK_ID: usize = 1;
const PAD_TOKEN: &str = "<pad>";
const UNK_TOKEN: &str = "<unk>";

/// Lowercases, drops whitespace-delimited words starting with `http`, then
/// splits the rest on every non-alphanumeric character.
pub fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    lower
        .split_whitespace()
        .filter(|word| !word.starts_with("http"))
        .flat_map(|word| word.split(|c: char| !c.is_alphanumeric()))
        .filter(|t| !t.is_empty() && !t.starts_with("http"))
        .map(str::to_owned)
        .collect()
}

/// Token ↔ id table. Ids are dense; `0` is padding and `1` is unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    token_to_id: HashMap<String, usize>,
    id_to_token: Vec<String>,
    frequencies: Vec<u64>,
}

impl Vocabulary {
    /// Rebuilds a vocabulary from its tokens in id order (as persisted in a
    /// model file). The first two entries must be the special tokens.
    /// Frequencies are not persisted and read back as zero.
    pub fn from_tokens(tokens: Vec<String>) -> Option<Self> {
        if tokens.len() < 2 || tokens[PAD_ID] != PAD_TOKEN || tokens[UNK_ID] != UNK_TOKEN {
            return None;
        }
        let mut token_to_id = HashMap::with_capacity(tokens.len());
        for (id, t) in tokens.iter().enumerate().skip(2) {
            if token_to_id.insert(t.clone(), id).is_some() {
                return None;
            }
        }
        Some(Vocabulary {
            token_to_id,
            frequencies: vec![0; tokens.len()],
            id_to_token: tokens,
        })
    }

    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    /// Always false: the special tokens are present.
    pub fn is_empty(&self) -> bool {
        self.id_to_token.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.id_to_token.get(id).map(String::as_str)
    }

    pub fn frequency(&self, id: usize) -> u64 {
        self.frequencies.get(id).copied().unwrap_or(0)
    }

    /// All tokens in id order, specials included.
    pub fn tokens(&self) -> &[String] {
        &self.id_to_token
    }
}

/// Keeps the `max_size - 2` most frequent tokens with count ≥ `min_count`;
/// equal counts are ordered lexicographically.
pub fn build_vocabulary(corpus: &LabeledCorpus, max_size: usize, min_count: u64) -> Vocabulary {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for doc in corpus.documents() {
        for t in tokenize(&doc.text) {
            *counts.entry(t).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(String, u64)> = counts
        .into_iter()
        .filter(|(_, c)| *c >= min_count.max(1))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(max_size.saturating_sub(2));

    let mut id_to_token = vec![PAD_TOKEN.to_string(), UNK_TOKEN.to_string()];
    let mut frequencies = vec![0, 0];
    let mut token_to_id = HashMap::with_capacity(ranked.len());
    for (token, count) in ranked {
        token_to_id.insert(token.clone(), id_to_token.len());
        id_to_token.push(token);
        frequencies.push(count);
    }
    Vocabulary {
        token_to_id,
        id_to_token,
        frequencies,
    }
}

/// Vocabulary ids for one document: never empty, at most `max_len` long.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDoc(Vec<usize>);

impl TokenizedDoc {
    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Tokenizes, maps out-of-vocabulary tokens to UNK, truncates to `max_len`
/// and substitutes `[PAD]` for an empty result.
pub fn encode(doc: &Document, vocab: &Vocabulary, max_len: usize) -> TokenizedDoc {
    let mut ids: Vec<usize> = tokenize(&doc.text)
        .iter()
        .take(max_len.max(1))
        .map(|t| vocab.id(t).unwrap_or(UNK_ID))
        .collect();
    if ids.is_empty() {
        ids.push(PAD_ID);
    }
    TokenizedDoc(ids)
}
