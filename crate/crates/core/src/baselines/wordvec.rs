use std::collections::HashMap;
use std::hash::Hasher;
use std::io::{BufRead, BufReader};
use std::path::Path;

use fnv::FnvHasher;

use crate::corpus::{open_input, tokenize, Document, LabeledCorpus, Vocabulary};
use crate::error::{Error, Result};
use crate::numcore::{Matrix, SeededRng};

/// Word → vector map with a single dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct WordVectorTable {
    dim: usize,
    index: HashMap<String, usize>,
    values: Vec<f64>,
}

impl WordVectorTable {
    pub fn new(dim: usize) -> Self {
        WordVectorTable {
            dim,
            index: HashMap::new(),
            values: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Adds `word` unless it is already present. Returns whether it was added.
    pub fn insert(&mut self, word: &str, vector: &[f64]) -> Result<bool> {
        if vector.len() != self.dim {
            return Err(Error::Arity {
                kind: "word vector".into(),
                expected: self.dim,
                got: vector.len(),
            });
        }
        if self.index.contains_key(word) {
            return Ok(false);
        }
        self.index.insert(word.to_owned(), self.index.len());
        self.values.extend_from_slice(vector);
        Ok(true)
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index
            .get(word)
            .map(|&i| &self.values[i * self.dim..(i + 1) * self.dim])
    }
}

/// Reads the plain-text vector format: an optional `count dim` first line,
/// then `word v1 … v_dim` per line. A `.gz` suffix is decompressed.
pub fn load_word_vectors(path: impl AsRef<Path>) -> Result<WordVectorTable> {
    let path = path.as_ref();
    let reader = BufReader::new(open_input(path)?);
    let mut table: Option<WordVectorTable> = None;
    let mut values = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let row = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            row,
            message,
        };
        if row == 1 && fields.len() == 2 {
            if let (Ok(_), Ok(dim)) = (fields[0].parse::<usize>(), fields[1].parse::<usize>()) {
                if dim == 0 {
                    return Err(parse_err("header declares dimension 0".into()));
                }
                table = Some(WordVectorTable::new(dim));
                continue;
            }
        }
        let (word, numbers) = (fields[0], &fields[1..]);
        let table = table.get_or_insert_with(|| WordVectorTable::new(numbers.len()));
        if numbers.len() != table.dim || numbers.is_empty() {
            return Err(parse_err(format!(
                "expected {} numbers after {word:?}, found {}",
                table.dim,
                numbers.len()
            )));
        }
        values.clear();
        for n in numbers {
            let v: f64 = n
                .parse()
                .map_err(|_| parse_err(format!("cannot parse {n:?} as a number")))?;
            if !v.is_finite() {
                return Err(parse_err(format!("non-finite value {n:?}")));
            }
            values.push(v);
        }
        table.insert(word, &values)?;
    }
    table.ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        row: 1,
        message: "no word vectors found".into(),
    })
}

fn token_seed(token: &str, seed: u64) -> u64 {
    let mut h = FnvHasher::default();
    h.write(token.as_bytes());
    h.finish() ^ seed
}

/// Deterministic stand-in vectors for every non-special vocabulary token,
/// uniform in [−1, 1]. Each vector depends only on the token and `seed`.
pub fn hash_fallback_vectors(vocab: &Vocabulary, dim: usize, seed: u64) -> Result<WordVectorTable> {
    if dim == 0 {
        return Err(Error::Config(
            "word vector dimension must be positive".into(),
        ));
    }
    let mut table = WordVectorTable::new(dim);
    let mut buf = vec![0.0; dim];
    for token in &vocab.tokens()[2..] {
        let mut rng = SeededRng::new(token_seed(token, seed));
        buf.iter_mut().for_each(|x| *x = rng.uniform_in(-1.0, 1.0));
        table.insert(token, &buf)?;
    }
    Ok(table)
}

/// Mean of the table vectors of the document's tokens; zero if none is in
/// the table.
pub fn average_word_vectors(doc: &Document, table: &WordVectorTable) -> Vec<f64> {
    let mut sum = vec![0.0; table.dim()];
    let mut found = 0usize;
    for t in tokenize(&doc.text) {
        if let Some(v) = table.get(&t) {
            sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
            found += 1;
        }
    }
    if found > 0 {
        let inv = 1.0 / found as f64;
        sum.iter_mut().for_each(|s| *s *= inv);
    }
    sum
}

pub fn embed_word_vectors(corpus: &LabeledCorpus, table: &WordVectorTable) -> Result<Matrix> {
    let data: Vec<f64> = corpus
        .documents()
        .iter()
        .flat_map(|d| average_word_vectors(d, table))
        .collect();
    Matrix::from_vec(corpus.len(), table.dim(), data)
}
