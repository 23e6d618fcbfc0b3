use std::hash::Hasher;
use std::time::Instant;

use fnv::FnvHasher;
use serde::{Deserialize, Serialize};

use super::config::{DatasetFormat, Method, RunConfig};
use crate::baselines::{
    embed_word_vectors, fit_tfidf, hash_fallback_vectors, load_word_vectors, unconstrained_model,
    TfidfModel, UnconstrainedMode, WordVectorTable,
};
use crate::corpus::{
    build_vocabulary, encode, load_ag_news_csv, load_mbti_csv, stratified_split, LabeledCorpus,
    LoadOptions, TokenizedDoc, Vocabulary,
};
use crate::error::{Error, Result};
use crate::eval::{evaluate_embedding, ClassifierConfig, EvalReport};
use crate::manifolds::ManifoldKind;
use crate::model::{embed_corpus, EmbeddingModel, EpochStats, TrainStats, Trainer};
use crate::numcore::{Matrix, SeededRng};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitInfo {
    pub train_n: usize,
    pub test_n: usize,
    pub seed: u64,
    /// FNV-1a over the train ids, a separator, then the test ids.
    pub hash: String,
}

/// Loaded rows, their shared train/test split and the training vocabulary.
pub struct Prepared {
    pub format: DatasetFormat,
    /// Every loaded row, in file order.
    pub corpus: LabeledCorpus,
    pub train: LabeledCorpus,
    pub test: LabeledCorpus,
    pub vocab: Vocabulary,
    pub split: SplitInfo,
    pub warnings: Vec<String>,
}

fn split_hash(train: &LabeledCorpus, test: &LabeledCorpus) -> String {
    let mut h = FnvHasher::default();
    for d in train.documents() {
        h.write_u64(d.id as u64);
    }
    h.write_u64(u64::MAX);
    for d in test.documents() {
        h.write_u64(d.id as u64);
    }
    format!("{:016x}", h.finish())
}

pub fn prepare(config: &RunConfig) -> Result<Prepared> {
    let format = config.format()?;
    let path = config.data_path()?;
    let (train_n, test_n) = config.sizes()?;
    let wanted = train_n + test_n;
    let opts = if config.dataset.balanced.unwrap_or(true) {
        LoadOptions::balanced(wanted)
    } else {
        LoadOptions::max_rows(wanted)
    };
    let corpus = match format {
        DatasetFormat::Agnews => load_ag_news_csv(path, &opts)?,
        DatasetFormat::Mbti => load_mbti_csv(path, &opts)?,
    };
    let mut warnings = Vec::new();
    if corpus.len() < wanted {
        warnings.push(format!(
            "requested {wanted} rows but only {} were loaded",
            corpus.len()
        ));
    }
    if corpus.len() < 4 {
        return Err(Error::Config(format!(
            "{}: only {} usable rows",
            path.display(),
            corpus.len()
        )));
    }
    let fraction = test_n as f64 / wanted as f64;
    let (train, test) = stratified_split(&corpus, fraction, &mut SeededRng::new(config.seed))?;
    let vocab = build_vocabulary(&train, config.vocab.max_size, config.vocab.min_count);
    let split = SplitInfo {
        train_n: train.len(),
        test_n: test.len(),
        seed: config.seed,
        hash: split_hash(&train, &test),
    };
    Ok(Prepared {
        format,
        corpus,
        train,
        test,
        vocab,
        split,
        warnings,
    })
}

/// A fitted document → vector map.
pub enum Embedder {
    Network {
        model: EmbeddingModel,
        vocab: Vocabulary,
    },
    Tfidf(TfidfModel),
    WordVectors(WordVectorTable),
}

impl Embedder {
    pub fn embed(&self, corpus: &LabeledCorpus) -> Result<Matrix> {
        match self {
            Embedder::Network { model, vocab } => Ok(embed_corpus(model, corpus, vocab)?.0),
            Embedder::Tfidf(m) => m.transform_corpus(corpus),
            Embedder::WordVectors(t) => embed_word_vectors(corpus, t),
        }
    }
}

pub struct Fitted {
    pub embedder: Embedder,
    pub notes: Vec<String>,
    pub train_stats: Option<TrainStats>,
}

fn encode_all(corpus: &LabeledCorpus, vocab: &Vocabulary, max_len: usize) -> Vec<TokenizedDoc> {
    corpus
        .documents()
        .iter()
        .map(|d| encode(d, vocab, max_len))
        .collect()
}

/// Fits `method` on the training split. Manifold models report each epoch
/// through `on_epoch` and have every training point checked for manifold
/// membership.
pub fn fit_method(
    method: Method,
    prepared: &Prepared,
    config: &RunConfig,
    mut on_epoch: impl FnMut(&EpochStats),
) -> Result<Fitted> {
    let seed = method.seed(config.seed);
    let vocab = &prepared.vocab;
    let mut notes = Vec::new();
    let mut train_stats = None;
    let embedder = if let Some(kind) = method.manifold(config.model.sphere_dim) {
        let model_config = config.model_config(vocab.len(), kind.into(), seed)?;
        let mut model = EmbeddingModel::new(model_config)?;
        let docs = encode_all(&prepared.train, vocab, model.config().max_len);
        let stats = Trainer::new(&model).check_membership(true).fit(
            &mut model,
            &docs,
            &prepared.train.labels(),
            &mut on_epoch,
        )?;
        if stats.membership_violations > 0 {
            notes.push(format!(
                "{} of {} training points failed the manifold membership check",
                stats.membership_violations, stats.points_checked
            ));
        }
        train_stats = Some(stats);
        Embedder::Network {
            model,
            vocab: vocab.clone(),
        }
    } else {
        match method {
            Method::Tfidf => Embedder::Tfidf(fit_tfidf(&prepared.train, vocab)),
            Method::Wordvec => match &config.word_vectors.path {
                Some(path) => {
                    notes.push(format!("word vectors loaded from {}", path.display()));
                    Embedder::WordVectors(load_word_vectors(path)?)
                }
                None => {
                    notes.push(format!(
                        "hash fallback word vectors (dim {})",
                        config.word_vectors.dim
                    ));
                    Embedder::WordVectors(hash_fallback_vectors(
                        vocab,
                        config.word_vectors.dim,
                        seed,
                    )?)
                }
            },
            Method::Unconstrained => {
                let mode = config.unconstrained_mode;
                notes.push(format!("mode {}", mode.name()));
                // the head width matches the sphere model it is compared with
                let sphere = ManifoldKind::sphere(config.model.sphere_dim);
                let model_config = config.model_config(vocab.len(), sphere.into(), seed)?;
                let model = unconstrained_model(&prepared.train, vocab, &model_config, mode)?;
                if mode == UnconstrainedMode::TripletTrained {
                    notes.push("trained with the triplet objective".into());
                }
                Embedder::Network {
                    model,
                    vocab: vocab.clone(),
                }
            }
            _ => unreachable!("manifold methods handled above"),
        }
    };
    Ok(Fitted {
        embedder,
        notes,
        train_stats,
    })
}

/// Classifier settings for one method: the forest draws from the method's
/// own seed.
pub fn classifiers_for(seed: u64, config: &RunConfig) -> ClassifierConfig {
    let mut c = config.classifiers;
    c.forest.seed = seed;
    c
}

/// Embeds both splits with a fitted embedder and scores the result.
pub fn evaluate_fitted(
    name: &str,
    embedder: &Embedder,
    prepared: &Prepared,
    classifiers: &ClassifierConfig,
) -> Result<EvalReport> {
    let train_x = embedder.embed(&prepared.train)?;
    let test_x = embedder.embed(&prepared.test)?;
    let mut report = evaluate_embedding(
        &train_x,
        &prepared.train.labels(),
        &test_x,
        &prepared.test.labels(),
        classifiers,
    )?;
    report.method = name.to_owned();
    report.dataset = prepared.format.name().to_owned();
    Ok(report)
}

/// Fits, embeds and evaluates one method. Failures become a report with
/// its `error` field set.
pub fn run_method(
    method: Method,
    prepared: &Prepared,
    config: &RunConfig,
) -> (EvalReport, Option<Error>) {
    let started = Instant::now();
    let classifiers = classifiers_for(method.seed(config.seed), config);
    let outcome = fit_method(method, prepared, config, |_| {}).and_then(|fitted| {
        let mut report = evaluate_fitted(method.name(), &fitted.embedder, prepared, &classifiers)?;
        report.notes.splice(0..0, fitted.notes);
        Ok(report)
    });
    match outcome {
        Ok(mut report) => {
            report.wall_time_secs = started.elapsed().as_secs_f64();
            (report, None)
        }
        Err(e) => {
            let mut report =
                EvalReport::failed(method.name(), prepared.format.name(), classifiers, &e);
            report.wall_time_secs = started.elapsed().as_secs_f64();
            (report, Some(e))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub version: u32,
    pub dataset: String,
    pub split: SplitInfo,
    pub reports: Vec<EvalReport>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::synthetic::{to_ag_news_csv, topic_corpus, TopicCorpusSpec};

    pub(crate) fn fixture(dir: &tempfile::TempDir) -> RunConfig {
        let corpus = topic_corpus(
            &TopicCorpusSpec {
                docs_per_class: 15,
                ..Default::default()
            },
            1,
        );
        let path = dir.path().join("ag.csv");
        std::fs::write(&path, to_ag_news_csv(&corpus)).unwrap();
        let mut c = RunConfig::default();
        c.dataset.path = Some(path);
        c.dataset.format = Some(DatasetFormat::Agnews);
        c.dataset.train_n = Some(40);
        c.dataset.test_n = Some(20);
        c.vocab.min_count = 1;
        c.model.d_embed = 8;
        c.model.epochs = 2;
        c.model.triplets_per_epoch = Some(64);
        c.model.batch_size = 16;
        c.classifiers.forest.n_trees = 5;
        c.classifiers.logistic.epochs = 20;
        c
    }

    #[test]
    fn split_is_shared_and_hashed() {
        let dir = tempfile::tempdir().unwrap();
        let c = fixture(&dir);
        let a = prepare(&c).unwrap();
        let b = prepare(&c).unwrap();
        assert_eq!(a.split, b.split);
        assert_eq!((a.split.train_n, a.split.test_n), (40, 20));
        assert!(a.warnings.is_empty());
        let mut other = c.clone();
        other.seed = 7;
        assert_ne!(prepare(&other).unwrap().split.hash, a.split.hash);
    }

    #[test]
    fn every_method_runs() {
        let dir = tempfile::tempdir().unwrap();
        let c = fixture(&dir);
        let p = prepare(&c).unwrap();
        for m in Method::ALL {
            let (report, err) = run_method(m, &p, &c);
            assert!(err.is_none(), "{m}: {err:?}");
            assert_eq!(report.method, m.name());
            assert_eq!(report.accuracies.len(), 3);
            assert_eq!(report.classifiers.forest.seed, m.seed(c.seed));
        }
    }

    #[test]
    fn failures_are_recorded() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = fixture(&dir);
        c.word_vectors.path = Some(dir.path().join("missing.vec"));
        let p = prepare(&c).unwrap();
        let (report, err) = run_method(Method::Wordvec, &p, &c);
        assert_eq!(err.unwrap().exit_code(), 3);
        assert!(report.error.is_some());
        assert!(report.silhouette.is_none());
    }
}
