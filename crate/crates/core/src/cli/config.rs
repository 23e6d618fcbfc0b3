use std::fmt;
use std::hash::Hasher;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fnv::FnvHasher;
use serde::{Deserialize, Serialize};

use crate::baselines::UnconstrainedMode;
use crate::error::{Error, Result};
use crate::eval::ClassifierConfig;
use crate::manifolds::ManifoldKind;
use crate::model::{ModelConfig, Projection};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DatasetFormat {
    Agnews,
    Mbti,
}

impl DatasetFormat {
    pub fn name(self) -> &'static str {
        match self {
            DatasetFormat::Agnews => "agnews",
            DatasetFormat::Mbti => "mbti",
        }
    }

    pub fn default_sizes(self) -> (usize, usize) {
        match self {
            DatasetFormat::Agnews => (2000, 800),
            DatasetFormat::Mbti => (1600, 400),
        }
    }

    pub fn default_max_len(self) -> usize {
        match self {
            DatasetFormat::Agnews => 64,
            DatasetFormat::Mbti => 256,
        }
    }
}

/// Every embedding the comparison knows how to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Method {
    Sphere,
    TorusEmbedded,
    TorusFlat,
    MobiusEmbedded,
    MobiusFlat,
    Tfidf,
    Wordvec,
    Unconstrained,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Sphere,
        Method::TorusEmbedded,
        Method::TorusFlat,
        Method::MobiusEmbedded,
        Method::MobiusFlat,
        Method::Tfidf,
        Method::Wordvec,
        Method::Unconstrained,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Sphere => "sphere",
            Method::TorusEmbedded => "torus_embedded",
            Method::TorusFlat => "torus_flat",
            Method::MobiusEmbedded => "mobius_embedded",
            Method::MobiusFlat => "mobius_flat",
            Method::Tfidf => "tfidf",
            Method::Wordvec => "wordvec",
            Method::Unconstrained => "unconstrained",
        }
    }

    pub fn manifold(self, sphere_dim: usize) -> Option<ManifoldKind> {
        match self {
            Method::Sphere => Some(ManifoldKind::sphere(sphere_dim)),
            Method::TorusEmbedded => Some(ManifoldKind::torus_embedded()),
            Method::TorusFlat => Some(ManifoldKind::TorusFlat),
            Method::MobiusEmbedded => Some(ManifoldKind::MobiusEmbedded),
            Method::MobiusFlat => Some(ManifoldKind::MobiusFlat),
            Method::Tfidf | Method::Wordvec | Method::Unconstrained => None,
        }
    }

    /// `seed ⊕ FNV-1a(name)`: every method gets its own generators, so
    /// running a subset of methods never changes any method's numbers.
    pub fn seed(self, base: u64) -> u64 {
        let mut h = FnvHasher::default();
        h.write(self.name().as_bytes());
        base ^ h.finish()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSettings {
    pub path: Option<PathBuf>,
    pub format: Option<DatasetFormat>,
    pub train_n: Option<usize>,
    pub test_n: Option<usize>,
    /// `None` means balanced.
    pub balanced: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSettings {
    pub d_embed: usize,
    pub sphere_dim: usize,
    pub margin: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub triplets_per_epoch: Option<usize>,
    /// `None` uses the dataset default.
    pub max_len: Option<usize>,
}

impl Default for ModelSettings {
    fn default() -> Self {
        ModelSettings {
            d_embed: ModelConfig::DEFAULT_D_EMBED,
            sphere_dim: 3,
            margin: ModelConfig::DEFAULT_MARGIN,
            learning_rate: ModelConfig::DEFAULT_LEARNING_RATE,
            epochs: ModelConfig::DEFAULT_EPOCHS,
            batch_size: ModelConfig::DEFAULT_BATCH_SIZE,
            triplets_per_epoch: None,
            max_len: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VocabSettings {
    pub max_size: usize,
    pub min_count: u64,
}

impl Default for VocabSettings {
    fn default() -> Self {
        VocabSettings {
            max_size: 20_000,
            min_count: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WordVecSettings {
    /// Pre-trained vectors; hash-seeded stand-ins are used when absent.
    pub path: Option<PathBuf>,
    /// Width of the stand-in vectors.
    pub dim: usize,
}

impl Default for WordVecSettings {
    fn default() -> Self {
        WordVecSettings {
            path: None,
            dim: 50,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSettings {
    pub report: Option<PathBuf>,
    pub tables: Option<PathBuf>,
}

/// Contents of a `--config` JSON file. Every field but `version` may be
/// omitted; command-line flags override whatever the file sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(default)]
    pub dataset: DatasetSettings,
    #[serde(default)]
    pub model: ModelSettings,
    #[serde(default)]
    pub vocab: VocabSettings,
    #[serde(default)]
    pub classifiers: ClassifierConfig,
    #[serde(default)]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub word_vectors: WordVecSettings,
    #[serde(default)]
    pub unconstrained_mode: UnconstrainedMode,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputSettings,
}

fn default_seed() -> u64 {
    42
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            version: CONFIG_VERSION,
            dataset: DatasetSettings::default(),
            model: ModelSettings::default(),
            vocab: VocabSettings::default(),
            classifiers: ClassifierConfig::default(),
            methods: Vec::new(),
            word_vectors: WordVecSettings::default(),
            unconstrained_mode: UnconstrainedMode::default(),
            seed: default_seed(),
            output: OutputSettings::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let config: RunConfig = serde_json::from_slice(&bytes)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if config.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "{}: config version {} is not supported (expected {CONFIG_VERSION})",
                path.display(),
                config.version
            )));
        }
        Ok(config)
    }

    pub fn format(&self) -> Result<DatasetFormat> {
        self.dataset.format.ok_or_else(|| {
            Error::Config("dataset format is required (--format agnews|mbti)".into())
        })
    }

    pub fn data_path(&self) -> Result<&Path> {
        self.dataset
            .path
            .as_deref()
            .ok_or_else(|| Error::Config("dataset path is required (--data)".into()))
    }

    pub fn sizes(&self) -> Result<(usize, usize)> {
        let (train, test) = self.format()?.default_sizes();
        Ok((
            self.dataset.train_n.unwrap_or(train),
            self.dataset.test_n.unwrap_or(test),
        ))
    }

    pub fn max_len(&self) -> Result<usize> {
        Ok(self
            .model
            .max_len
            .unwrap_or(self.format()?.default_max_len()))
    }

    /// Model configuration for one method; the seed is the method's own.
    pub fn model_config(
        &self,
        vocab_size: usize,
        projection: Projection,
        seed: u64,
    ) -> Result<ModelConfig> {
        let m = &self.model;
        let mut config = ModelConfig::new(vocab_size, projection);
        config.d_embed = m.d_embed;
        config.margin = m.margin;
        config.learning_rate = m.learning_rate;
        config.epochs = m.epochs;
        config.batch_size = m.batch_size;
        config.triplets_per_epoch = m.triplets_per_epoch;
        config.seed = seed;
        config.max_len = self.max_len()?;
        config.validate()?;
        Ok(config)
    }

    /// Checks everything that can be checked before touching the data.
    pub fn validate(&self) -> Result<()> {
        let (train_n, test_n) = self.sizes()?;
        if train_n < 2 || test_n < 2 {
            return Err(Error::Config(format!(
                "train_n and test_n must both be at least 2, got {train_n} and {test_n}"
            )));
        }
        if self.vocab.max_size < 3 {
            return Err(Error::Config(
                "vocabulary max_size must be at least 3".into(),
            ));
        }
        if self.word_vectors.dim == 0 {
            return Err(Error::Config(
                "word vector dimension must be positive".into(),
            ));
        }
        self.classifiers.validate()?;
        self.model_config(
            3,
            ManifoldKind::sphere(self.model.sphere_dim).into(),
            self.seed,
        )?;
        let data = self.data_path()?;
        let outputs: Vec<&Path> = [&self.output.report, &self.output.tables]
            .into_iter()
            .flatten()
            .map(PathBuf::as_path)
            .collect();
        for (i, a) in outputs.iter().enumerate() {
            if *a == data || outputs[i + 1..].contains(a) {
                return Err(Error::Config(format!(
                    "output path {} collides with another path",
                    a.display()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let c: RunConfig =
            serde_json::from_str(r#"{"version": 1, "methods": ["sphere", "tfidf"]}"#).unwrap();
        assert_eq!(c.methods, vec![Method::Sphere, Method::Tfidf]);
        assert_eq!(c.seed, 42);
        assert_eq!(c.vocab, VocabSettings::default());
        assert_eq!(c.classifiers, ClassifierConfig::default());
        assert!(c.format().is_err());
    }

    #[test]
    fn unknown_fields_and_versions_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"version": 1, "mehtods": []}"#).is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"version": 7}"#).unwrap();
        let err = RunConfig::load(&path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn format_defaults() {
        let mut c = RunConfig::default();
        c.dataset.format = Some(DatasetFormat::Mbti);
        assert_eq!(c.sizes().unwrap(), (1600, 400));
        assert_eq!(c.max_len().unwrap(), 256);
        c.dataset.format = Some(DatasetFormat::Agnews);
        c.dataset.train_n = Some(10);
        assert_eq!(c.sizes().unwrap(), (10, 800));
        assert_eq!(c.max_len().unwrap(), 64);
    }

    #[test]
    fn method_seeds_differ_and_names_round_trip() {
        let seeds: std::collections::HashSet<u64> =
            Method::ALL.iter().map(|m| m.seed(42)).collect();
        assert_eq!(seeds.len(), Method::ALL.len());
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            assert_eq!(
                serde_json::to_string(&m).unwrap(),
                format!("\"{}\"", m.name())
            );
        }
    }

    #[test]
    fn colliding_paths_are_rejected() {
        let mut c = RunConfig::default();
        c.dataset.format = Some(DatasetFormat::Agnews);
        c.dataset.path = Some("data.csv".into());
        c.output.report = Some("out.json".into());
        assert!(c.validate().is_ok());
        c.output.tables = Some("out.json".into());
        assert!(c.validate().is_err());
        c.output.tables = Some("data.csv".into());
        assert!(c.validate().is_err());
    }
}
