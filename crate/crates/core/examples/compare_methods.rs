//! Runs every method on one split of a generated AG-News-style file and
//! prints the comparison tables, as `manifold-embed compare` does.
//!
//! cargo run --release --example compare_methods

use manifold_embed::cli::{format_tables, prepare, run_method, DatasetFormat, Method, RunConfig};
use manifold_embed::corpus::synthetic::{to_ag_news_csv, topic_corpus, TopicCorpusSpec};

fn main() -> manifold_embed::Result<()> {
    let dir = std::env::temp_dir().join(format!("manifold-embed-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| manifold_embed::Error::Config(e.to_string()))?;
    let path = dir.join("ag.csv");
    let spec = TopicCorpusSpec {
        docs_per_class: 100,
        words_per_doc: 20,
        topic_ratio: 0.3,
        ..Default::default()
    };
    std::fs::write(&path, to_ag_news_csv(&topic_corpus(&spec, 5)))
        .map_err(|e| manifold_embed::Error::Config(e.to_string()))?;

    let mut config = RunConfig::default();
    config.dataset.path = Some(path);
    config.dataset.format = Some(DatasetFormat::Agnews);
    config.dataset.train_n = Some(300);
    config.dataset.test_n = Some(100);
    config.vocab.min_count = 1;
    config.model.epochs = 5;
    config.classifiers.forest.n_trees = 30;

    let prepared = prepare(&config)?;
    let reports: Vec<_> = Method::ALL
        .into_iter()
        .map(|m| run_method(m, &prepared, &config).0)
        .collect();
    print!("{}", format_tables("synthetic", &reports));
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
