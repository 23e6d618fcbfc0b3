//! The `manifold-embed` command line: `train`, `evaluate`, `export-points`
//! and `compare`.
//!
//! Settings are resolved as built-in defaults, then the `--config` JSON
//! file, then flags. Errors exit with 2 (configuration or usage), 3 (file
//! input/output) or 4 (numerical failure).

mod config;
mod output;
mod pipeline;

pub use config::{
    DatasetFormat, DatasetSettings, Method, ModelSettings, OutputSettings, RunConfig,
    VocabSettings, WordVecSettings, CONFIG_VERSION,
};
pub use output::{format_tables, points_csv, sig9, summary_line};
pub use pipeline::{
    classifiers_for, evaluate_fitted, fit_method, prepare, run_method, ComparisonReport, Embedder,
    Fitted, Prepared, SplitInfo,
};

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;

use crate::baselines::UnconstrainedMode;
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::model::{load_model, save_model, ModelConfig, SavedModel, TrainStats};
use crate::numcore::{principal_components, Matrix};

pub const THREADS_ENV: &str = "MANIFOLD_EMBED_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "manifold-embed",
    version,
    about = "Manifold-constrained sentence embeddings and their baselines",
    after_help = "Settings precedence: built-in defaults < --config file < command-line flags.\n\
                  Exit codes: 2 configuration or usage, 3 file I/O, 4 numerical failure.\n\
                  MANIFOLD_EMBED_THREADS caps worker threads (0 or unset: one per core)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one manifold model and save it with its training statistics.
    Train(TrainArgs),
    /// Score a saved model or a baseline on the held-out split.
    Evaluate(EvaluateArgs),
    /// Write a 3-D point cloud (x,y,z,label_name) for plotting.
    ExportPoints(ExportArgs),
    /// Run several methods on one shared split and print comparison tables.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct DataArgs {
    /// JSON run configuration (see README); flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dataset CSV (`.gz` accepted).
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<DatasetFormat>,
    /// Training documents [default: 2000 agnews, 1600 mbti].
    #[arg(long)]
    pub train_n: Option<usize>,
    /// Held-out documents [default: 800 agnews, 400 mbti].
    #[arg(long)]
    pub test_n: Option<usize>,
    /// Take rows in file order instead of balancing classes.
    #[arg(long)]
    pub unbalanced: bool,
    /// Seed for the split; per-method seeds are derived from it [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub d_embed: Option<usize>,
    /// Ambient dimension of the sphere [default: 3].
    #[arg(long)]
    pub sphere_dim: Option<usize>,
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// [default: 20 × training documents]
    #[arg(long)]
    pub triplets_per_epoch: Option<usize>,
    /// Tokens kept per document [default: 64 agnews, 256 mbti].
    #[arg(long)]
    pub max_len: Option<usize>,
    /// Vocabulary size including the two special tokens [default: 20000].
    #[arg(long)]
    pub vocab_size: Option<usize>,
    /// [default: 2]
    #[arg(long)]
    pub min_count: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct BaselineArgs {
    /// Pre-trained word vectors for `wordvec` (text format, `.gz` accepted).
    #[arg(long)]
    pub word_vectors: Option<PathBuf>,
    /// Dimension of the hash fallback vectors when no file is given [default: 50].
    #[arg(long)]
    pub word_vector_dim: Option<usize>,
    /// `untrained` or `triplet_trained` [default: untrained].
    #[arg(long, value_parser = parse_mode)]
    pub unconstrained_mode: Option<UnconstrainedMode>,
}

fn parse_mode(s: &str) -> std::result::Result<UnconstrainedMode, String> {
    match s {
        "untrained" => Ok(UnconstrainedMode::Untrained),
        "triplet_trained" => Ok(UnconstrainedMode::TripletTrained),
        _ => Err(format!(
            "expected `untrained` or `triplet_trained`, got {s:?}"
        )),
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub manifold: Method,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Training statistics file [default: <out>.stats.json].
    #[arg(long)]
    pub stats_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model_args: ModelArgs,
    #[command(flatten)]
    pub baseline: BaselineArgs,
    /// Saved model to score.
    #[arg(long, conflicts_with = "method", required_unless_present = "method")]
    pub model: Option<PathBuf>,
    /// Method to fit and score instead of a saved model.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Report JSON to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model_args: ModelArgs,
    #[command(flatten)]
    pub baseline: BaselineArgs,
    #[arg(long, conflicts_with = "method", required_unless_present = "method")]
    pub model: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Reduce to the top three principal components (required above 3 dimensions).
    #[arg(long)]
    pub pca3: bool,
    /// CSV file to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// JSON run configuration with a top-level `version`.
    pub config: PathBuf,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<DatasetFormat>,
    #[arg(long)]
    pub train_n: Option<usize>,
    #[arg(long)]
    pub test_n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Methods to run, comma separated; replaces the config list.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub methods: Vec<Method>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub baseline: BaselineArgs,
    /// Comparison report JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Text tables, also printed to standard output.
    #[arg(long)]
    pub tables: Option<PathBuf>,
}

fn apply_data(c: &mut RunConfig, a: &DataArgs) {
    if let Some(p) = &a.data {
        c.dataset.path = Some(p.clone());
    }
    c.dataset.format = a.format.or(c.dataset.format);
    c.dataset.train_n = a.train_n.or(c.dataset.train_n);
    c.dataset.test_n = a.test_n.or(c.dataset.test_n);
    if a.unbalanced {
        c.dataset.balanced = Some(false);
    }
    if let Some(s) = a.seed {
        c.seed = s;
    }
}

fn apply_model(c: &mut RunConfig, a: &ModelArgs) {
    let m = &mut c.model;
    m.d_embed = a.d_embed.unwrap_or(m.d_embed);
    m.sphere_dim = a.sphere_dim.unwrap_or(m.sphere_dim);
    m.margin = a.margin.unwrap_or(m.margin);
    m.learning_rate = a.learning_rate.unwrap_or(m.learning_rate);
    m.epochs = a.epochs.unwrap_or(m.epochs);
    m.batch_size = a.batch_size.unwrap_or(m.batch_size);
    m.triplets_per_epoch = a.triplets_per_epoch.or(m.triplets_per_epoch);
    m.max_len = a.max_len.or(m.max_len);
    c.vocab.max_size = a.vocab_size.unwrap_or(c.vocab.max_size);
    c.vocab.min_count = a.min_count.unwrap_or(c.vocab.min_count);
}

fn apply_baseline(c: &mut RunConfig, a: &BaselineArgs) {
    if let Some(p) = &a.word_vectors {
        c.word_vectors.path = Some(p.clone());
    }
    c.word_vectors.dim = a.word_vector_dim.unwrap_or(c.word_vectors.dim);
    c.unconstrained_mode = a.unconstrained_mode.unwrap_or(c.unconstrained_mode);
}

fn base_config(path: Option<&Path>) -> Result<RunConfig> {
    path.map_or_else(|| Ok(RunConfig::default()), RunConfig::load)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

#[derive(Serialize)]
struct TrainRecord<'a> {
    method: &'a str,
    dataset: &'a str,
    split: &'a SplitInfo,
    vocab_size: usize,
    model: &'a ModelConfig,
    stats: &'a TrainStats,
    wall_time_secs: f64,
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let started = Instant::now();
    let mut config = base_config(args.data.config.as_deref())?;
    apply_data(&mut config, &args.data);
    apply_model(&mut config, &args.model);
    if args.manifold.manifold(config.model.sphere_dim).is_none() {
        return Err(Error::Config(format!(
            "--manifold must name a manifold method, got {}",
            args.manifold
        )));
    }
    let stats_out = args
        .stats_out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.stats.json", args.out.display())));
    config.output.report = Some(args.out.clone());
    config.output.tables = Some(stats_out.clone());
    config.validate()?;

    let prepared = prepare(&config)?;
    warn_all(&prepared.warnings);
    let total = config.model.epochs;
    let fitted = fit_method(args.manifold, &prepared, &config, |e| {
        println!(
            "epoch {}/{total} loss {:.6} active {:.3} time {:.2}s",
            e.epoch + 1,
            e.mean_loss,
            e.active_fraction,
            e.wall_time_secs
        );
    })?;
    warn_all(&fitted.notes);
    let Embedder::Network { model, vocab } = fitted.embedder else {
        unreachable!("manifold methods produce networks");
    };
    let stats = fitted.train_stats.unwrap_or_default();
    let saved = SavedModel {
        model,
        vocab,
        label_names: prepared.corpus.label_names().to_vec(),
    };
    save_model(&saved, &args.out)?;
    write_json(
        &stats_out,
        &TrainRecord {
            method: args.manifold.name(),
            dataset: prepared.format.name(),
            split: &prepared.split,
            vocab_size: saved.vocab.len(),
            model: saved.model.config(),
            stats: &stats,
            wall_time_secs: started.elapsed().as_secs_f64(),
        },
    )
}

/// Builds the embedder named on the command line: a saved model, or a
/// method fitted on the training split.
fn resolve_embedder(
    model: Option<&Path>,
    method: Option<Method>,
    prepared: &Prepared,
    config: &RunConfig,
) -> Result<(String, u64, Embedder, Vec<String>)> {
    if let Some(path) = model {
        let saved = load_model(path)?;
        let name = saved.model.config().projection.name().to_owned();
        let seed = name
            .parse::<Method>()
            .map_or(config.seed, |m| m.seed(config.seed));
        let embedder = Embedder::Network {
            model: saved.model,
            vocab: saved.vocab,
        };
        return Ok((
            name,
            seed,
            embedder,
            vec![format!("model loaded from {}", path.display())],
        ));
    }
    let method = method.expect("clap requires --model or --method");
    let fitted = fit_method(method, prepared, config, |_| {})?;
    Ok((
        method.name().to_owned(),
        method.seed(config.seed),
        fitted.embedder,
        fitted.notes,
    ))
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let started = Instant::now();
    let mut config = base_config(args.data.config.as_deref())?;
    apply_data(&mut config, &args.data);
    apply_model(&mut config, &args.model_args);
    apply_baseline(&mut config, &args.baseline);
    config.output.report = args.out.clone();
    config.validate()?;

    let prepared = prepare(&config)?;
    warn_all(&prepared.warnings);
    let (name, seed, embedder, notes) =
        resolve_embedder(args.model.as_deref(), args.method, &prepared, &config)?;
    let mut report = evaluate_fitted(&name, &embedder, &prepared, &classifiers_for(seed, &config))?;
    report.notes.splice(0..0, notes);
    report.wall_time_secs = started.elapsed().as_secs_f64();
    warn_all(&report.notes);
    if let Some(out) = &args.out {
        write_json(out, &report)?;
    }
    println!("{}", summary_line(&report));
    Ok(())
}

fn to_three_columns(points: Matrix, pca3: bool) -> Result<Matrix> {
    let d = points.cols();
    if d > 3 {
        if !pca3 {
            return Err(Error::Config(format!(
                "the embedding has {d} dimensions; pass --pca3 to project onto the top 3 principal components"
            )));
        }
        return principal_components(&points, 3);
    }
    if d == 3 {
        return Ok(points);
    }
    // fewer than three dimensions: pad with zeros
    let mut out = Matrix::zeros(points.rows(), 3);
    for (r, row) in points.row_iter().enumerate() {
        out.row_mut(r)[..d].copy_from_slice(row);
    }
    Ok(out)
}

fn cmd_export(args: &ExportArgs) -> Result<()> {
    let mut config = base_config(args.data.config.as_deref())?;
    apply_data(&mut config, &args.data);
    apply_model(&mut config, &args.model_args);
    apply_baseline(&mut config, &args.baseline);
    config.output.report = Some(args.out.clone());
    config.validate()?;

    let prepared = prepare(&config)?;
    warn_all(&prepared.warnings);
    let (_, _, embedder, _) =
        resolve_embedder(args.model.as_deref(), args.method, &prepared, &config)?;
    let points = to_three_columns(embedder.embed(&prepared.corpus)?, args.pca3)?;
    let csv = points_csv(
        &points,
        &prepared.corpus.labels(),
        prepared.corpus.label_names(),
    )?;
    write_atomic(&args.out, &csv)
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let mut config = RunConfig::load(&args.config)?;
    apply_data(
        &mut config,
        &DataArgs {
            config: None,
            data: args.data.clone(),
            format: args.format,
            train_n: args.train_n,
            test_n: args.test_n,
            unbalanced: false,
            seed: args.seed,
        },
    );
    apply_model(&mut config, &args.model);
    apply_baseline(&mut config, &args.baseline);
    if !args.methods.is_empty() {
        config.methods = args.methods.clone();
    }
    if let Some(out) = &args.out {
        config.output.report = Some(out.clone());
    }
    if let Some(t) = &args.tables {
        config.output.tables = Some(t.clone());
    }
    if config.methods.is_empty() {
        return Err(Error::Config(
            "no methods to compare (set `methods` or --methods)".into(),
        ));
    }
    config.validate()?;

    let prepared = prepare(&config)?;
    warn_all(&prepared.warnings);
    let mut reports = Vec::new();
    let mut first_error = None;
    for &method in &config.methods {
        let (report, err) = run_method(method, &prepared, &config);
        warn_all(&report.notes);
        match &err {
            Some(e) => eprintln!("error: {method} failed: {e}"),
            None => println!("{}", summary_line(&report)),
        }
        if first_error.is_none() {
            first_error = err;
        }
        reports.push(report);
    }
    let comparison = ComparisonReport {
        version: CONFIG_VERSION,
        dataset: prepared.format.name().to_owned(),
        split: prepared.split.clone(),
        reports,
    };
    let tables = format_tables(&comparison.dataset, &comparison.reports);
    println!();
    print!("{tables}");
    if let Some(path) = &config.output.report {
        write_json(path, &comparison)?;
    }
    if let Some(path) = &config.output.tables {
        write_atomic(path, tables.as_bytes())?;
    }
    match first_error {
        Some(e) if comparison.reports.iter().all(|r| r.error.is_some()) => Err(e),
        _ => Ok(()),
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().map_err(|_| {
        Error::Config(format!(
            "{THREADS_ENV} must be a non-negative integer, got {value:?}"
        ))
    })?;
    if threads > 0 {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(())
}

fn subcommand_name(command: &Command) -> &'static str {
    match command {
        Command::Train(_) => "train",
        Command::Evaluate(_) => "evaluate",
        Command::ExportPoints(_) => "export-points",
        Command::Compare(_) => "compare",
    }
}

pub fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::ExportPoints(a) => cmd_export(a),
        Command::Compare(a) => cmd_compare(a),
    }
}

/// Runs the tool on an explicit argument list (program name first) and
/// returns the process exit code.
pub fn run_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap reports 2 for usage errors and 0 for --help / --version
            let _ = e.print();
            return e.exit_code();
        }
    };
    let name = subcommand_name(&cli.command);
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.exit_code() == 2 {
                let mut cmd = Cli::command();
                if let Some(sub) = cmd.find_subcommand_mut(name) {
                    eprintln!("\n{}", sub.render_usage());
                    eprintln!("For more information, try 'manifold-embed {name} --help'.");
                }
            }
            e.exit_code()
        }
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run_with_args(std::env::args_os()) as u8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::synthetic::{to_ag_news_csv, topic_corpus, TopicCorpusSpec};
    use std::ffi::OsString;

    struct Fixture {
        dir: tempfile::TempDir,
    }

    impl Fixture {
        fn new() -> Self {
            let dir = tempfile::tempdir().unwrap();
            let spec = TopicCorpusSpec {
                docs_per_class: 15,
                ..Default::default()
            };
            std::fs::write(
                dir.path().join("ag.csv"),
                to_ag_news_csv(&topic_corpus(&spec, 3)),
            )
            .unwrap();
            Fixture { dir }
        }

        fn path(&self, name: &str) -> PathBuf {
            self.dir.path().join(name)
        }

        fn run(&self, sub: &str, extra: &[&str]) -> i32 {
            let mut args: Vec<OsString> = vec!["manifold-embed".into(), sub.into()];
            if sub != "compare" {
                args.extend(["--data".into(), self.path("ag.csv").into_os_string()]);
                args.extend(["--format", "agnews"].map(OsString::from));
            }
            args.extend(
                [
                    "--train-n",
                    "40",
                    "--test-n",
                    "20",
                    "--min-count",
                    "1",
                    "--epochs",
                    "2",
                    "--d-embed",
                    "8",
                ]
                .map(OsString::from),
            );
            args.extend(extra.iter().map(|s| {
                // `@name` refers to a file in the fixture directory
                match s.strip_prefix('@') {
                    Some(name) => self.path(name).into_os_string(),
                    None => OsString::from(s),
                }
            }));
            run_with_args(args)
        }

        fn read(&self, name: &str) -> String {
            std::fs::read_to_string(self.path(name)).unwrap()
        }
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(
            run_with_args([
                "manifold-embed",
                "train",
                "--manifold",
                "sphere",
                "--out",
                "m.json"
            ]),
            2
        );
        assert_eq!(
            run_with_args(["manifold-embed", "evaluate", "--method", "bogus"]),
            2
        );
        assert_eq!(run_with_args(["manifold-embed"]), 2);
        let f = Fixture::new();
        // only manifold methods can be trained
        assert_eq!(
            f.run("train", &["--manifold", "tfidf", "--out", "@m.json"]),
            2
        );
        assert_eq!(f.run("evaluate", &["--method", "sphere", "--margin=-1"]), 2);
    }

    #[test]
    fn io_errors_exit_3() {
        let f = Fixture::new();
        std::fs::write(f.path("bad.json"), "{ not a model").unwrap();
        assert_eq!(f.run("evaluate", &["--model", "@bad.json"]), 3);
        assert_eq!(f.run("evaluate", &["--model", "@missing.json"]), 3);
    }

    #[test]
    fn training_is_reproducible() {
        let f = Fixture::new();
        for out in ["@a.json", "@b.json"] {
            assert_eq!(
                f.run("train", &["--manifold", "mobius_flat", "--out", out]),
                0
            );
        }
        assert_eq!(f.read("a.json"), f.read("b.json"));
        let stats: serde_json::Value = serde_json::from_str(&f.read("a.json.stats.json")).unwrap();
        assert!(stats.is_object());
        assert_eq!(
            f.run("evaluate", &["--model", "@a.json", "--out", "@r.json"]),
            0
        );
        let report: serde_json::Value = serde_json::from_str(&f.read("r.json")).unwrap();
        assert_eq!(report["method"], "mobius_flat");
    }

    #[test]
    fn evaluate_baseline() {
        let f = Fixture::new();
        assert_eq!(
            f.run("evaluate", &["--method", "tfidf", "--out", "@t.json"]),
            0
        );
        let report: serde_json::Value = serde_json::from_str(&f.read("t.json")).unwrap();
        assert_eq!(report["accuracies"].as_object().unwrap().len(), 3);
    }

    fn csv_rows(text: &str) -> Vec<Vec<String>> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(r.headers().unwrap(), vec!["x", "y", "z", "label_name"]);
        r.records()
            .map(|rec| rec.unwrap().iter().map(str::to_owned).collect())
            .collect()
    }

    #[test]
    fn export_points() {
        let f = Fixture::new();
        assert_eq!(
            f.run("export-points", &["--method", "sphere", "--out", "@s.csv"]),
            0
        );
        let rows = csv_rows(&f.read("s.csv"));
        assert_eq!(rows.len(), 60);
        for row in &rows {
            let norm: f64 = row[..3]
                .iter()
                .map(|v| v.parse::<f64>().unwrap().powi(2))
                .sum::<f64>()
                .sqrt();
            assert!((norm - 1.0).abs() < 1e-6, "{row:?}");
        }
        // four dimensions need an explicit reduction
        assert_eq!(
            f.run(
                "export-points",
                &["--method", "torus_flat", "--out", "@t.csv"]
            ),
            2
        );
        assert!(!f.path("t.csv").exists());
        assert_eq!(
            f.run(
                "export-points",
                &["--method", "torus_flat", "--pca3", "--out", "@t.csv"]
            ),
            0
        );
        for row in csv_rows(&f.read("t.csv")) {
            assert!(row[..3]
                .iter()
                .all(|v| v.parse::<f64>().unwrap().is_finite()));
        }
    }

    #[test]
    fn compare_is_deterministic() {
        let f = Fixture::new();
        let cfg = serde_json::json!({
            "version": 1,
            "dataset": {"path": f.path("ag.csv"), "format": "agnews"},
            "classifiers": {"forest": {"n_trees": 5}},
        });
        std::fs::write(f.path("cfg.json"), cfg.to_string()).unwrap();
        let mut reports = Vec::new();
        for name in ["r1.json", "r2.json"] {
            let out = format!("@{name}");
            let args = [
                "@cfg.json",
                "--methods",
                "sphere,tfidf,wordvec",
                "--out",
                &out,
                "--tables",
                "@tables.txt",
            ];
            assert_eq!(f.run("compare", &args), 0);
            let mut v: serde_json::Value = serde_json::from_str(&f.read(name)).unwrap();
            for r in v["reports"].as_array_mut().unwrap() {
                r.as_object_mut().unwrap().remove("wall_time_secs");
            }
            reports.push(v);
        }
        assert_eq!(reports[0], reports[1]);
        assert_eq!(reports[0]["reports"].as_array().unwrap().len(), 3);
        assert!(f
            .read("tables.txt")
            .contains("Silhouette scores (agnews, test split)"));

        std::fs::write(f.path("old.json"), r#"{"version": 2}"#).unwrap();
        assert_eq!(f.run("compare", &["@old.json"]), 2);
    }
}
