//! Silhouette score over class labels, three classifiers written from
//! scratch, and the per-method report that ties them together.

mod forest;
mod logistic;
mod naive_bayes;
mod silhouette;

pub use forest::{fit_random_forest, predict_forest, DecisionTree, ForestConfig, RandomForest};
pub use logistic::{fit_logistic, predict_logistic, LogisticConfig, LogisticRegression};
pub use naive_bayes::{fit_gaussian_nb, predict_nb, GaussianNb, NbConfig};
pub use silhouette::silhouette_score;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::{Matrix, SeededRng};

pub const LOGISTIC_REGRESSION: &str = "logistic_regression";
pub const RANDOM_FOREST: &str = "random_forest";
pub const NAIVE_BAYES: &str = "naive_bayes";

/// Above this many test points the silhouette is computed on a seeded
/// subsample.
pub const SILHOUETTE_MAX_POINTS: usize = 5000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    pub logistic: LogisticConfig,
    pub forest: ForestConfig,
    pub nb: NbConfig,
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        self.logistic.validate()?;
        self.forest.validate()?;
        if !(self.nb.variance_smoothing > 0.0 && self.nb.variance_smoothing.is_finite()) {
            return Err(Error::Config(format!(
                "variance smoothing must be positive, got {}",
                self.nb.variance_smoothing
            )));
        }
        Ok(())
    }
}

/// One row of the comparison: how well a method's embedding separates the
/// classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub dataset: String,
    /// Computed on the test split with true labels. `None` when the method
    /// failed.
    pub silhouette: Option<f64>,
    /// Test accuracy per classifier name.
    pub accuracies: BTreeMap<String, f64>,
    pub train_n: usize,
    pub test_n: usize,
    pub dim: usize,
    pub silhouette_n: usize,
    pub silhouette_split: String,
    pub standardized: bool,
    pub classifiers: ClassifierConfig,
    pub notes: Vec<String>,
    pub error: Option<String>,
    pub wall_time_secs: f64,
}

impl EvalReport {
    pub fn failed(
        method: &str,
        dataset: &str,
        classifiers: ClassifierConfig,
        error: &Error,
    ) -> Self {
        EvalReport {
            method: method.to_owned(),
            dataset: dataset.to_owned(),
            silhouette: None,
            accuracies: BTreeMap::new(),
            train_n: 0,
            test_n: 0,
            dim: 0,
            silhouette_n: 0,
            silhouette_split: "test".into(),
            standardized: true,
            classifiers,
            notes: Vec::new(),
            error: Some(error.to_string()),
            wall_time_secs: 0.0,
        }
    }

    pub fn accuracy(&self, classifier: &str) -> Option<f64> {
        self.accuracies.get(classifier).copied()
    }
}

/// Silhouette of the test embedding plus test accuracy of each classifier
/// fit on the training embedding. `method` and `dataset` are left empty for
/// the caller to fill.
pub fn evaluate_embedding(
    train_x: &Matrix,
    train_y: &[usize],
    test_x: &Matrix,
    test_y: &[usize],
    config: &ClassifierConfig,
) -> Result<EvalReport> {
    let started = Instant::now();
    config.validate()?;
    if test_x.rows() != test_y.len() {
        return Err(Error::Shape {
            op: "evaluate_embedding",
            left: test_x.shape(),
            right: (test_y.len(), 1),
        });
    }
    if train_x.cols() != test_x.cols() {
        return Err(Error::Shape {
            op: "evaluate_embedding",
            left: train_x.shape(),
            right: test_x.shape(),
        });
    }
    let mut notes = Vec::new();
    let (sil_x, sil_y) = if test_x.rows() > SILHOUETTE_MAX_POINTS {
        let mut order: Vec<usize> = (0..test_x.rows()).collect();
        SeededRng::new(config.forest.seed).shuffle(&mut order);
        order.truncate(SILHOUETTE_MAX_POINTS);
        order.sort_unstable();
        notes.push(format!(
            "silhouette computed on {SILHOUETTE_MAX_POINTS} of {} test points",
            test_x.rows()
        ));
        let labels = order.iter().map(|&i| test_y[i]).collect();
        (test_x.select_rows(&order), labels)
    } else {
        (test_x.clone(), test_y.to_vec())
    };
    let silhouette = silhouette_score(&sil_x, &sil_y)?;

    let mut accuracies = BTreeMap::new();
    let lr = fit_logistic(train_x, train_y, &config.logistic)?;
    accuracies.insert(
        LOGISTIC_REGRESSION.to_owned(),
        accuracy(&predict_logistic(&lr, test_x)?, test_y)?,
    );
    let rf = fit_random_forest(train_x, train_y, &config.forest)?;
    accuracies.insert(
        RANDOM_FOREST.to_owned(),
        accuracy(&predict_forest(&rf, test_x)?, test_y)?,
    );
    let nb = fit_gaussian_nb(train_x, train_y, config.nb.variance_smoothing)?;
    accuracies.insert(
        NAIVE_BAYES.to_owned(),
        accuracy(&predict_nb(&nb, test_x)?, test_y)?,
    );

    Ok(EvalReport {
        method: String::new(),
        dataset: String::new(),
        silhouette: Some(silhouette),
        accuracies,
        train_n: train_x.rows(),
        test_n: test_x.rows(),
        dim: train_x.cols(),
        silhouette_n: sil_x.rows(),
        silhouette_split: "test".into(),
        standardized: true,
        classifiers: *config,
        notes,
        error: None,
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}

/// Fraction of positions where `pred` and `truth` agree.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::Shape {
            op: "accuracy",
            left: (pred.len(), 1),
            right: (truth.len(), 1),
        });
    }
    if pred.is_empty() {
        return Err(Error::Empty { op: "accuracy" });
    }
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / pred.len() as f64)
}

/// Index of the largest score, first one on ties.
pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn argmax_counts(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate().skip(1) {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

/// Shape checks shared by every `fit_*`; returns the class count
/// (largest label + 1).
pub(crate) fn check_fit(x: &Matrix, y: &[usize], op: &'static str) -> Result<usize> {
    if x.rows() != y.len() {
        return Err(Error::Shape {
            op,
            left: x.shape(),
            right: (y.len(), 1),
        });
    }
    if y.is_empty() {
        return Err(Error::Empty { op });
    }
    let first = y[0];
    if y.iter().all(|&l| l == first) {
        return Err(Error::Config(format!(
            "{op}: training labels contain a single class"
        )));
    }
    x.ensure_finite(op)?;
    Ok(y.iter().max().map_or(0, |m| m + 1))
}

pub(crate) fn check_predict(x: &Matrix, features: usize, op: &'static str) -> Result<()> {
    if x.cols() != features {
        return Err(Error::Shape {
            op,
            left: x.shape(),
            right: (x.rows(), features),
        });
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod testdata {
    use crate::numcore::{Matrix, SeededRng};

    fn gaussian(rng: &mut SeededRng) -> f64 {
        // Box-Muller
        let u = rng.uniform().max(f64::MIN_POSITIVE);
        (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * rng.uniform()).cos()
    }

    /// `classes` isotropic 2-D blobs on a circle of radius 3.
    pub fn blobs(classes: usize, per_class: usize, sigma: f64, seed: u64) -> (Matrix, Vec<usize>) {
        let mut rng = SeededRng::new(seed);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..classes * per_class {
            let c = i % classes;
            let angle = 2.0 * std::f64::consts::PI * c as f64 / classes as f64;
            rows.push([
                3.0 * angle.cos() + sigma * gaussian(&mut rng),
                3.0 * angle.sin() + sigma * gaussian(&mut rng),
            ]);
            y.push(c);
        }
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    /// Clouds at the four corners (±1, ±1), labelled by sign parity.
    pub fn xor(per_corner: usize, sigma: f64, seed: u64) -> (Matrix, Vec<usize>) {
        let mut rng = SeededRng::new(seed);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..4 * per_corner {
            let (sx, sy) = [(1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)][i % 4];
            rows.push([
                sx + sigma * gaussian(&mut rng),
                sy + sigma * gaussian(&mut rng),
            ]);
            y.push(((sx * sy) < 0.0) as usize);
        }
        (Matrix::from_rows(&rows).unwrap(), y)
    }
}

#[cfg(test)]
mod tests {
    use super::testdata::blobs;
    use super::*;

    #[test]
    fn accuracy_cases() {
        assert_eq!(accuracy(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, 2], &[0, 0]).unwrap(), 0.0);
        assert_eq!(accuracy(&[0, 1, 1, 0], &[0, 1, 0, 1]).unwrap(), 0.5);
        assert!(accuracy(&[0], &[0, 1]).is_err());
        assert!(accuracy(&[], &[]).is_err());
    }

    #[test]
    fn argmax_prefers_lowest() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax_counts(&[2, 2, 1]), 0);
    }

    fn small_config() -> ClassifierConfig {
        ClassifierConfig {
            forest: ForestConfig {
                n_trees: 20,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn separated_embedding() {
        let (train_x, train_y) = blobs(4, 30, 0.1, 1);
        let (test_x, test_y) = blobs(4, 10, 0.1, 2);
        let cfg = small_config();
        let r = evaluate_embedding(&train_x, &train_y, &test_x, &test_y, &cfg).unwrap();
        assert!(r.silhouette.unwrap() > 0.9);
        assert_eq!(r.accuracies.len(), 3);
        assert!(
            r.accuracies.values().all(|&a| a == 1.0),
            "{:?}",
            r.accuracies
        );
        assert_eq!(
            (r.train_n, r.test_n, r.dim, r.silhouette_n),
            (120, 40, 2, 40)
        );
        assert_eq!(r.classifiers, cfg);
        assert!(r.error.is_none());
    }

    #[test]
    fn shuffled_labels_are_near_chance() {
        let (train_x, mut train_y) = blobs(4, 100, 0.1, 3);
        let (test_x, mut test_y) = blobs(4, 100, 0.1, 4);
        let mut rng = SeededRng::new(5);
        rng.shuffle(&mut train_y);
        rng.shuffle(&mut test_y);
        let r = evaluate_embedding(&train_x, &train_y, &test_x, &test_y, &small_config()).unwrap();
        for (name, a) in &r.accuracies {
            assert!((a - 0.25).abs() <= 0.1, "{name}: {a}");
        }
        assert!(r.silhouette.unwrap().abs() < 0.1);
    }

    #[test]
    fn ten_point_sanity_for_every_classifier() {
        let x = Matrix::from_rows(
            &(0..10)
                .map(|i| [if i < 5 { -5.0 } else { 5.0 } + i as f64 * 0.01, 0.0])
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let y: Vec<usize> = (0..10).map(|i| (i >= 5) as usize).collect();
        let lr = fit_logistic(&x, &y, &LogisticConfig::default()).unwrap();
        let nb = fit_gaussian_nb(&x, &y, 1e-9).unwrap();
        let rf = fit_random_forest(&x, &y, &ForestConfig::default()).unwrap();
        for pred in [
            predict_logistic(&lr, &x),
            predict_nb(&nb, &x),
            predict_forest(&rf, &x),
        ] {
            let pred = pred.unwrap();
            assert_eq!(accuracy(&pred, &y).unwrap(), 1.0);
        }
        assert_eq!(
            predict_forest(&rf, &x).unwrap(),
            predict_forest(&rf, &x).unwrap()
        );
    }

    #[test]
    fn report_serializes() {
        let (x, y) = blobs(2, 10, 0.1, 1);
        let r = evaluate_embedding(&x, &y, &x, &y, &small_config()).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        let back: EvalReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.accuracies, r.accuracies);
    }
}
