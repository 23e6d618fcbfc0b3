use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{argmax_counts, check_fit, check_predict};
use crate::error::{Error, Result};
use crate::numcore::{Matrix, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_depth: 12,
            min_leaf: 2,
            seed: 42,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::Config(
                "random forest needs at least one tree".into(),
            ));
        }
        if self.min_leaf == 0 {
            return Err(Error::Config("min_leaf must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(usize),
    /// Rows with `x[feature] <= threshold` go to `left`.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn predict_row(&self, row: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf(class) => return class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[feature] <= threshold {
                        left
                    } else {
                        right
                    }
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [usize],
    classes: usize,
    features_per_node: usize,
    config: &'a ForestConfig,
    rng: SeededRng,
    nodes: Vec<Node>,
    feature_pool: Vec<usize>,
    column: Vec<(f64, usize)>,
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

struct Best {
    impurity: f64,
    feature: usize,
    threshold: f64,
}

impl Builder<'_> {
    fn build(&mut self, samples: &mut [usize], depth: usize) -> usize {
        let id = self.nodes.len();
        let mut counts = vec![0usize; self.classes];
        samples.iter().for_each(|&s| counts[self.y[s]] += 1);
        let majority = argmax_counts(&counts);
        self.nodes.push(Node::Leaf(majority));

        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if depth >= self.config.max_depth || pure || samples.len() < 2 * self.config.min_leaf {
            return id;
        }
        let Some(best) = self.best_split(samples) else {
            return id;
        };
        let (x, feature, threshold) = (self.x, best.feature, best.threshold);
        let mut cut = 0;
        for i in 0..samples.len() {
            if x.get(samples[i], feature) <= threshold {
                samples.swap(i, cut);
                cut += 1;
            }
        }
        let (lo, hi) = samples.split_at_mut(cut);
        let left = self.build(lo, depth + 1);
        let right = self.build(hi, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }

    /// Lowest weighted Gini over ⌈√d⌉ features drawn without replacement
    /// and every midpoint between distinct sorted values that leaves at
    /// least `min_leaf` rows per side. A split is taken even when it does
    /// not reduce impurity.
    fn best_split(&mut self, samples: &[usize]) -> Option<Best> {
        let d = self.feature_pool.len();
        for i in 0..self.features_per_node {
            let j = i + self.rng.below(d - i);
            self.feature_pool.swap(i, j);
        }
        let n = samples.len();
        let min_leaf = self.config.min_leaf;
        let mut best: Option<Best> = None;
        let mut left = vec![0usize; self.classes];
        let mut right = vec![0usize; self.classes];
        for fi in 0..self.features_per_node {
            let feature = self.feature_pool[fi];
            self.column.clear();
            self.column
                .extend(samples.iter().map(|&s| (self.x.get(s, feature), self.y[s])));
            self.column
                .sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            left.iter_mut().for_each(|c| *c = 0);
            right.iter_mut().for_each(|c| *c = 0);
            self.column.iter().for_each(|&(_, label)| right[label] += 1);
            for i in 0..n - 1 {
                let (value, label) = self.column[i];
                left[label] += 1;
                right[label] -= 1;
                let next = self.column[i + 1].0;
                let n_left = i + 1;
                if next == value || n_left < min_leaf || n - n_left < min_leaf {
                    continue;
                }
                let impurity = (n_left as f64 * gini(&left, n_left)
                    + (n - n_left) as f64 * gini(&right, n - n_left))
                    / n as f64;
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    best = Some(Best {
                        impurity,
                        feature,
                        threshold: value + (next - value) / 2.0,
                    });
                }
            }
        }
        best
    }
}

fn grow_tree(
    x: &Matrix,
    y: &[usize],
    classes: usize,
    config: &ForestConfig,
    tree_index: usize,
) -> DecisionTree {
    let (n, d) = x.shape();
    let mut rng = SeededRng::new(config.seed.wrapping_add(tree_index as u64));
    let mut samples: Vec<usize> = (0..n).map(|_| rng.below(n)).collect();
    let mut builder = Builder {
        x,
        y,
        classes,
        features_per_node: ((d as f64).sqrt().ceil() as usize).clamp(1, d),
        config,
        rng,
        nodes: Vec::new(),
        feature_pool: (0..d).collect(),
        column: Vec::with_capacity(n),
    };
    builder.build(&mut samples, 0);
    DecisionTree {
        nodes: builder.nodes,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    classes: usize,
    features: usize,
}

impl RandomForest {
    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }
}

/// Bagged CART trees. Tree `t` draws its bootstrap sample and feature
/// subsets from a generator seeded with `seed + t`, so the forest does not
/// depend on how trees are scheduled across threads.
pub fn fit_random_forest(x: &Matrix, y: &[usize], config: &ForestConfig) -> Result<RandomForest> {
    config.validate()?;
    let classes = check_fit(x, y, "fit_random_forest")?;
    if x.cols() == 0 {
        return Err(Error::Empty {
            op: "fit_random_forest",
        });
    }
    let trees = (0..config.n_trees)
        .into_par_iter()
        .map(|t| grow_tree(x, y, classes, config, t))
        .collect();
    Ok(RandomForest {
        trees,
        classes,
        features: x.cols(),
    })
}

/// Majority vote over trees; ties go to the lowest class index.
pub fn predict_forest(model: &RandomForest, x: &Matrix) -> Result<Vec<usize>> {
    check_predict(x, model.features, "predict_forest")?;
    let rows: Vec<&[f64]> = x.row_iter().collect();
    Ok(rows
        .par_iter()
        .map(|r| {
            let mut votes = vec![0usize; model.classes];
            model
                .trees
                .iter()
                .for_each(|t| votes[t.predict_row(r)] += 1);
            argmax_counts(&votes)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::accuracy;
    use crate::eval::testdata::{blobs, xor};

    #[test]
    fn xor_is_learned() {
        let (x, y) = xor(50, 0.1, 2);
        let cfg = ForestConfig {
            n_trees: 20,
            max_depth: 4,
            ..Default::default()
        };
        let f = fit_random_forest(&x, &y, &cfg).unwrap();
        assert!(accuracy(&predict_forest(&f, &x).unwrap(), &y).unwrap() >= 0.95);
    }

    #[test]
    fn stump_predicts_majority() {
        let rows: Vec<[f64; 2]> = (0..50).map(|i| [i as f64, (i * 7 % 11) as f64]).collect();
        let y: Vec<usize> = (0..50).map(|i| if i % 10 == 0 { 1 } else { 2 }).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let cfg = ForestConfig {
            n_trees: 1,
            max_depth: 0,
            ..Default::default()
        };
        let f = fit_random_forest(&x, &y, &cfg).unwrap();
        assert_eq!(f.trees()[0].depth(), 0);
        assert!(predict_forest(&f, &x).unwrap().iter().all(|&p| p == 2));
    }

    #[test]
    fn deterministic_and_depth_bounded() {
        let (x, y) = blobs(3, 30, 0.8, 11);
        let cfg = ForestConfig {
            n_trees: 15,
            max_depth: 3,
            ..Default::default()
        };
        let a = fit_random_forest(&x, &y, &cfg).unwrap();
        let b = fit_random_forest(&x, &y, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            predict_forest(&a, &x).unwrap(),
            predict_forest(&b, &x).unwrap()
        );
        assert!(a.trees().iter().all(|t| t.depth() <= 3));
    }

    #[test]
    fn thread_count_does_not_matter() {
        let (x, y) = blobs(3, 30, 0.8, 12);
        let cfg = ForestConfig {
            n_trees: 8,
            ..Default::default()
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let serial = pool.install(|| fit_random_forest(&x, &y, &cfg).unwrap());
        assert_eq!(serial, fit_random_forest(&x, &y, &cfg).unwrap());
    }

    #[test]
    fn min_leaf_is_respected() {
        let rows: Vec<[f64; 1]> = (0..10).map(|i| [i as f64]).collect();
        let y: Vec<usize> = (0..10).map(|i| (i == 0) as usize).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let cfg = ForestConfig {
            n_trees: 1,
            min_leaf: 5,
            ..Default::default()
        };
        let f = fit_random_forest(&x, &y, &cfg).unwrap();
        // the lone class-1 row can never be isolated
        assert_eq!(predict_forest(&f, &x).unwrap(), vec![0; 10]);
    }

    #[test]
    fn config_errors() {
        let x = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        let zero = ForestConfig {
            n_trees: 0,
            ..Default::default()
        };
        assert!(fit_random_forest(&x, &[0, 1], &zero).is_err());
        assert!(fit_random_forest(&x, &[1, 1], &ForestConfig::default()).is_err());
    }
}
