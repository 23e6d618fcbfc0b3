use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numcore::Matrix;

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Mean silhouette with the given labels as clusters, Euclidean distance.
///
/// A point alone in its class scores 0, as does a point whose `a` and `b`
/// are both zero.
pub fn silhouette_score(points: &Matrix, labels: &[usize]) -> Result<f64> {
    let n = points.rows();
    if labels.len() != n {
        return Err(Error::Shape {
            op: "silhouette_score",
            left: points.shape(),
            right: (labels.len(), 1),
        });
    }
    if n < 2 {
        return Err(Error::Config(format!(
            "silhouette needs at least 2 points, got {n}"
        )));
    }
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![0usize; k];
    labels.iter().for_each(|&l| counts[l] += 1);
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::Config(
            "silhouette needs at least 2 distinct labels".into(),
        ));
    }

    let per_point: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let own = labels[i];
            if counts[own] == 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; k];
            let pi = points.row(i);
            for j in 0..n {
                if j != i {
                    sums[labels[j]] += distance(pi, points.row(j));
                }
            }
            let a = sums[own] / (counts[own] - 1) as f64;
            let b = (0..k)
                .filter(|&c| c != own && counts[c] > 0)
                .map(|c| sums[c] / counts[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom == 0.0 {
                0.0
            } else {
                (b - a) / denom
            }
        })
        .collect();
    Ok(per_point.iter().sum::<f64>() / n as f64)
}
